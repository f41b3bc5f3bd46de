#include "dsbr/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "dsbr/errors.hpp"
#include "dsbr/oracles.hpp"

namespace dsbr {

namespace {

void check_distribution(const Vec& mu, const char* name) {
    if (mu.size() == 0) throw ValidationError(std::string(name) + ": empty distribution");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (!(mu(i) >= 0.0)) {
            throw ValidationError(std::string(name) + ": negative entry at " + std::to_string(i));
        }
        sum += mu(i);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError(std::string(name) + ": entries sum to " + std::to_string(sum));
    }
}

// One player's summand of V_X, clamped at zero against rounding (the exact
// value is a maximum over a set containing mu itself, hence nonnegative).
double v_summand(const Mat& X, const Vec& mu_own, const Vec& mu_opp, double tau) {
    const Vec payoff = X * mu_opp;
    const double best = tau * log_sum_exp(payoff / tau);
    const double value = best - mu_own.dot(payoff) - tau * entropy(mu_own);
    return std::max(0.0, value);
}

double require_constant(const std::map<std::string, double>& constants, const std::string& key) {
    const auto it = constants.find(key);
    if (it == constants.end()) {
        throw ValidationError("theorem_bound: constant \"" + key +
                              "\" is unspecified in the analysis and must be supplied");
    }
    return it->second;
}

double pow_int(double base, double exponent) { return std::pow(base, exponent); }

// (1 - x)^e for huge e without pow underflow surprises.
double decay_pow(double one_minus, double exponent) {
    if (one_minus <= 0.0) return 0.0;
    return std::exp(exponent * std::log(one_minus));
}

}  // namespace

double log_sum_exp(const Vec& x) {
    if (x.size() == 0) throw ValidationError("log_sum_exp: empty input");
    const double m = x.maxCoeff();
    return m + std::log((x.array() - m).exp().sum());
}

double lyapunov_V(const Mat& X1, const Mat& X2, const Vec& mu1, const Vec& mu2, double tau) {
    if (!(tau > 0.0)) throw ValidationError("lyapunov_V: tau must be positive");
    if (X1.rows() != mu1.size() || X1.cols() != mu2.size() || X2.rows() != mu2.size() ||
        X2.cols() != mu1.size()) {
        throw ValidationError("lyapunov_V: inconsistent dimensions");
    }
    check_distribution(mu1, "mu1");
    check_distribution(mu2, "mu2");
    return v_summand(X1, mu1, mu2, tau) + v_summand(X2, mu2, mu1, tau);
}

DiagnosticsRecord compute_record(const MatrixDiagnosticsContext& ctx, const LearnerState& s1,
                                 const LearnerState& s2, long k) {
    const MatrixGame& game = *ctx.game;
    const Vec pi1 = s1.policy.row(0).transpose();
    const Vec pi2 = s2.policy.row(0).transpose();

    DiagnosticsRecord rec;
    rec.outer_t = 0;
    rec.inner_k = k;
    rec.nash_gap = matrix_nash_gap(game, pi1, pi2);
    rec.l_pi = lyapunov_V(game.payoff(), -game.payoff().transpose(), pi1, pi2, ctx.tau);
    rec.l_q = (s1.q.row(0).transpose() - marginal_payoff(game, pi2, 1)).squaredNorm() +
              (s2.q.row(0).transpose() - marginal_payoff(game, pi1, 2)).squaredNorm();
    rec.smoothing_bias = 2.0 * ctx.tau * std::log(static_cast<double>(game.a_max()));
    return rec;
}

DiagnosticsRecord compute_record(const MarkovDiagnosticsContext& ctx, const LearnerState& s1,
                                 const LearnerState& s2, long outer_t, long inner_k) {
    const MarkovGame& game = *ctx.game;
    const Policy pi1{s1.policy};
    const Policy pi2{s2.policy};

    DiagnosticsRecord rec;
    rec.outer_t = outer_t;
    rec.inner_k = inner_k;
    rec.nash_gap = markov_nash_gap(game, pi1, pi2, ctx.p_o, ctx.tol);
    rec.l_v = (s1.v - ctx.v_star1).cwiseAbs().maxCoeff() +
              (s2.v - ctx.v_star2).cwiseAbs().maxCoeff();
    rec.l_sum = (s1.v + s2.v).cwiseAbs().maxCoeff();

    const Mat qbar1 = q_target(game, s1.v, pi2, 1);
    const Mat qbar2 = q_target(game, s2.v, pi1, 2);
    rec.l_q = (s1.q - qbar1).squaredNorm() + (s2.q - qbar2).squaredNorm();

    double l_pi = 0.0;
    for (int s = 0; s < game.n_states(); ++s) {
        l_pi += lyapunov_V(apply_T_state(game, s1.v, 1, s), apply_T_state(game, s2.v, 2, s),
                           s1.policy.row(s).transpose(), s2.policy.row(s).transpose(), ctx.tau);
    }
    rec.l_pi = l_pi;

    if (ctx.c4_hat.has_value()) {
        const double g = game.gamma();
        rec.smoothing_bias = ctx.c4_hat.value() * ctx.tau *
                             std::log(static_cast<double>(game.a_max())) / ((1.0 - g) * (1.0 - g));
    } else {
        rec.smoothing_bias = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

BoundBreakdown theorem_bound(TheoremCase which, const TheoremParams& p,
                             const std::map<std::string, double>& constants) {
    if (!(p.tau > 0.0)) throw ValidationError("theorem_bound: tau must be positive");
    if (p.a_max < 2) throw ValidationError("theorem_bound: a_max must be >= 2");
    const double a = static_cast<double>(p.a_max);
    const double log_a = std::log(a);
    const double k = static_cast<double>(p.K);
    BoundBreakdown out;
    auto add = [&](std::string label, double value) {
        out.terms.push_back({std::move(label), value});
        out.total += value;
    };

    switch (which) {
        case TheoremCase::thm1_constant: {
            const double c1 = require_constant(constants, "c1");
            add("convergence bias", 3.0 * decay_pow(1.0 - p.ratio * p.alpha / 2.0, k));
            add("variance", c1 * std::pow(a, 1.5) * p.alpha / p.ratio);
            add("smoothing bias", 2.0 * p.tau * log_a);
            return out;
        }
        case TheoremCase::thm1_linear: {
            const double c2 = require_constant(constants, "c2");
            if (!(p.ratio * p.alpha > 2.0)) {
                throw ValidationError(
                    "theorem_bound: the linear-stepsize bound requires alpha > 2/c_{alpha,beta}");
            }
            add("convergence bias",
                3.0 * pow_int(p.h / (k + p.h), p.ratio * p.alpha / 2.0));
            add("variance",
                c2 * std::pow(a, 1.5) * p.alpha / (p.ratio * p.alpha - 2.0) * p.alpha / (k + p.h));
            add("smoothing bias", 2.0 * p.tau * log_a);
            return out;
        }
        case TheoremCase::thm1_poly: {
            const double c3 = require_constant(constants, "c3");
            if (!(p.z > 0.0 && p.z < 1.0)) {
                throw ValidationError("theorem_bound: polynomial case needs z in (0, 1)");
            }
            const double window = std::pow(k + p.h, 1.0 - p.z) - std::pow(p.h, 1.0 - p.z);
            add("convergence bias",
                3.0 * std::exp(-p.alpha * window / (2.0 * p.ratio * (1.0 - p.z))));
            add("variance", c3 * std::pow(a, 1.5) / p.ratio * p.alpha / std::pow(k + p.h, p.z));
            add("smoothing bias", 2.0 * p.tau * log_a);
            return out;
        }
        case TheoremCase::thm2: {
            const double c1 = require_constant(constants, "c1_hat");
            const double c2 = require_constant(constants, "c2_hat");
            const double c3 = require_constant(constants, "c3_hat");
            const double c4 = require_constant(constants, "c4_hat");
            const double l_hat = require_constant(constants, "L_tau_hat");
            if (!(p.gamma >= 0.0 && p.gamma < 1.0)) {
                throw ValidationError("theorem_bound: gamma must lie in [0, 1)");
            }
            if (p.z_mix <= 0.0) {
                throw ValidationError("theorem_bound: thm2 needs the mixing threshold z_mix");
            }
            const double s = static_cast<double>(p.n_states);
            const double om = 1.0 - p.gamma;
            const double t = static_cast<double>(p.T);
            const double zb = p.z_mix;
            add("E1 value iteration bias",
                c1 * s * a * t / (p.tau * pow_int(om, 3.0)) *
                    decay_pow((1.0 + p.gamma) / 2.0, t - 1.0));
            add("E2 inner-loop convergence bias",
                c2 * std::pow(s * a, 1.5) * std::sqrt(std::max(0.0, k - zb)) /
                    (p.tau * pow_int(om, 5.0)) *
                    decay_pow(1.0 - p.ratio * p.alpha / 2.0, (k - zb - 1.0) / 2.0));
            add("E3 inner-loop variance",
                c3 * s * s * a * a * l_hat / (p.ratio * pow_int(om, 5.0)) * zb * zb *
                    std::sqrt(p.alpha));
            add("E4 smoothing bias", c4 * p.tau * log_a / (om * om));
            return out;
        }
        case TheoremCase::thm3: {
            const double c1 = require_constant(constants, "c1_hat_prime");
            const double c23 = require_constant(constants, "c2_hat_prime");
            const double c4 = require_constant(constants, "c3_hat_prime");
            const double l_hat = require_constant(constants, "L_tau_hat");
            if (p.z_mix <= 0.0 || p.k0 < 0) {
                throw ValidationError("theorem_bound: thm3 needs z_mix and k0");
            }
            const double s = static_cast<double>(p.n_states);
            const double om = 1.0 - p.gamma;
            const double t = static_cast<double>(p.T);
            const double alpha_k0 = p.alpha / (static_cast<double>(p.k0) + p.h);
            add("E1 value iteration bias",
                c1 * s * a * t / (p.tau * pow_int(om, 3.0)) *
                    decay_pow((p.gamma + 1.0) / 2.0, t - 1.0));
            add("E2,3 inner-loop bias and variance",
                c23 * s * s * a * a * l_hat / (alpha_k0 * p.ratio * pow_int(om, 5.0)) * p.z_mix *
                    p.z_mix * std::sqrt(p.alpha) / std::sqrt(k + p.h));
            add("E4 smoothing bias", c4 * p.tau * log_a / (om * om));
            return out;
        }
    }
    throw ValidationError("theorem_bound: unknown case");
}

}  // namespace dsbr
