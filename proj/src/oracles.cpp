#include "dsbr/oracles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dsbr/errors.hpp"

namespace dsbr {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr long kSimplexIterationCap = 200000;
constexpr long kValueIterationCap = 100000000;

void check_simplex(const Vec& p, const char* name) {
    if (p.size() == 0) throw ValidationError(std::string(name) + ": empty distribution");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p(i) >= 0.0)) {
            throw ValidationError(std::string(name) + ": entry " + std::to_string(i) +
                                  " is negative");
        }
        sum += p(i);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError(std::string(name) + ": entries sum to " + std::to_string(sum));
    }
}

// Marginalized single-agent MDP of `player` against a fixed opponent policy.
struct MarginalizedMdp {
    Mat reward;                      // |S| x |A_own|
    std::vector<double> transition;  // [s][a_own][s'] row-major
    int n_states;
    int n_own;

    double prob(int s, int a, int s2) const {
        return transition[(static_cast<std::size_t>(s) * n_own + a) * n_states + s2];
    }
};

MarginalizedMdp marginalize(const MarkovGame& game, int player, const Policy& opponent) {
    const int opp = player == 1 ? 2 : 1;
    if (opponent.n_states() != game.n_states() || opponent.n_actions() != game.n_actions(opp)) {
        throw ValidationError("opponent policy shape does not match the game");
    }
    opponent.validate();
    MarginalizedMdp m;
    m.n_states = game.n_states();
    m.n_own = game.n_actions(player);
    m.reward = Mat::Zero(m.n_states, m.n_own);
    m.transition.assign(static_cast<std::size_t>(m.n_states) * m.n_own * m.n_states, 0.0);
    for (int s = 0; s < m.n_states; ++s) {
        for (int a = 0; a < m.n_own; ++a) {
            for (int b = 0; b < game.n_actions(opp); ++b) {
                const double w = opponent.probs(s, b);
                if (w == 0.0) continue;
                m.reward(s, a) += w * game.reward(player, s, a, b);
                const int a1 = player == 1 ? a : b;
                const int a2 = player == 1 ? b : a;
                for (int s2 = 0; s2 < m.n_states; ++s2) {
                    m.transition[(static_cast<std::size_t>(s) * m.n_own + a) * m.n_states + s2] +=
                        w * game.prob(s, a1, a2, s2);
                }
            }
        }
    }
    return m;
}

// Stop threshold for value iteration on a gamma-contraction. Returning the
// post-application iterate w once ||w - v||_inf <= thr gives
// ||w - v_*||_inf <= gamma/(1-gamma) * thr; the min with tol also keeps the
// reported residual itself within the requested tolerance.
double vi_threshold(double gamma, double tol) {
    if (gamma == 0.0) return tol;
    return tol * std::min(1.0, (1.0 - gamma) / (2.0 * gamma));
}

}  // namespace

MatrixGameSolution matrix_game_value(const Mat& X) {
    const int m = static_cast<int>(X.rows());
    const int n = static_cast<int>(X.cols());
    if (m < 1 || n < 1) throw ValidationError("matrix_game_value: empty matrix");
    if (!X.allFinite()) throw ValidationError("matrix_game_value: non-finite entries");

    const double shift = 1.0 + X.cwiseAbs().maxCoeff();
    const int n_cols = n + m;  // structural variables then slacks

    // Tableau rows 0..m-1 are constraints, row m holds reduced costs; the last
    // column is the right-hand side.
    Mat t(m + 1, n_cols + 1);
    t.setZero();
    t.block(0, 0, m, n) = X.array() + shift;
    t.block(0, n, m, m) = Mat::Identity(m, m);
    t.col(n_cols).head(m).setOnes();
    for (int j = 0; j < n; ++j) t(m, j) = -1.0;

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    for (long iter = 0;; ++iter) {
        if (iter > kSimplexIterationCap) {
            throw NumericalError("matrix_game_value: simplex iteration cap exceeded");
        }
        int enter = -1;
        for (int j = 0; j < n_cols; ++j) {
            if (t(m, j) < -kPivotEps) {  // Bland: lowest-index improving column
                enter = j;
                break;
            }
        }
        if (enter < 0) break;

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (t(i, enter) > kPivotEps) {
                const double ratio = t(i, n_cols) / t(i, enter);
                if (ratio < best_ratio - kPivotEps) {
                    best_ratio = ratio;
                    leave = i;
                } else if (ratio <= best_ratio + kPivotEps && leave >= 0 &&
                           basis[i] < basis[leave]) {
                    leave = i;  // lowest basic-variable index among ties
                }
            }
        }
        if (leave < 0) {
            throw NumericalError("matrix_game_value: LP unbounded (malformed tableau)");
        }
        t.row(leave) /= t(leave, enter);
        for (int i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = t(i, enter);
            if (f != 0.0) t.row(i) -= f * t.row(leave);
        }
        basis[leave] = enter;
    }

    Vec x = Vec::Zero(n);
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) x(basis[i]) = t(i, n_cols);
    }
    Vec y = t.row(m).segment(n, m).cwiseMax(0.0);

    const double sum_x = x.sum();
    const double sum_y = y.sum();
    if (!(sum_x > 0.0) || !(sum_y > 0.0)) {
        throw NumericalError("matrix_game_value: degenerate LP solution (zero mass)");
    }
    if (std::abs(sum_x - sum_y) > 1e-7 * std::max(1.0, sum_x)) {
        std::ostringstream os;
        os << "matrix_game_value: duality mismatch, 1'x = " << sum_x << " vs 1'y = " << sum_y;
        throw NumericalError(os.str());
    }

    MatrixGameSolution sol;
    sol.value = 1.0 / sum_x - shift;
    sol.col_policy = (x / sum_x).cwiseMax(0.0);
    sol.col_policy /= sol.col_policy.sum();
    sol.row_policy = y / sum_y;
    return sol;
}

double matrix_nash_gap(const MatrixGame& game, const Vec& pi1, const Vec& pi2) {
    if (pi1.size() != game.n_actions(1) || pi2.size() != game.n_actions(2)) {
        throw ValidationError("matrix_nash_gap: policy dimensions do not match the game");
    }
    check_simplex(pi1, "pi1");
    check_simplex(pi2, "pi2");
    const Vec m1 = marginal_payoff(game, pi2, 1);
    const Vec m2 = marginal_payoff(game, pi1, 2);
    const double gap1 = m1.maxCoeff() - pi1.dot(m1);
    const double gap2 = m2.maxCoeff() - pi2.dot(m2);
    return gap1 + gap2;
}

ValueIterationResult minimax_value_iteration(const MarkovGame& game, int player, double tol) {
    if (!(tol > 0.0)) throw ValidationError("minimax_value_iteration: tol must be positive");
    const double gamma = game.gamma();
    Vec v = Vec::Zero(game.n_states());

    if (gamma == 0.0) {
        // One backup is exact: B is a constant map, so the residual of the
        // result is identically zero.
        Vec w(game.n_states());
        for (int s = 0; s < game.n_states(); ++s) {
            w(s) = matrix_game_value(apply_T_state(game, v, player, s)).value;
        }
        return {w, 1, 0.0};
    }

    const double threshold = vi_threshold(gamma, tol);
    for (long iter = 1; iter <= kValueIterationCap; ++iter) {
        Vec w(game.n_states());
        for (int s = 0; s < game.n_states(); ++s) {
            w(s) = matrix_game_value(apply_T_state(game, v, player, s)).value;
        }
        const double residual = (w - v).cwiseAbs().maxCoeff();
        v = std::move(w);
        if (residual <= threshold) return {v, iter, residual};
    }
    throw NumericalError("minimax_value_iteration: iteration cap exceeded");
}

Vec best_response_value(const MarkovGame& game, int player, const Policy& opponent_policy,
                        double tol) {
    if (!(tol > 0.0)) throw ValidationError("best_response_value: tol must be positive");
    const MarginalizedMdp mdp = marginalize(game, player, opponent_policy);
    const double gamma = game.gamma();
    Vec v = Vec::Zero(mdp.n_states);
    const double threshold = vi_threshold(gamma, tol);
    for (long iter = 1; iter <= kValueIterationCap; ++iter) {
        Vec w(mdp.n_states);
        for (int s = 0; s < mdp.n_states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_own; ++a) {
                double q = mdp.reward(s, a);
                if (gamma > 0.0) {
                    double ev = 0.0;
                    for (int s2 = 0; s2 < mdp.n_states; ++s2) ev += mdp.prob(s, a, s2) * v(s2);
                    q += gamma * ev;
                }
                best = std::max(best, q);
            }
            w(s) = best;
        }
        const double residual = (w - v).cwiseAbs().maxCoeff();
        v = std::move(w);
        if (gamma == 0.0 || residual <= threshold) return v;
    }
    throw NumericalError("best_response_value: iteration cap exceeded");
}

Vec policy_value(const MarkovGame& game, const Policy& pi1, const Policy& pi2, int player) {
    if (pi1.n_states() != game.n_states() || pi1.n_actions() != game.n_actions(1) ||
        pi2.n_states() != game.n_states() || pi2.n_actions() != game.n_actions(2)) {
        throw ValidationError("policy_value: policy shapes do not match the game");
    }
    pi1.validate();
    pi2.validate();
    const int n = game.n_states();
    Mat p = Mat::Zero(n, n);
    Vec r = Vec::Zero(n);
    for (int s = 0; s < n; ++s) {
        for (int a1 = 0; a1 < game.n_actions(1); ++a1) {
            for (int a2 = 0; a2 < game.n_actions(2); ++a2) {
                const double w = pi1.probs(s, a1) * pi2.probs(s, a2);
                if (w == 0.0) continue;
                const int own = player == 1 ? a1 : a2;
                const int opp = player == 1 ? a2 : a1;
                r(s) += w * game.reward(player, s, own, opp);
                for (int s2 = 0; s2 < n; ++s2) p(s, s2) += w * game.prob(s, a1, a2, s2);
            }
        }
    }
    const Mat lhs = Mat::Identity(n, n) - game.gamma() * p;
    return lhs.partialPivLu().solve(r);
}

double markov_nash_gap(const MarkovGame& game, const Policy& pi1, const Policy& pi2,
                       const Vec& p_o, double tol) {
    if (p_o.size() != game.n_states()) {
        throw ValidationError("markov_nash_gap: p_o has wrong length");
    }
    check_simplex(p_o, "p_o");
    double gap = 0.0;
    gap += p_o.dot(best_response_value(game, 1, pi2, tol) - policy_value(game, pi1, pi2, 1));
    gap += p_o.dot(best_response_value(game, 2, pi1, tol) - policy_value(game, pi1, pi2, 2));
    return gap;
}

Mat q_target(const MarkovGame& game, const Vec& v, const Policy& opponent_policy, int player) {
    const int opp = player == 1 ? 2 : 1;
    if (opponent_policy.n_states() != game.n_states() ||
        opponent_policy.n_actions() != game.n_actions(opp)) {
        throw ValidationError("q_target: opponent policy shape does not match the game");
    }
    Mat out(game.n_states(), game.n_actions(player));
    for (int s = 0; s < game.n_states(); ++s) {
        const Mat ts = apply_T_state(game, v, player, s);
        out.row(s) = (ts * opponent_policy.probs.row(s).transpose()).transpose();
    }
    return out;
}

JointPolicy minimax_policies(const MarkovGame& game, double tol) {
    // The per-state optimizers of T(v~)(s) for a v~ within tol/8 of v_* keep
    // the induced suboptimality well below tol.
    const Vec v1 = minimax_value_iteration(game, 1, tol / 8.0).v_star;
    const Vec v2 = minimax_value_iteration(game, 2, tol / 8.0).v_star;
    JointPolicy joint;
    joint.p1.probs = Mat::Zero(game.n_states(), game.n_actions(1));
    joint.p2.probs = Mat::Zero(game.n_states(), game.n_actions(2));
    for (int s = 0; s < game.n_states(); ++s) {
        joint.p1.probs.row(s) = matrix_game_value(apply_T_state(game, v1, 1, s)).row_policy;
        joint.p2.probs.row(s) = matrix_game_value(apply_T_state(game, v2, 2, s)).row_policy;
    }
    return joint;
}

}  // namespace dsbr
