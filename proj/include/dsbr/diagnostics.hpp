#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsbr/dynamics.hpp"
#include "dsbr/game.hpp"
#include "dsbr/records.hpp"

namespace dsbr {

// Entropy-regularized gap of a joint mixture in the two-matrix game (X1, X2):
//   V_X(mu1, mu2) = sum_i max_{mu*} { (mu* - mu^i)' X_i mu^{-i}
//                                     + tau nu(mu*) - tau nu(mu^i) }.
// The inner maximizer is the softmax of X_i mu^{-i}, so each summand is
// evaluated in closed form through log-sum-exp:
//   tau * lse(X_i mu^{-i} / tau) - (mu^i)' X_i mu^{-i} - tau nu(mu^i).
// Nonnegative; zero exactly when each policy is the smoothed best response
// to the other.
double lyapunov_V(const Mat& X1, const Mat& X2, const Vec& mu1, const Vec& mu2, double tau);

double log_sum_exp(const Vec& x);

struct MatrixDiagnosticsContext {
    const MatrixGame* game = nullptr;
    double tau = 0.0;
};

struct MarkovDiagnosticsContext {
    const MarkovGame* game = nullptr;
    Vec v_star1;  // precomputed once per run
    Vec v_star2;
    Vec p_o;
    double tau = 0.0;
    double tol = 1e-8;
    std::optional<double> c4_hat;  // Markov smoothing-bias constant; NaN bias if absent
};

// Snapshot of the logged quantities at one checkpoint. Pure reads of the
// learner state; they consume no randomness and cannot perturb a trajectory.
// Matrix records: nash_gap is exact, l_pi uses X_i = R^i, l_q tracks R^i pi^{-i},
// and l_v = l_sum = 0 (there is no value iterate).
DiagnosticsRecord compute_record(const MatrixDiagnosticsContext& ctx, const LearnerState& s1,
                                 const LearnerState& s2, long k);

// Markov records: l_v = sum_i ||v^i - v_*^i||_inf, l_sum = ||v^1 + v^2||_inf,
// l_pi = sum_s V_{v,s}(pi(s)), l_q = sum_i sum_s ||q^i(s) - T^i(v^i)(s) pi^{-i}(s)||_2^2.
DiagnosticsRecord compute_record(const MarkovDiagnosticsContext& ctx, const LearnerState& s1,
                                 const LearnerState& s2, long outer_t, long inner_k);

enum class TheoremCase { thm1_constant, thm1_linear, thm1_poly, thm2, thm3 };

struct TheoremParams {
    long K = 0;
    long T = 0;
    double tau = 0.0;
    int a_max = 2;
    int n_states = 1;
    double gamma = 0.0;
    double alpha = 0.0;
    double h = 0.0;
    double z = 0.0;
    double ratio = 0.0;  // c_{alpha,beta}
    double z_mix = 0.0;  // mixing threshold z_beta (thm2) or z_K (thm3)
    long k0 = 0;         // burn-in index (thm3)
};

struct BoundTerm {
    std::string label;
    double value = 0.0;
};

struct BoundBreakdown {
    double total = 0.0;
    std::vector<BoundTerm> terms;
};

// Numerically evaluates the stated finite-sample bound, term by term. The
// unspecified numerical constants must be supplied explicitly in `constants`
// (e.g. "c1" for the constant-stepsize matrix bound; "c1_hat".."c4_hat" and
// "L_tau_hat" for the Markov constant-stepsize bound; "c1_hat_prime"..
// "c3_hat_prime" and "L_tau_hat" for the diminishing one). A missing constant
// raises ValidationError rather than silently inventing a number.
BoundBreakdown theorem_bound(TheoremCase which, const TheoremParams& params,
                             const std::map<std::string, double>& constants);

}  // namespace dsbr
