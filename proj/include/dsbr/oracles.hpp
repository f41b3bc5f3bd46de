#pragma once

#include "dsbr/game.hpp"

namespace dsbr {

// Exact solution of max_{mu} min_{nu} mu^T X nu over the simplices.
struct MatrixGameSolution {
    double value = 0.0;
    Vec row_policy;  // maximin optimizer for the row player
    Vec col_policy;  // minimax optimizer for the column player
};

// Dense-simplex LP on the standard maximin formulation (the payoff matrix is
// shifted positive, then max 1'x s.t. (X+c)x <= 1, x >= 0 is solved; the
// shifted game value is 1/(1'x) and the simplex multipliers recover the row
// player's optimizer). Bland's rule plus lowest-index tie-breaking makes the
// output deterministic; only the value is contract-bound, the returned
// policies are one optimizer among possibly many.
MatrixGameSolution matrix_game_value(const Mat& X);

// Nash gap of a joint mixed profile in a matrix game: the inner maximum over
// the simplex is attained at a vertex, so it reduces to a max over actions.
double matrix_nash_gap(const MatrixGame& game, const Vec& pi1, const Vec& pi2);

struct ValueIterationResult {
    Vec v_star;
    long iterations = 0;
    double residual = 0.0;  // ||B(v) - v||_inf at exit, <= requested tolerance
};

// Fixed point of the per-player minimax Bellman backup v(s) <- val(T(v)(s)),
// a gamma-contraction. Iterates from v = 0 and stops once the residual
// guarantees ||v - v_*||_inf <= tol.
ValueIterationResult minimax_value_iteration(const MarkovGame& game, int player, double tol);

// Optimal value of `player` against a fixed opponent policy: the opponent is
// marginalized out to a single-agent MDP which is solved by value iteration.
Vec best_response_value(const MarkovGame& game, int player, const Policy& opponent_policy,
                        double tol);

// Exact joint-policy evaluation: solves (I - gamma P_pi) v = r_pi directly.
Vec policy_value(const MarkovGame& game, const Policy& pi1, const Policy& pi2, int player);

// Nash gap of a joint policy under initial distribution p_o:
//   sum_i ( <p_o, v^i_{*,pi^{-i}}> - <p_o, v^i_pi> ).
double markov_nash_gap(const MarkovGame& game, const Policy& pi1, const Policy& pi2,
                       const Vec& p_o, double tol);

// Opponent-marginalized lookahead payoff q_bar(s, a) = sum_b T(v)(s,a,b) pi_opp(b|s),
// the target tracked by the inner-loop q update.
Mat q_target(const MarkovGame& game, const Vec& v, const Policy& opponent_policy, int player);

// Greedy minimax profile extracted from v_* (per-state matrix-game optimizers
// of T(v_*)(s)). Used by tests and diagnostics; `tol` controls the accuracy of
// the v_* estimate the extraction reads.
JointPolicy minimax_policies(const MarkovGame& game, double tol);

}  // namespace dsbr
