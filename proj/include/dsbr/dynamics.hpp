#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsbr/game.hpp"
#include "dsbr/records.hpp"
#include "dsbr/rng.hpp"
#include "dsbr/schedule.hpp"

namespace dsbr {

// Uniform lower bound on every policy entry produced by the dynamics:
//   ell_tau = 1 / (1 + (a_max - 1) exp(2 / ((1 - gamma) tau))).
// The matrix-game case is gamma = 0 (payoffs bounded by 1, exponent 2/tau).
double ell_tau(double tau, double gamma, int a_max);

// One player's learner: q estimates, the policy driven toward the smoothed
// best response to q, and (Markov case) the outer-loop value function.
struct LearnerState {
    int player = 1;  // 1 or 2
    Mat q;           // |S| x |A_i|
    Mat policy;      // |S| x |A_i|
    Vec v;           // |S|; size 0 for matrix-game learners

    static LearnerState initial(int player, int n_states, int n_actions, bool with_v);
};

// Everything a learner is allowed to see in one step: its own sampled action,
// its own realized payoff, and the publicly shared state transition. The
// update path takes exactly this record, so a player cannot read its
// opponent's policy, q-function, or action by construction.
struct PlayerObservation {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;
};

struct RunConfig {
    long K = 0;                   // inner-loop iterations
    long T = 1;                   // outer-loop iterations (Markov runs)
    double tau = 0.1;             // softmax temperature
    StepsizeSchedule schedule;
    std::uint64_t seed = 0;
    long checkpoint_every = 0;    // 0 = auto (about 50 checkpoints per run)
    bool strict_theory = false;
    int initial_state = 0;        // first state of the very first inner loop
    double oracle_tol = 1e-8;     // tolerance of checkpoint oracles
    std::optional<double> c4_hat; // smoothing-bias constant for Markov records

    void validate() const;
    long resolved_checkpoint(long total_steps) const;
};

// Per-player learner updates. advance_policy commits the damped move toward
// the smoothed best response; update_q folds in one observation, with the
// bootstrap gamma * v(S_{k+1}) when the learner carries a value function.
void advance_policy(LearnerState& learner, double beta_k, double tau);
void update_q(LearnerState& learner, const PlayerObservation& obs, double alpha_k, double gamma);

// Runtime invariants checked at every step of every trajectory: each policy
// entry >= ell_tau - 1e-12 and ||q||_inf, ||v||_inf <= 1/(1-gamma) + 1e-12.
void enforce_invariants(const LearnerState& learner, double ell, double gamma);

struct StepResult {
    std::array<int, 2> actions{};
    std::array<double, 2> rewards{};
};

// One synchronous step of the stateless dynamics: both players commit their
// policy updates, then both sample from the committed policies, then each
// updates its own q from its own realized payoff.
StepResult dsbr_step(const MatrixGame& game, LearnerState& s1, LearnerState& s2, long k,
                     const StepsizeSchedule& schedule, double tau, PlayerRngs& rngs);

struct MarkovStepResult {
    std::array<int, 2> actions{};
    std::array<double, 2> rewards{};
    int next_state = 0;
};

// One inner-loop step at the current state of the shared trajectory.
MarkovStepResult dsbr_vi_step(const MarkovGame& game, LearnerState& s1, LearnerState& s2,
                              int current_state, long k, const StepsizeSchedule& schedule,
                              double tau, PlayerRngs& rngs);

struct RunResult {
    JointPolicy final_policy;
    std::vector<DiagnosticsRecord> records;
};

// K steps of the stateless dynamics from q = 0 and uniform policies, with a
// diagnostics record (exact Nash gap included) every checkpoint_every steps.
RunResult run_dsbr(const MatrixGame& game, const RunConfig& config);

// T outer iterations, each running K inner steps; the inner q and policy are
// re-initialized to 0/uniform at the start of every outer iteration while the
// state trajectory continues across them (S_0 <- S_K). The outer update sets
// v_{t+1}(s) = pi_K(s)' q_K(s). Emits a warning (not an error) when the game
// is not ergodic under the uniform joint policy.
RunResult dsbr_vi_run(const MarkovGame& game, const RunConfig& config);

// Rationality runs: the learner (player 1) follows the standard dynamics
// while its opponent plays the frozen stationary policy. The nash_gap column
// of the records holds the learner's gap to the best response.
RunResult run_dsbr_vs_fixed(const MatrixGame& game, const Vec& opponent, const RunConfig& config);
RunResult dsbr_vi_run_vs_fixed(const MarkovGame& game, const Policy& opponent,
                               const RunConfig& config);

enum class ConditionStatus { satisfied, violated, symbolic };

struct ConditionCheck {
    std::string name;
    ConditionStatus status = ConditionStatus::symbolic;
    std::string detail;
};

struct ConditionReport {
    std::vector<ConditionCheck> checks;
    bool any_violated() const;
    std::string to_text() const;
};

// Evaluates every hypothesis of the convergence guarantees that is checkable
// from (schedule, tau, dimensions). Hypotheses involving constants the
// analysis leaves unspecified are reported as symbolic with the inequality
// printed. strict_theory runs refuse to start on any violated check.
ConditionReport check_conditions(const RunConfig& config, int a_max, int n_states, double gamma);

}  // namespace dsbr
