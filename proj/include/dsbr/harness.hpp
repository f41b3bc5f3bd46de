#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dsbr/dynamics.hpp"
#include "dsbr/game_io.hpp"

namespace dsbr {

struct GeneratorSpec {
    enum class Kind { random_matrix, random_markov, named };

    Kind kind = Kind::random_matrix;
    int rows = 2;           // matrix rows / player-1 actions
    int cols = 2;           // matrix cols / player-2 actions
    int n_states = 2;       // random-markov only
    double gamma = 0.9;     // random-markov only
    double eps_p = 0.2;     // transition smoothing weight in (0, 1]
    std::string named;      // matching-pennies | rock-paper-scissors | appendix-d
    double alpha_param = 0.9;  // appendix-d companion-policy parameter

    static GeneratorSpec named_game(const std::string& name, double alpha_param = 0.9);
};

// Deterministic in (spec, seed): rewards uniform in [-1, 1]; transition rows
// are normalized uniform draws mixed with the uniform distribution at weight
// eps_p, which makes the chain ergodic under any joint policy.
Game generate_game(const GeneratorSpec& spec, std::uint64_t seed);

// The two-state MDP whose action-1 kernel is the identity and whose action-2
// kernel swaps the states, wrapped as a player-1-relevant Markov game. The
// slow-mixing policy puts weight alpha on the stay action in both states.
MarkovGame appendix_d_game();
Policy appendix_d_policy(double alpha);

// Probability of being in state 0 after k steps of the appendix-d chain with
// parameter alpha, starting from state 0: 1/2 + (2 alpha - 1)^k / 2.
double appendix_d_occupancy(double alpha, long k);

// Analytic lower bound on the eta-mixing time of the appendix-d chain:
// log(1/(2 eta)) / log(1/(2 alpha - 1)) - 1.
double appendix_d_mixing_lower_bound(double alpha, double eta);

enum class ExperimentMode { dsbr, dsbr_vi, rationality };

struct ExperimentSpec {
    Game game = MatrixGame(Mat::Zero(1, 1));
    RunConfig config;
    int n_replications = 1;
    std::uint64_t base_seed = 0;  // replication r runs with seed base_seed + r
    std::string out_dir;          // empty: keep results in memory only
    ExperimentMode mode = ExperimentMode::dsbr;
    std::optional<Policy> frozen_opponent;  // rationality mode; random if absent
    std::optional<Vec> p_o;                 // uniform if absent

    void validate() const;
};

struct ReplicationOutcome {
    std::vector<DiagnosticsRecord> records;
    JointPolicy final_policy;
    double final_gap = 0.0;  // Nash gap, or gap to best response in rationality mode
};

struct ExperimentSummary {
    std::vector<ReplicationOutcome> replications;
    double mean_final_gap = 0.0;
    double stddev_final_gap = 0.0;
    std::vector<double> checkpoint_mean_gap;  // mean nash_gap per checkpoint index
    std::string summary_json;
};

// Runs the replications (concurrently when several), writes one CSV per
// replication plus summary.json under out_dir, and returns the gathered
// results ordered by replication index. Parallel and serial execution produce
// identical files.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

}  // namespace dsbr
