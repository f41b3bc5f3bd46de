#include "dsbr/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

#include "dsbr/errors.hpp"
#include "dsbr/oracles.hpp"

namespace dsbr {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGameGenStream = 100;
constexpr std::uint64_t kOpponentStream = 101;

Vec random_simplex(Rng& rng, int n) {
    // Normalized exponentials, i.e. a flat-Dirichlet draw.
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform01();
        while (u <= 0.0) u = rng.uniform01();
        v(i) = -std::log(u);
    }
    v /= v.sum();
    return v;
}

MatrixGame random_matrix_game(Rng& rng, int rows, int cols) {
    Mat payoff(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) payoff(i, j) = rng.uniform(-1.0, 1.0);
    }
    return MatrixGame(payoff);
}

MarkovGame random_markov_game(Rng& rng, int n_states, int a1, int a2, double gamma,
                              double eps_p) {
    if (!(eps_p > 0.0 && eps_p <= 1.0)) {
        throw ValidationError("generate_game: eps_p must lie in (0, 1]");
    }
    std::vector<double> transition;
    std::vector<double> reward;
    transition.reserve(static_cast<std::size_t>(n_states) * a1 * a2 * n_states);
    reward.reserve(static_cast<std::size_t>(n_states) * a1 * a2);
    const double u = 1.0 / n_states;
    for (int s = 0; s < n_states; ++s) {
        for (int i = 0; i < a1; ++i) {
            for (int j = 0; j < a2; ++j) {
                reward.push_back(rng.uniform(-1.0, 1.0));
                Vec row = random_simplex(rng, n_states);
                for (int s2 = 0; s2 < n_states; ++s2) {
                    transition.push_back((1.0 - eps_p) * row(s2) + eps_p * u);
                }
            }
        }
    }
    return MarkovGame(n_states, a1, a2, gamma, std::move(transition), std::move(reward));
}

}  // namespace

GeneratorSpec GeneratorSpec::named_game(const std::string& name, double alpha_param) {
    GeneratorSpec spec;
    spec.kind = Kind::named;
    spec.named = name;
    spec.alpha_param = alpha_param;
    return spec;
}

Game generate_game(const GeneratorSpec& spec, std::uint64_t seed) {
    Rng rng(seed, kGameGenStream);
    switch (spec.kind) {
        case GeneratorSpec::Kind::random_matrix:
            if (spec.rows < 1 || spec.cols < 1) {
                throw ValidationError("generate_game: matrix dims must be positive");
            }
            return random_matrix_game(rng, spec.rows, spec.cols);
        case GeneratorSpec::Kind::random_markov:
            if (spec.n_states < 1 || spec.rows < 1 || spec.cols < 1) {
                throw ValidationError("generate_game: markov dims must be positive");
            }
            return random_markov_game(rng, spec.n_states, spec.rows, spec.cols, spec.gamma,
                                      spec.eps_p);
        case GeneratorSpec::Kind::named:
            if (spec.named == "matching-pennies") {
                Mat payoff(2, 2);
                payoff << 1, -1, -1, 1;
                return MatrixGame(payoff);
            }
            if (spec.named == "rock-paper-scissors") {
                Mat payoff(3, 3);
                payoff << 0, -1, 1, 1, 0, -1, -1, 1, 0;
                return MatrixGame(payoff);
            }
            if (spec.named == "appendix-d") return appendix_d_game();
            throw ValidationError("generate_game: unknown named game \"" + spec.named + "\"");
    }
    throw ValidationError("generate_game: unknown generator kind");
}

MarkovGame appendix_d_game() {
    // Two states, player 1 has {stay, swap}, player 2 is a bystander with a
    // single action. Zero rewards: the object of interest is the chain.
    const int n = 2, a1 = 2, a2 = 1;
    std::vector<double> transition(static_cast<std::size_t>(n) * a1 * a2 * n, 0.0);
    std::vector<double> reward(static_cast<std::size_t>(n) * a1 * a2, 0.0);
    auto at = [&](int s, int a, int s2) -> double& {
        // [s][a1][a2][s'] with the single opponent action at index 0
        return transition[((static_cast<std::size_t>(s) * a1 + a) * a2 + 0) * n +
                          static_cast<std::size_t>(s2)];
    };
    at(0, 0, 0) = 1.0;  // stay: identity kernel
    at(1, 0, 1) = 1.0;
    at(0, 1, 1) = 1.0;  // swap: antidiagonal kernel
    at(1, 1, 0) = 1.0;
    return MarkovGame(n, a1, a2, 0.9, std::move(transition), std::move(reward));
}

Policy appendix_d_policy(double alpha) {
    if (!(alpha > 0.5 && alpha < 1.0)) {
        throw ValidationError("appendix_d_policy: alpha must lie in (1/2, 1)");
    }
    Policy p;
    p.probs = Mat(2, 2);
    p.probs << alpha, 1.0 - alpha, alpha, 1.0 - alpha;
    return p;
}

double appendix_d_occupancy(double alpha, long k) {
    if (!(alpha > 0.5 && alpha < 1.0)) {
        throw ValidationError("appendix_d_occupancy: alpha must lie in (1/2, 1)");
    }
    if (k < 0) throw ValidationError("appendix_d_occupancy: k must be nonnegative");
    return 0.5 + 0.5 * std::pow(2.0 * alpha - 1.0, static_cast<double>(k));
}

double appendix_d_mixing_lower_bound(double alpha, double eta) {
    if (!(alpha > 0.5 && alpha < 1.0) || !(eta > 0.0 && eta < 0.5)) {
        throw ValidationError("appendix_d_mixing_lower_bound: need alpha in (1/2,1), eta in (0,1/2)");
    }
    return std::log(1.0 / (2.0 * eta)) / std::log(1.0 / (2.0 * alpha - 1.0)) - 1.0;
}

void ExperimentSpec::validate() const {
    if (n_replications < 1) throw ValidationError("ExperimentSpec: n_replications must be >= 1");
    config.validate();
    if (mode == ExperimentMode::dsbr_vi && !std::holds_alternative<MarkovGame>(game)) {
        throw ValidationError("ExperimentSpec: dsbr-vi mode needs a markov game");
    }
    if (mode == ExperimentMode::dsbr && !std::holds_alternative<MatrixGame>(game)) {
        throw ValidationError("ExperimentSpec: dsbr mode needs a matrix game");
    }
    if (p_o.has_value() && std::holds_alternative<MarkovGame>(game) &&
        p_o->size() != std::get<MarkovGame>(game).n_states()) {
        throw ValidationError("ExperimentSpec: p_o has wrong length");
    }
}

namespace {

ReplicationOutcome run_one(const ExperimentSpec& spec, int replication) {
    RunConfig cfg = spec.config;
    cfg.seed = spec.base_seed + static_cast<std::uint64_t>(replication);

    ReplicationOutcome outcome;
    switch (spec.mode) {
        case ExperimentMode::dsbr: {
            const auto& game = std::get<MatrixGame>(spec.game);
            RunResult res = run_dsbr(game, cfg);
            outcome.final_gap = matrix_nash_gap(game, res.final_policy.p1.probs.row(0).transpose(),
                                                res.final_policy.p2.probs.row(0).transpose());
            outcome.records = std::move(res.records);
            outcome.final_policy = std::move(res.final_policy);
            return outcome;
        }
        case ExperimentMode::dsbr_vi: {
            const auto& game = std::get<MarkovGame>(spec.game);
            RunResult res = dsbr_vi_run(game, cfg);
            const Vec p_o = spec.p_o.value_or(uniform_simplex(game.n_states()));
            outcome.final_gap = markov_nash_gap(game, res.final_policy.p1, res.final_policy.p2,
                                                p_o, cfg.oracle_tol);
            outcome.records = std::move(res.records);
            outcome.final_policy = std::move(res.final_policy);
            return outcome;
        }
        case ExperimentMode::rationality: {
            if (const auto* mg = std::get_if<MatrixGame>(&spec.game)) {
                Vec opp;
                if (spec.frozen_opponent.has_value()) {
                    opp = spec.frozen_opponent->probs.row(0).transpose();
                } else {
                    Rng rng(cfg.seed, kOpponentStream);
                    opp = random_simplex(rng, mg->n_actions(2));
                }
                RunResult res = run_dsbr_vs_fixed(*mg, opp, cfg);
                const Vec marginal = marginal_payoff(*mg, opp, 1);
                outcome.final_gap =
                    marginal.maxCoeff() - (res.final_policy.p1.probs.row(0) * marginal)(0);
                outcome.records = std::move(res.records);
                outcome.final_policy = std::move(res.final_policy);
                return outcome;
            }
            const auto& game = std::get<MarkovGame>(spec.game);
            Policy opp;
            if (spec.frozen_opponent.has_value()) {
                opp = *spec.frozen_opponent;
            } else {
                Rng rng(cfg.seed, kOpponentStream);
                opp.probs = Mat(game.n_states(), game.n_actions(2));
                for (int s = 0; s < game.n_states(); ++s) {
                    opp.probs.row(s) = random_simplex(rng, game.n_actions(2)).transpose();
                }
            }
            RunResult res = dsbr_vi_run_vs_fixed(game, opp, cfg);
            const Vec p_o = spec.p_o.value_or(uniform_simplex(game.n_states()));
            const Vec brv = best_response_value(game, 1, opp, cfg.oracle_tol);
            outcome.final_gap =
                p_o.dot(brv - policy_value(game, res.final_policy.p1, opp, 1));
            outcome.records = std::move(res.records);
            outcome.final_policy = std::move(res.final_policy);
            return outcome;
        }
    }
    throw ValidationError("run_experiment: unknown mode");
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const int n = spec.n_replications;

    // Fan out one isolated engine per replication; results are gathered by
    // index, so parallel and serial execution write identical files.
    ExperimentSummary summary;
    summary.replications.resize(n);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int batch = static_cast<int>(std::min<unsigned>(hw, 8));
    for (int start = 0; start < n; start += batch) {
        const int end = std::min(n, start + batch);
        std::vector<std::future<ReplicationOutcome>> futures;
        futures.reserve(end - start);
        for (int r = start; r < end; ++r) {
            futures.push_back(
                std::async(std::launch::async, [&spec, r] { return run_one(spec, r); }));
        }
        for (int r = start; r < end; ++r) summary.replications[r] = futures[r - start].get();
    }

    double mean = 0.0;
    for (const auto& rep : summary.replications) mean += rep.final_gap;
    mean /= n;
    double var = 0.0;
    for (const auto& rep : summary.replications) {
        var += (rep.final_gap - mean) * (rep.final_gap - mean);
    }
    summary.mean_final_gap = mean;
    summary.stddev_final_gap = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;

    std::size_t n_checkpoints = 0;
    for (const auto& rep : summary.replications) {
        n_checkpoints = std::max(n_checkpoints, rep.records.size());
    }
    summary.checkpoint_mean_gap.assign(n_checkpoints, 0.0);
    for (std::size_t c = 0; c < n_checkpoints; ++c) {
        double acc = 0.0;
        int count = 0;
        for (const auto& rep : summary.replications) {
            if (c < rep.records.size()) {
                acc += rep.records[c].nash_gap;
                ++count;
            }
        }
        summary.checkpoint_mean_gap[c] = count > 0 ? acc / count : 0.0;
    }

    json j;
    j["mode"] = spec.mode == ExperimentMode::dsbr      ? "dsbr"
                : spec.mode == ExperimentMode::dsbr_vi ? "dsbr-vi"
                                                       : "rationality";
    j["n_replications"] = n;
    j["base_seed"] = spec.base_seed;
    j["final_gap"] = {{"mean", summary.mean_final_gap},
                      {"stddev", summary.stddev_final_gap}};
    j["per_replication_final_gap"] = json::array();
    for (const auto& rep : summary.replications) {
        j["per_replication_final_gap"].push_back(rep.final_gap);
    }
    j["checkpoint_mean_gap"] = summary.checkpoint_mean_gap;
    summary.summary_json = j.dump(2);

    if (!spec.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(spec.out_dir);
        for (int r = 0; r < n; ++r) {
            char name[32];
            std::snprintf(name, sizeof(name), "rep_%03d.csv", r);
            std::ofstream csv(fs::path(spec.out_dir) / name);
            if (!csv) throw ValidationError("run_experiment: cannot write CSV in " + spec.out_dir);
            csv << to_csv(summary.replications[r].records);
        }
        std::ofstream sj(fs::path(spec.out_dir) / "summary.json");
        if (!sj) throw ValidationError("run_experiment: cannot write summary.json");
        sj << summary.summary_json << "\n";
    }
    return summary;
}

}  // namespace dsbr
