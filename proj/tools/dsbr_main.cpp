#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsbr/chain.hpp"
#include "dsbr/diagnostics.hpp"
#include "dsbr/dynamics.hpp"
#include "dsbr/errors.hpp"
#include "dsbr/game_io.hpp"
#include "dsbr/harness.hpp"
#include "dsbr/oracles.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string out;
    int replications = 1;
    long checkpoint_every = 0;
    double tau = 0.1;
    std::string schedule = "constant";
    double alpha = 0.1;
    double h = 1.0;
    double z = 0.5;
    double ratio = 0.5;
    long K = 1000;
    long T = 1;
    double tol = 1e-8;
    bool strict_theory = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->set_help_flag("--help", "print help");  // frees -h/--h for the stepsize offset
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--replications", o.replications, "number of replications");
    cmd->add_option("--checkpoint-every", o.checkpoint_every,
                    "steps between diagnostics records (0 = auto, about 50 per run)");
    cmd->add_option("--tau", o.tau, "softmax temperature");
    cmd->add_option("--schedule", o.schedule, "stepsize kind: constant|linear|poly");
    cmd->add_option("--alpha", o.alpha, "stepsize scale");
    cmd->add_option("--h", o.h, "stepsize offset (decaying kinds)");
    cmd->add_option("--z", o.z, "stepsize exponent (poly)");
    cmd->add_option("--ratio", o.ratio, "policy/q stepsize ratio c_{alpha,beta}");
    cmd->add_option("--K", o.K, "inner-loop iterations");
    cmd->add_option("--T", o.T, "outer-loop iterations (markov runs)");
    cmd->add_option("--tol", o.tol, "oracle tolerance");
    cmd->add_flag("--strict-theory", o.strict_theory,
                  "refuse to run when a checkable rate hypothesis is violated");
}

dsbr::RunConfig make_config(const CommonOpts& o) {
    dsbr::RunConfig cfg;
    cfg.K = o.K;
    cfg.T = o.T;
    cfg.tau = o.tau;
    cfg.schedule.kind = dsbr::schedule_kind_from_string(o.schedule);
    cfg.schedule.alpha = o.alpha;
    cfg.schedule.h = o.h;
    cfg.schedule.z = o.z;
    cfg.schedule.ratio = o.ratio;
    cfg.seed = o.seed;
    cfg.checkpoint_every = o.checkpoint_every;
    cfg.strict_theory = o.strict_theory;
    cfg.oracle_tol = o.tol;
    return cfg;
}

dsbr::Vec parse_p_o(const std::string& spec, int n_states) {
    if (spec.empty()) return dsbr::uniform_simplex(n_states);
    const json j = json::parse(spec);
    if (!j.is_array() || static_cast<int>(j.size()) != n_states) {
        throw dsbr::ValidationError("--p-o must be a JSON array of length n_states");
    }
    dsbr::Vec p(n_states);
    for (int i = 0; i < n_states; ++i) p(i) = j[i].get<double>();
    return p;
}

int cmd_gen_game(const std::string& kind, int rows, int cols, int n_states, double gamma,
                 double eps_p, const std::string& named, double alpha_param,
                 const CommonOpts& o) {
    dsbr::GeneratorSpec spec;
    if (kind == "random-matrix") {
        spec.kind = dsbr::GeneratorSpec::Kind::random_matrix;
    } else if (kind == "random-markov") {
        spec.kind = dsbr::GeneratorSpec::Kind::random_markov;
    } else if (kind == "named") {
        spec.kind = dsbr::GeneratorSpec::Kind::named;
    } else {
        throw dsbr::ValidationError("--kind must be random-matrix|random-markov|named");
    }
    spec.rows = rows;
    spec.cols = cols;
    spec.n_states = n_states;
    spec.gamma = gamma;
    spec.eps_p = eps_p;
    spec.named = named;
    spec.alpha_param = alpha_param;
    const dsbr::Game game = dsbr::generate_game(spec, o.seed);
    if (o.out.empty()) {
        std::cout << dsbr::game_to_json(game) << "\n";
    } else {
        dsbr::save_game(game, o.out);
    }
    return 0;
}

int cmd_simulate(const std::string& game_path, const CommonOpts& o, bool markov) {
    dsbr::ExperimentSpec spec;
    spec.game = dsbr::load_game(game_path);
    spec.config = make_config(o);
    spec.n_replications = o.replications;
    spec.base_seed = o.seed;
    spec.out_dir = o.out;
    spec.mode = markov ? dsbr::ExperimentMode::dsbr_vi : dsbr::ExperimentMode::dsbr;
    const dsbr::ExperimentSummary summary = dsbr::run_experiment(spec);
    std::cout << summary.summary_json << "\n";
    return 0;
}

int cmd_rationality(const std::string& game_path, const std::string& opponent_path,
                    const CommonOpts& o) {
    dsbr::ExperimentSpec spec;
    spec.game = dsbr::load_game(game_path);
    spec.config = make_config(o);
    spec.n_replications = o.replications;
    spec.base_seed = o.seed;
    spec.out_dir = o.out;
    spec.mode = dsbr::ExperimentMode::rationality;
    if (!opponent_path.empty()) spec.frozen_opponent = dsbr::load_policy(opponent_path);
    const dsbr::ExperimentSummary summary = dsbr::run_experiment(spec);
    std::cout << summary.summary_json << "\n";
    return 0;
}

int cmd_nash_gap(const std::string& game_path, const std::string& policy_path,
                 const std::string& p_o_spec, const CommonOpts& o) {
    const dsbr::Game game = dsbr::load_game(game_path);
    const dsbr::JointPolicy joint = dsbr::load_joint_policy(policy_path);
    json out;
    if (const auto* mg = std::get_if<dsbr::MatrixGame>(&game)) {
        out["nash_gap"] = dsbr::matrix_nash_gap(*mg, joint.p1.probs.row(0).transpose(),
                                                joint.p2.probs.row(0).transpose());
    } else {
        const auto& g = std::get<dsbr::MarkovGame>(game);
        const dsbr::Vec p_o = parse_p_o(p_o_spec, g.n_states());
        out["nash_gap"] = dsbr::markov_nash_gap(g, joint.p1, joint.p2, p_o, o.tol);
        out["p_o"] = std::vector<double>(p_o.data(), p_o.data() + p_o.size());
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_value_iterate(const std::string& game_path, int player, const CommonOpts& o) {
    const dsbr::Game game = dsbr::load_game(game_path);
    json out;
    if (const auto* mg = std::get_if<dsbr::MatrixGame>(&game)) {
        const auto sol = dsbr::matrix_game_value(mg->payoff());
        out["value"] = player == 1 ? sol.value : -sol.value;
        out["maximin_policy"] =
            std::vector<double>(sol.row_policy.data(), sol.row_policy.data() + sol.row_policy.size());
        out["minimax_policy"] =
            std::vector<double>(sol.col_policy.data(), sol.col_policy.data() + sol.col_policy.size());
    } else {
        const auto& g = std::get<dsbr::MarkovGame>(game);
        const auto res = dsbr::minimax_value_iteration(g, player, o.tol);
        out["v_star"] = std::vector<double>(res.v_star.data(), res.v_star.data() + res.v_star.size());
        out["iterations"] = res.iterations;
        out["residual"] = res.residual;
    }
    out["player"] = player;
    std::cout << out.dump(2) << "\n";
    return 0;
}

bool matches_appendix_d_template(const dsbr::MarkovGame& g, const dsbr::JointPolicy& joint,
                                 double* alpha_out) {
    if (g.n_states() != 2 || g.n_actions(1) != 2 || g.n_actions(2) != 1) return false;
    const dsbr::MarkovGame ref = dsbr::appendix_d_game();
    for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 2; ++a) {
            for (int s2 = 0; s2 < 2; ++s2) {
                if (g.prob(s, a, 0, s2) != ref.prob(s, a, 0, s2)) return false;
            }
        }
    }
    const double alpha = joint.p1.probs(0, 0);
    if (joint.p1.probs(1, 0) != alpha || !(alpha > 0.5 && alpha < 1.0)) return false;
    *alpha_out = alpha;
    return true;
}

int cmd_mixing_time(const std::string& game_path, const std::string& policy_path, double eta,
                    long cap) {
    const dsbr::Game game = dsbr::load_game(game_path);
    const dsbr::JointPolicy joint = dsbr::load_joint_policy(policy_path);
    if (!std::holds_alternative<dsbr::MarkovGame>(game)) {
        throw dsbr::ValidationError("mixing-time needs a markov game");
    }
    const auto& g = std::get<dsbr::MarkovGame>(game);
    const dsbr::InducedChain chain = dsbr::induce_chain(g, joint.p1, joint.p2);
    const dsbr::Vec mu = dsbr::stationary_distribution(chain);
    const long t_mix = dsbr::mixing_time(chain, eta, cap);
    json out;
    out["eta"] = eta;
    out["mixing_time"] = t_mix;
    out["stationary_distribution"] = std::vector<double>(mu.data(), mu.data() + mu.size());
    double alpha = 0.0;
    if (matches_appendix_d_template(g, joint, &alpha)) {
        out["analytic"] = {
            {"alpha", alpha},
            {"occupancy_formula", "x_k = 1/2 + (2*alpha-1)^k / 2 from state 0"},
            {"mixing_time_lower_bound", dsbr::appendix_d_mixing_lower_bound(alpha, eta)},
        };
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_check_conditions(const std::string& game_path, int a_max, int n_states, double gamma,
                         const CommonOpts& o) {
    if (!game_path.empty()) {
        const dsbr::Game game = dsbr::load_game(game_path);
        a_max = dsbr::a_max_of(game);
        gamma = dsbr::gamma_of(game);
        n_states = std::holds_alternative<dsbr::MarkovGame>(game)
                       ? std::get<dsbr::MarkovGame>(game).n_states()
                       : 1;
    }
    const dsbr::RunConfig cfg = make_config(o);
    const dsbr::ConditionReport report = dsbr::check_conditions(cfg, a_max, n_states, gamma);
    std::cout << report.to_text();
    return report.any_violated() && o.strict_theory ? kExitValidation : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Payoff-based independent learning in zero-sum matrix and Markov games"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string game_path, policy_path, opponent_path, p_o_spec;
    std::string gen_kind = "random-matrix", named;
    int rows = 2, cols = 2, n_states = 2, player = 1, a_max = 2;
    double gamma = 0.9, eps_p = 0.2, alpha_param = 0.9, eta = 0.05;
    long cap = 1000000;

    auto* gen = app.add_subcommand("gen-game", "generate a game JSON file");
    gen->add_option("--kind", gen_kind, "random-matrix|random-markov|named");
    gen->add_option("--rows", rows, "player-1 action count");
    gen->add_option("--cols", cols, "player-2 action count");
    gen->add_option("--states", n_states, "state count (random-markov)");
    gen->add_option("--gamma", gamma, "discount factor (random-markov)");
    gen->add_option("--eps-p", eps_p, "transition smoothing weight in (0,1]");
    gen->add_option("--named", named, "matching-pennies|rock-paper-scissors|appendix-d");
    gen->add_option("--alpha-param", alpha_param, "appendix-d policy parameter");
    add_common_flags(gen, o);

    auto* sim_m = app.add_subcommand("simulate-matrix", "run the stateless dynamics");
    sim_m->add_option("--game", game_path, "game JSON path")->required();
    add_common_flags(sim_m, o);

    auto* sim_k = app.add_subcommand("simulate-markov", "run the value-iteration dynamics");
    sim_k->add_option("--game", game_path, "game JSON path")->required();
    add_common_flags(sim_k, o);

    auto* rat = app.add_subcommand("rationality", "learner vs a frozen stationary opponent");
    rat->add_option("--game", game_path, "game JSON path")->required();
    rat->add_option("--opponent", opponent_path, "frozen opponent policy JSON (random if absent)");
    add_common_flags(rat, o);

    auto* gap = app.add_subcommand("nash-gap", "exact Nash gap of a joint policy");
    gap->add_option("--game", game_path, "game JSON path")->required();
    gap->add_option("--policy", policy_path, "joint policy JSON path")->required();
    gap->add_option("--p-o", p_o_spec, "initial state distribution as JSON array (default uniform)");
    add_common_flags(gap, o);

    auto* vi = app.add_subcommand("value-iterate", "minimax value iteration to the fixed point");
    vi->add_option("--game", game_path, "game JSON path")->required();
    vi->add_option("--player", player, "player 1 or 2");
    add_common_flags(vi, o);

    auto* mix = app.add_subcommand("mixing-time", "mixing time of the policy-induced chain");
    mix->set_help_flag("--help", "print help");
    mix->add_option("--game", game_path, "game JSON path")->required();
    mix->add_option("--policy", policy_path, "joint policy JSON path")->required();
    mix->add_option("--eta", eta, "total-variation accuracy in (0,1)");
    mix->add_option("--cap", cap, "step cap before giving up");

    auto* chk = app.add_subcommand("check-conditions", "evaluate the rate hypotheses");
    chk->add_option("--game", game_path, "game JSON path (dims read from it)");
    chk->add_option("--a-max", a_max, "largest action count (when no game file)");
    chk->add_option("--states", n_states, "state count (when no game file)");
    chk->add_option("--gamma", gamma, "discount factor (when no game file)");
    add_common_flags(chk, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen_game(gen_kind, rows, cols, n_states, gamma, eps_p, named, alpha_param,
                                o);
        }
        if (sim_m->parsed()) return cmd_simulate(game_path, o, false);
        if (sim_k->parsed()) return cmd_simulate(game_path, o, true);
        if (rat->parsed()) return cmd_rationality(game_path, opponent_path, o);
        if (gap->parsed()) return cmd_nash_gap(game_path, policy_path, p_o_spec, o);
        if (vi->parsed()) return cmd_value_iterate(game_path, player, o);
        if (mix->parsed()) return cmd_mixing_time(game_path, policy_path, eta, cap);
        if (chk->parsed()) return cmd_check_conditions(game_path, a_max, n_states, gamma, o);
    } catch (const dsbr::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const dsbr::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
