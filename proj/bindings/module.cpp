#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dsbr/chain.hpp"
#include "dsbr/diagnostics.hpp"
#include "dsbr/dynamics.hpp"
#include "dsbr/errors.hpp"
#include "dsbr/game_io.hpp"
#include "dsbr/harness.hpp"
#include "dsbr/oracles.hpp"

namespace py = pybind11;
using namespace dsbr;

namespace {

StepsizeSchedule make_schedule(const std::string& kind, double alpha, double h, double z,
                               double ratio) {
    StepsizeSchedule s;
    s.kind = schedule_kind_from_string(kind);
    s.alpha = alpha;
    s.h = h;
    s.z = z;
    s.ratio = ratio;
    s.validate();
    return s;
}

py::dict record_to_dict(const DiagnosticsRecord& r) {
    py::dict d;
    d["outer_t"] = r.outer_t;
    d["inner_k"] = r.inner_k;
    d["nash_gap"] = r.nash_gap;
    d["l_v"] = r.l_v;
    d["l_sum"] = r.l_sum;
    d["l_pi"] = r.l_pi;
    d["l_q"] = r.l_q;
    d["smoothing_bias"] = r.smoothing_bias;
    return d;
}

py::dict run_result_to_dict(const RunResult& res) {
    py::dict d;
    d["pi1"] = res.final_policy.p1.probs;
    d["pi2"] = res.final_policy.p2.probs;
    py::list records;
    for (const auto& r : res.records) records.append(record_to_dict(r));
    d["records"] = records;
    return d;
}

}  // namespace

PYBIND11_MODULE(_dsbr, m) {
    m.doc() = "Doubly smoothed best-response dynamics for zero-sum matrix and Markov games";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<MatrixGame>(m, "MatrixGame")
        .def(py::init<Mat>(), py::arg("payoff"))
        .def_property_readonly("payoff", &MatrixGame::payoff)
        .def("n_actions", &MatrixGame::n_actions, py::arg("player"))
        .def_property_readonly("a_max", &MatrixGame::a_max);

    py::class_<MarkovGame>(m, "MarkovGame")
        .def(py::init<int, int, int, double, std::vector<double>, std::vector<double>>(),
             py::arg("n_states"), py::arg("n_actions1"), py::arg("n_actions2"), py::arg("gamma"),
             py::arg("transition"), py::arg("reward"))
        .def_property_readonly("n_states", &MarkovGame::n_states)
        .def("n_actions", &MarkovGame::n_actions, py::arg("player"))
        .def_property_readonly("gamma", &MarkovGame::gamma)
        .def_property_readonly("a_max", &MarkovGame::a_max)
        .def("prob", &MarkovGame::prob)
        .def("reward1", &MarkovGame::reward1);

    py::class_<Policy>(m, "Policy")
        .def(py::init([](Mat probs) {
                 Policy p{std::move(probs)};
                 p.validate();
                 return p;
             }),
             py::arg("probs"))
        .def_readonly("probs", &Policy::probs)
        .def_static("uniform", &Policy::uniform, py::arg("n_states"), py::arg("n_actions"));

    m.def("softmax", &softmax, py::arg("q"), py::arg("tau"));
    m.def("entropy", &entropy, py::arg("mu"));
    m.def("marginal_payoff", &marginal_payoff, py::arg("game"), py::arg("opponent_policy"),
          py::arg("player"));
    m.def("apply_T", &apply_T, py::arg("game"), py::arg("v"), py::arg("player"));
    m.def("ell_tau", &ell_tau, py::arg("tau"), py::arg("gamma"), py::arg("a_max"));

    m.def(
        "matrix_game_value",
        [](const Mat& x) {
            const auto sol = matrix_game_value(x);
            return py::make_tuple(sol.value, sol.row_policy, sol.col_policy);
        },
        py::arg("payoff"), "Returns (value, maximin_policy, minimax_policy)");
    m.def("matrix_nash_gap", &matrix_nash_gap, py::arg("game"), py::arg("pi1"), py::arg("pi2"));
    m.def(
        "minimax_value_iteration",
        [](const MarkovGame& g, int player, double tol) {
            const auto res = minimax_value_iteration(g, player, tol);
            py::dict d;
            d["v_star"] = res.v_star;
            d["iterations"] = res.iterations;
            d["residual"] = res.residual;
            return d;
        },
        py::arg("game"), py::arg("player"), py::arg("tol") = 1e-8);
    m.def("best_response_value", &best_response_value, py::arg("game"), py::arg("player"),
          py::arg("opponent_policy"), py::arg("tol") = 1e-8);
    m.def("policy_value", &policy_value, py::arg("game"), py::arg("pi1"), py::arg("pi2"),
          py::arg("player"));
    m.def("markov_nash_gap", &markov_nash_gap, py::arg("game"), py::arg("pi1"), py::arg("pi2"),
          py::arg("p_o"), py::arg("tol") = 1e-8);
    m.def("q_target", &q_target, py::arg("game"), py::arg("v"), py::arg("opponent_policy"),
          py::arg("player"));

    m.def(
        "induce_chain",
        [](const MarkovGame& g, const Policy& p1, const Policy& p2) {
            return induce_chain(g, p1, p2).transition;
        },
        py::arg("game"), py::arg("pi1"), py::arg("pi2"));
    m.def(
        "stationary_distribution",
        [](const Mat& transition) { return stationary_distribution(InducedChain{transition}); },
        py::arg("transition"));
    m.def(
        "mixing_time",
        [](const Mat& transition, double eta, long cap) {
            return mixing_time(InducedChain{transition}, eta, cap);
        },
        py::arg("transition"), py::arg("eta"), py::arg("cap") = 1000000);
    m.def("tv_distance", &tv_distance, py::arg("p"), py::arg("q"));
    m.def("uniform_mixing_bound", &uniform_mixing_bound, py::arg("t_pib_eta"), py::arg("delta1"),
          py::arg("delta2"), py::arg("mu_b_min"), py::arg("r_b"));
    m.def("rho_delta", &rho_delta, py::arg("rho_b"), py::arg("delta1"), py::arg("delta2"),
          py::arg("r_b"), py::arg("mu_b_min"));

    m.def("lyapunov_V", &lyapunov_V, py::arg("X1"), py::arg("X2"), py::arg("mu1"), py::arg("mu2"),
          py::arg("tau"));

    m.def(
        "run_dsbr",
        [](const MatrixGame& game, long K, double tau, const std::string& schedule, double alpha,
           double h, double z, double ratio, std::uint64_t seed, long checkpoint_every) {
            RunConfig cfg;
            cfg.K = K;
            cfg.tau = tau;
            cfg.schedule = make_schedule(schedule, alpha, h, z, ratio);
            cfg.seed = seed;
            cfg.checkpoint_every = checkpoint_every;
            return run_result_to_dict(run_dsbr(game, cfg));
        },
        py::arg("game"), py::arg("K"), py::arg("tau") = 0.1, py::arg("schedule") = "constant",
        py::arg("alpha") = 0.1, py::arg("h") = 1.0, py::arg("z") = 0.5, py::arg("ratio") = 0.5,
        py::arg("seed") = 0, py::arg("checkpoint_every") = 0);

    m.def(
        "dsbr_vi_run",
        [](const MarkovGame& game, long K, long T, double tau, const std::string& schedule,
           double alpha, double h, double z, double ratio, std::uint64_t seed,
           long checkpoint_every) {
            RunConfig cfg;
            cfg.K = K;
            cfg.T = T;
            cfg.tau = tau;
            cfg.schedule = make_schedule(schedule, alpha, h, z, ratio);
            cfg.seed = seed;
            cfg.checkpoint_every = checkpoint_every;
            return run_result_to_dict(dsbr_vi_run(game, cfg));
        },
        py::arg("game"), py::arg("K"), py::arg("T"), py::arg("tau") = 0.1,
        py::arg("schedule") = "constant", py::arg("alpha") = 0.1, py::arg("h") = 1.0,
        py::arg("z") = 0.5, py::arg("ratio") = 0.5, py::arg("seed") = 0,
        py::arg("checkpoint_every") = 0);

    m.def(
        "generate_game",
        [](const std::string& kind, int rows, int cols, int n_states, double gamma, double eps_p,
           const std::string& named, std::uint64_t seed) -> py::object {
            GeneratorSpec spec;
            if (kind == "random-matrix") {
                spec.kind = GeneratorSpec::Kind::random_matrix;
            } else if (kind == "random-markov") {
                spec.kind = GeneratorSpec::Kind::random_markov;
            } else if (kind == "named") {
                spec.kind = GeneratorSpec::Kind::named;
            } else {
                throw ValidationError("kind must be random-matrix|random-markov|named");
            }
            spec.rows = rows;
            spec.cols = cols;
            spec.n_states = n_states;
            spec.gamma = gamma;
            spec.eps_p = eps_p;
            spec.named = named;
            Game g = generate_game(spec, seed);
            if (auto* mg = std::get_if<MatrixGame>(&g)) return py::cast(*mg);
            return py::cast(std::get<MarkovGame>(g));
        },
        py::arg("kind"), py::arg("rows") = 2, py::arg("cols") = 2, py::arg("n_states") = 2,
        py::arg("gamma") = 0.9, py::arg("eps_p") = 0.2, py::arg("named") = "", py::arg("seed") = 0);

    m.def("appendix_d_game", &appendix_d_game);
    m.def("appendix_d_policy", &appendix_d_policy, py::arg("alpha"));
    m.def("appendix_d_occupancy", &appendix_d_occupancy, py::arg("alpha"), py::arg("k"));
    m.def("appendix_d_mixing_lower_bound", &appendix_d_mixing_lower_bound, py::arg("alpha"),
          py::arg("eta"));

    m.def(
        "parse_game_json",
        [](const std::string& text) -> py::object {
            Game g = parse_game_json(text);
            if (auto* mg = std::get_if<MatrixGame>(&g)) return py::cast(*mg);
            return py::cast(std::get<MarkovGame>(g));
        },
        py::arg("text"));
    m.def(
        "game_to_json",
        [](py::object game) {
            if (py::isinstance<MatrixGame>(game)) {
                return game_to_json(Game(game.cast<MatrixGame>()));
            }
            return game_to_json(Game(game.cast<MarkovGame>()));
        },
        py::arg("game"));
}
