#include <doctest.h>

#include <cmath>

#include "dsbr/errors.hpp"
#include "dsbr/harness.hpp"
#include "dsbr/oracles.hpp"
#include "dsbr/rng.hpp"
#include "test_oracles_support.hpp"

using namespace dsbr;

namespace {

MatrixGame matching_pennies() {
    Mat p(2, 2);
    p << 1, -1, -1, 1;
    return MatrixGame(p);
}

Vec simplex_point(Rng& rng, int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = -std::log(rng.uniform01() + 1e-300);
    v /= v.sum();
    return v;
}

Policy random_policy(Rng& rng, int n_states, int n_actions) {
    Policy p;
    p.probs = Mat(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) p.probs.row(s) = simplex_point(rng, n_actions).transpose();
    return p;
}

MarkovGame random_game(std::uint64_t seed, int n_states, int a1, int a2, double gamma,
                       double eps_p = 0.25) {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::random_markov;
    spec.rows = a1;
    spec.cols = a2;
    spec.n_states = n_states;
    spec.gamma = gamma;
    spec.eps_p = eps_p;
    return std::get<MarkovGame>(generate_game(spec, seed));
}

}  // namespace

TEST_SUITE_BEGIN("oracles");

TEST_CASE("matrix_nash_gap worked values") {
    const MatrixGame mp = matching_pennies();
    Vec half(2), pure(2);
    half << 0.5, 0.5;
    pure << 1, 0;
    CHECK(matrix_nash_gap(mp, half, half) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(matrix_nash_gap(mp, pure, pure) == doctest::Approx(2.0).epsilon(1e-15));

    Mat rps(3, 3);
    rps << 0, -1, 1, 1, 0, -1, -1, 1, 0;
    const MatrixGame g(rps);
    const Vec third = Vec::Constant(3, 1.0 / 3);
    CHECK(matrix_nash_gap(g, third, third) == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(matrix_nash_gap(mp, half, third), ValidationError);
}

TEST_CASE("matrix_game_value solves canonical games") {
    const auto mp = matrix_game_value(matching_pennies().payoff());
    CHECK(mp.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mp.row_policy(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(mp.col_policy(0) == doctest::Approx(0.5).epsilon(1e-9));

    Mat degenerate(1, 1);
    degenerate << -0.37;
    const auto one = matrix_game_value(degenerate);
    CHECK(one.value == doctest::Approx(-0.37).epsilon(1e-12));
    CHECK(one.row_policy(0) == doctest::Approx(1.0));
    CHECK(one.col_policy(0) == doctest::Approx(1.0));
}

TEST_CASE("LP matches the 2x2 closed form on the full {-1,0,1} family") {
    // all 81 sign games
    int count = 0;
    for (int mask = 0; mask < 81; ++mask) {
        int v = mask;
        Eigen::Matrix2d x;
        for (int i = 0; i < 4; ++i) {
            x(i / 2, i % 2) = static_cast<double>(v % 3 - 1);
            v /= 3;
        }
        const double expect = dsbr::testing::value_2x2_closed_form(x);
        const double got = matrix_game_value(x).value;
        CHECK(got == doctest::Approx(expect).epsilon(1e-9));
        ++count;
    }
    CHECK(count == 81);
}

TEST_CASE("LP matches support enumeration up to 4x4") {
    Rng rng(100, 0);
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 2 + static_cast<int>(rng.uniform01() * 3);
        const int n = 2 + static_cast<int>(rng.uniform01() * 3);
        Mat x(m, n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) x(i, j) = rng.uniform(-1, 1);
        }
        const auto enumerated = dsbr::testing::value_support_enumeration(x);
        REQUIRE(enumerated.has_value());
        CHECK(matrix_game_value(x).value == doctest::Approx(*enumerated).epsilon(1e-7));
    }
}

TEST_CASE("minimax duality, monotonicity, shift on random matrices") {
    Rng rng(200, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng.uniform01() * 5);
        const int n = 2 + static_cast<int>(rng.uniform01() * 5);
        Mat x(m, n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) x(i, j) = rng.uniform(-1, 1);
        }
        const auto sol = matrix_game_value(x);
        // the returned strategies certify the value from both sides
        const double guaranteed_row = (x.transpose() * sol.row_policy).minCoeff();
        const double guaranteed_col = (x * sol.col_policy).maxCoeff();
        CHECK(guaranteed_row <= sol.value + 1e-9);
        CHECK(guaranteed_col >= sol.value - 1e-9);
        CHECK(guaranteed_col - guaranteed_row <= 1e-9);  // duality gap

        // shift: val(X + c) = val(X) + c
        const double c = rng.uniform(-2, 2);
        CHECK(matrix_game_value(x.array() + c).value == doctest::Approx(sol.value + c).epsilon(1e-9));

        // monotonicity: raising entries cannot lower the value
        Mat y = x;
        y(static_cast<int>(rng.uniform01() * m), static_cast<int>(rng.uniform01() * n)) += 0.5;
        CHECK(matrix_game_value(y).value >= sol.value - 1e-10);
    }
}

TEST_CASE("minimax_value_iteration trivia and fixed points") {
    CHECK_THROWS_AS(minimax_value_iteration(random_game(1, 2, 2, 2, 0.5), 1, 0.0),
                    ValidationError);

    // gamma = 0: one backup, per-state matrix value
    const MarkovGame g0 = random_game(2, 3, 2, 2, 0.0);
    const auto res0 = minimax_value_iteration(g0, 1, 1e-10);
    CHECK(res0.iterations == 1);
    CHECK(res0.residual == 0.0);
    for (int s = 0; s < 3; ++s) {
        CHECK(res0.v_star(s) ==
              doctest::Approx(matrix_game_value(apply_T_state(g0, Vec::Zero(3), 1, s)).value));
    }

    // single self-looping state: v_* = val(R) / (1 - gamma)
    Rng rng(42, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const int a = 2 + static_cast<int>(rng.uniform01() * 3);
        const int b = 2 + static_cast<int>(rng.uniform01() * 3);
        Mat payoff(a, b);
        for (int i = 0; i < a; ++i) {
            for (int j = 0; j < b; ++j) payoff(i, j) = rng.uniform(-1, 1);
        }
        const double gamma = rng.uniform(0.1, 0.9);
        const MarkovGame game = matrix_as_markov(MatrixGame(payoff), gamma);
        const auto res = minimax_value_iteration(game, 1, 1e-9);
        const double expect = matrix_game_value(payoff).value / (1.0 - gamma);
        CHECK(res.v_star(0) == doctest::Approx(expect).epsilon(1e-8));
        CHECK(res.residual <= 1e-9);
    }
}

TEST_CASE("zero-sum duality of the fixed points: v1 + v2 = 0") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MarkovGame game = random_game(seed + 1000, 3, 2, 3, 0.3 + 0.05 * (seed % 8));
        const Vec v1 = minimax_value_iteration(game, 1, 1e-8).v_star;
        const Vec v2 = minimax_value_iteration(game, 2, 1e-8).v_star;
        CHECK((v1 + v2).cwiseAbs().maxCoeff() <= 2e-8);
    }
}

TEST_CASE("Bellman backup is a gamma-contraction") {
    Rng rng(77, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const MarkovGame game = random_game(3000 + trial, 4, 2, 2, 0.2 + 0.7 * rng.uniform01());
        Vec v1(4), v2(4);
        for (int i = 0; i < 4; ++i) {
            v1(i) = rng.uniform(-3, 3);
            v2(i) = rng.uniform(-3, 3);
        }
        Vec b1(4), b2(4);
        for (int s = 0; s < 4; ++s) {
            b1(s) = matrix_game_value(apply_T_state(game, v1, 1, s)).value;
            b2(s) = matrix_game_value(apply_T_state(game, v2, 1, s)).value;
        }
        CHECK((b1 - b2).cwiseAbs().maxCoeff() <=
              game.gamma() * (v1 - v2).cwiseAbs().maxCoeff() + 1e-10);
    }
}

TEST_CASE("best_response_value reductions") {
    // reward independent of the opponent action: plain MDP optimal value
    {
        Rng rng(5, 0);
        const int n = 3;
        std::vector<double> transition;
        std::vector<double> reward;
        for (int s = 0; s < n; ++s) {
            for (int a = 0; a < 2; ++a) {
                const double r = rng.uniform(-1, 1);
                Vec row = simplex_point(rng, n);
                for (int b = 0; b < 2; ++b) {
                    reward.push_back(r);  // same for both opponent actions
                    for (int s2 = 0; s2 < n; ++s2) transition.push_back(row(s2));
                }
            }
        }
        const MarkovGame game(n, 2, 2, 0.7, transition, reward);
        const Policy uniform = Policy::uniform(n, 2);
        const Vec brv = best_response_value(game, 1, uniform, 1e-9);

        // independent value iteration on the collapsed MDP
        Vec v = Vec::Zero(n);
        for (int iter = 0; iter < 2000; ++iter) {
            Vec w(n);
            for (int s = 0; s < n; ++s) {
                double best = -1e100;
                for (int a = 0; a < 2; ++a) {
                    double q = game.reward1(s, a, 0);
                    for (int s2 = 0; s2 < n; ++s2) {
                        q += 0.7 * game.prob(s, a, 0, s2) * v(s2);
                    }
                    best = std::max(best, q);
                }
                w(s) = best;
            }
            v = w;
        }
        CHECK((brv - v).cwiseAbs().maxCoeff() <= 1e-8);
    }

    // gamma = 0: one-step marginalized maximum
    {
        const MarkovGame game = random_game(6, 3, 2, 3, 0.0);
        Rng rng(7, 0);
        const Policy opp = random_policy(rng, 3, 3);
        const Vec brv = best_response_value(game, 1, opp, 1e-9);
        for (int s = 0; s < 3; ++s) {
            double best = -1e100;
            for (int a = 0; a < 2; ++a) {
                double q = 0;
                for (int b = 0; b < 3; ++b) q += opp.probs(s, b) * game.reward1(s, a, b);
                best = std::max(best, q);
            }
            CHECK(brv(s) == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("best response against the extracted minimax policy is near v_star") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const double gamma = 0.25 + 0.05 * static_cast<double>(seed % 7);
        const MarkovGame game = random_game(seed + 50, 3, 2, 2, gamma);
        const double tol = 1e-8;
        const Vec v_star = minimax_value_iteration(game, 1, tol).v_star;
        const JointPolicy joint = minimax_policies(game, tol);
        const Vec brv = best_response_value(game, 1, joint.p2, tol);
        CHECK((brv - v_star).maxCoeff() <= 2 * tol);
    }
}

TEST_CASE("markov_nash_gap reductions and nonnegativity") {
    // single-state matching pennies at the uniform joint policy
    const MarkovGame embedded = matrix_as_markov(matching_pennies(), 0.5);
    const Policy u1 = Policy::uniform(1, 2);
    Vec p_o(1);
    p_o << 1.0;
    CHECK(markov_nash_gap(embedded, u1, u1, p_o, 1e-9) == doctest::Approx(0.0).epsilon(1e-8));

    // gamma = 0 decomposes into p_o-weighted per-state matrix gaps
    Rng rng(8, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const MarkovGame game = random_game(8000 + trial, 3, 2, 2, 0.0);
        const Policy pi1 = random_policy(rng, 3, 2);
        const Policy pi2 = random_policy(rng, 3, 2);
        const Vec p_o3 = simplex_point(rng, 3);
        double expected = 0.0;
        for (int s = 0; s < 3; ++s) {
            Mat r(2, 2);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) r(a, b) = game.reward1(s, a, b);
            }
            expected += p_o3(s) * matrix_nash_gap(MatrixGame(r), pi1.probs.row(s).transpose(),
                                                  pi2.probs.row(s).transpose());
        }
        CHECK(markov_nash_gap(game, pi1, pi2, p_o3, 1e-9) ==
              doctest::Approx(expected).epsilon(1e-9));
    }

    // any joint policy has nonnegative gap
    for (int trial = 0; trial < 10; ++trial) {
        const MarkovGame game = random_game(8100 + trial, 4, 2, 3, 0.6);
        const Policy pi1 = random_policy(rng, 4, 2);
        const Policy pi2 = random_policy(rng, 4, 3);
        const double tol = 1e-8;
        CHECK(markov_nash_gap(game, pi1, pi2, uniform_simplex(4), tol) >= -2 * tol);
    }
}

TEST_CASE("markov_nash_gap at the extracted minimax pair is near zero") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const double gamma = 0.2 + 0.05 * static_cast<double>(seed);
        const MarkovGame game = random_game(seed + 90, 3, 2, 2, gamma);
        const double tol = 1e-8;
        const JointPolicy joint = minimax_policies(game, tol);
        CHECK(markov_nash_gap(game, joint.p1, joint.p2, uniform_simplex(3), tol) <= 5 * tol);
    }
}

TEST_CASE("q_target trivia and double-implementation agreement") {
    Rng rng(9, 0);
    const MarkovGame game = random_game(9000, 3, 2, 3, 0.7);

    // v = 0: marginalized immediate reward
    const Policy opp = random_policy(rng, 3, 3);
    const Mat qbar0 = q_target(game, Vec::Zero(3), opp, 1);
    for (int s = 0; s < 3; ++s) {
        for (int a = 0; a < 2; ++a) {
            double expect = 0;
            for (int b = 0; b < 3; ++b) expect += opp.probs(s, b) * game.reward1(s, a, b);
            CHECK(qbar0(s, a) == doctest::Approx(expect).epsilon(1e-13));
        }
    }

    // deterministic opponent selects a column of T(v)
    Policy point;
    point.probs = Mat::Zero(3, 3);
    point.probs.col(1).setOnes();
    Vec v(3);
    v << 0.3, -0.8, 1.2;
    const Mat qbar_point = q_target(game, v, point, 1);
    for (int s = 0; s < 3; ++s) {
        const Mat ts = apply_T_state(game, v, 1, s);
        for (int a = 0; a < 2; ++a) CHECK(qbar_point(s, a) == doctest::Approx(ts(a, 1)));
    }

    // explicit-loop evaluation agrees to 1e-12
    for (int trial = 0; trial < 10; ++trial) {
        Vec vr(3);
        for (int i = 0; i < 3; ++i) vr(i) = rng.uniform(-2, 2);
        const Policy opp2 = random_policy(rng, 3, 3);
        const Mat fast = q_target(game, vr, opp2, 1);
        for (int s = 0; s < 3; ++s) {
            for (int a = 0; a < 2; ++a) {
                double slow = 0.0;
                for (int b = 0; b < 3; ++b) {
                    double ev = 0.0;
                    for (int s2 = 0; s2 < 3; ++s2) ev += game.prob(s, a, b, s2) * vr(s2);
                    slow += opp2.probs(s, b) * (game.reward1(s, a, b) + 0.7 * ev);
                }
                CHECK(std::abs(fast(s, a) - slow) <= 1e-12);
            }
        }
    }
}

TEST_CASE("policy_value solves the evaluation system exactly") {
    Rng rng(10, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const MarkovGame game = random_game(10000 + trial, 4, 2, 2, 0.8);
        const Policy pi1 = random_policy(rng, 4, 2);
        const Policy pi2 = random_policy(rng, 4, 2);
        const Vec v = policy_value(game, pi1, pi2, 1);
        // Bellman consistency: v(s) = r_pi(s) + gamma (P_pi v)(s)
        for (int s = 0; s < 4; ++s) {
            double rhs = 0.0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double w = pi1.probs(s, a) * pi2.probs(s, b);
                    double ev = 0.0;
                    for (int s2 = 0; s2 < 4; ++s2) ev += game.prob(s, a, b, s2) * v(s2);
                    rhs += w * (game.reward1(s, a, b) + 0.8 * ev);
                }
            }
            CHECK(v(s) == doctest::Approx(rhs).epsilon(1e-11));
        }
        // zero-sum: player 2's evaluation is the negation
        CHECK((policy_value(game, pi1, pi2, 2) + v).cwiseAbs().maxCoeff() <= 1e-11);
    }
}

TEST_SUITE_END();
