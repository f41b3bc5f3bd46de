#include "dsbr/dynamics.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "dsbr/chain.hpp"
#include "dsbr/diagnostics.hpp"
#include "dsbr/errors.hpp"
#include "dsbr/oracles.hpp"

namespace dsbr {

namespace {

constexpr double kInvariantTol = 1e-12;

void check_stepsizes(double alpha_k, double beta_k, long k) {
    if (beta_k > 1.0) {
        std::ostringstream os;
        os << "schedule: beta_" << k << " = " << beta_k << " > 1 would leave the simplex";
        throw ScheduleError(os.str());
    }
    if (alpha_k > 1.0) {
        std::ostringstream os;
        os << "schedule: alpha_" << k << " = " << alpha_k << " > 1 overshoots the q target";
        throw ScheduleError(os.str());
    }
}

void run_precheck(const RunConfig& config, int a_max, int n_states, double gamma) {
    config.validate();
    if (config.strict_theory) {
        const ConditionReport report = check_conditions(config, a_max, n_states, gamma);
        if (report.any_violated()) {
            throw ValidationError("strict_theory: parameter conditions violated\n" +
                                  report.to_text());
        }
    }
}

}  // namespace

double ell_tau(double tau, double gamma, int a_max) {
    if (a_max < 2) {
        throw ValidationError("ell_tau: a_max must be >= 2 (otherwise there is no decision)");
    }
    if (!(tau > 0.0)) throw ValidationError("ell_tau: tau must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("ell_tau: gamma must lie in [0,1)");
    return 1.0 / (1.0 + (a_max - 1) * std::exp(2.0 / ((1.0 - gamma) * tau)));
}

LearnerState LearnerState::initial(int player, int n_states, int n_actions, bool with_v) {
    LearnerState s;
    s.player = player;
    s.q = Mat::Zero(n_states, n_actions);
    s.policy = Mat::Constant(n_states, n_actions, 1.0 / n_actions);
    if (with_v) s.v = Vec::Zero(n_states);
    return s;
}

void RunConfig::validate() const {
    if (K < 0) throw ValidationError("RunConfig: K must be nonnegative");
    if (T < 1) throw ValidationError("RunConfig: T must be >= 1");
    if (!(tau > 0.0)) throw ValidationError("RunConfig: tau must be positive");
    if (checkpoint_every < 0) throw ValidationError("RunConfig: checkpoint_every must be >= 0");
    if (initial_state < 0) throw ValidationError("RunConfig: initial_state must be >= 0");
    if (!(oracle_tol > 0.0)) throw ValidationError("RunConfig: oracle_tol must be positive");
    schedule.validate();
}

long RunConfig::resolved_checkpoint(long total_steps) const {
    if (checkpoint_every > 0) return checkpoint_every;
    // Auto: about 50 records per run. The checkpoint oracle solves small
    // linear systems and best-response MDPs, which at this cadence costs far
    // under 20% of the dynamics time at desk scale.
    return std::max<long>(1, total_steps / 50);
}

void advance_policy(LearnerState& learner, double beta_k, double tau) {
    for (Eigen::Index s = 0; s < learner.policy.rows(); ++s) {
        const Vec target = softmax(learner.q.row(s).transpose(), tau);
        Vec row = (1.0 - beta_k) * learner.policy.row(s).transpose() + beta_k * target;
        row /= row.sum();  // keeps the row-sum drift at one rounding, not K of them
        learner.policy.row(s) = row.transpose();
    }
}

void update_q(LearnerState& learner, const PlayerObservation& obs, double alpha_k, double gamma) {
    const double bootstrap = learner.v.size() > 0 ? gamma * learner.v(obs.next_state) : 0.0;
    double& cell = learner.q(obs.state, obs.action);
    cell += alpha_k * (obs.reward + bootstrap - cell);
}

void enforce_invariants(const LearnerState& learner, double ell, double gamma) {
    const double margin = ell - kInvariantTol;
    if ((learner.policy.array() < margin).any()) {
        throw NumericalError("invariant violated: policy entry below ell_tau margin");
    }
    const double bound = 1.0 / (1.0 - gamma) + kInvariantTol;
    if (learner.q.cwiseAbs().maxCoeff() > bound) {
        throw NumericalError("invariant violated: ||q||_inf exceeds 1/(1-gamma)");
    }
    if (learner.v.size() > 0 && learner.v.cwiseAbs().maxCoeff() > bound) {
        throw NumericalError("invariant violated: ||v||_inf exceeds 1/(1-gamma)");
    }
}

StepResult dsbr_step(const MatrixGame& game, LearnerState& s1, LearnerState& s2, long k,
                     const StepsizeSchedule& schedule, double tau, PlayerRngs& rngs) {
    if (k < 0) throw ValidationError("dsbr_step: k must be nonnegative");
    const double alpha_k = schedule.alpha_at(k);
    const double beta_k = schedule.beta_at(k);
    check_stepsizes(alpha_k, beta_k, k);

    // Both policy updates commit before any action is sampled; both actions
    // are sampled from the committed policies before either q update.
    advance_policy(s1, beta_k, tau);
    advance_policy(s2, beta_k, tau);
    const int a1 = rngs.player1.categorical(s1.policy.row(0).transpose());
    const int a2 = rngs.player2.categorical(s2.policy.row(0).transpose());
    const double r1 = game.reward(1, a1, a2);
    const double r2 = game.reward(2, a2, a1);
    update_q(s1, PlayerObservation{0, a1, r1, 0}, alpha_k, 0.0);
    update_q(s2, PlayerObservation{0, a2, r2, 0}, alpha_k, 0.0);

    const double ell = ell_tau(tau, 0.0, game.a_max());
    enforce_invariants(s1, ell, 0.0);
    enforce_invariants(s2, ell, 0.0);
    return StepResult{{a1, a2}, {r1, r2}};
}

MarkovStepResult dsbr_vi_step(const MarkovGame& game, LearnerState& s1, LearnerState& s2,
                              int current_state, long k, const StepsizeSchedule& schedule,
                              double tau, PlayerRngs& rngs) {
    if (k < 0) throw ValidationError("dsbr_vi_step: k must be nonnegative");
    if (current_state < 0 || current_state >= game.n_states()) {
        throw ValidationError("dsbr_vi_step: current state out of range");
    }
    const double alpha_k = schedule.alpha_at(k);
    const double beta_k = schedule.beta_at(k);
    check_stepsizes(alpha_k, beta_k, k);

    advance_policy(s1, beta_k, tau);
    advance_policy(s2, beta_k, tau);
    const int a1 = rngs.player1.categorical(s1.policy.row(current_state).transpose());
    const int a2 = rngs.player2.categorical(s2.policy.row(current_state).transpose());
    const double r1 = game.reward(1, current_state, a1, a2);
    const double r2 = game.reward(2, current_state, a2, a1);

    Vec next_dist(game.n_states());
    for (int s2x = 0; s2x < game.n_states(); ++s2x) {
        next_dist(s2x) = game.prob(current_state, a1, a2, s2x);
    }
    const int next_state = rngs.environment.categorical(next_dist);

    update_q(s1, PlayerObservation{current_state, a1, r1, next_state}, alpha_k, game.gamma());
    update_q(s2, PlayerObservation{current_state, a2, r2, next_state}, alpha_k, game.gamma());

    const double ell = ell_tau(tau, game.gamma(), game.a_max());
    enforce_invariants(s1, ell, game.gamma());
    enforce_invariants(s2, ell, game.gamma());
    return MarkovStepResult{{a1, a2}, {r1, r2}, next_state};
}

RunResult run_dsbr(const MatrixGame& game, const RunConfig& config) {
    run_precheck(config, game.a_max(), 1, 0.0);

    LearnerState s1 = LearnerState::initial(1, 1, game.n_actions(1), false);
    LearnerState s2 = LearnerState::initial(2, 1, game.n_actions(2), false);
    PlayerRngs rngs = PlayerRngs::from_seed(config.seed);
    const long cadence = config.resolved_checkpoint(config.K);
    const MatrixDiagnosticsContext ctx{&game, config.tau};

    RunResult out;
    for (long k = 0; k < config.K; ++k) {
        if (k % cadence == 0) out.records.push_back(compute_record(ctx, s1, s2, k));
        dsbr_step(game, s1, s2, k, config.schedule, config.tau, rngs);
    }
    if (config.K % cadence == 0) {
        out.records.push_back(compute_record(ctx, s1, s2, config.K));
    }
    out.final_policy = JointPolicy{Policy{s1.policy}, Policy{s2.policy}};
    return out;
}

RunResult dsbr_vi_run(const MarkovGame& game, const RunConfig& config) {
    run_precheck(config, game.a_max(), game.n_states(), game.gamma());
    if (config.initial_state >= game.n_states()) {
        throw ValidationError("RunConfig: initial_state out of range");
    }
    if (config.K > 0) {
        // The existence assumption behind the guarantees is not constructively
        // checkable from the dynamics; ergodicity under the uniform joint
        // policy is a sufficient proxy, so its failure only warns.
        const Policy u1 = Policy::uniform(game.n_states(), game.n_actions(1));
        const Policy u2 = Policy::uniform(game.n_states(), game.n_actions(2));
        if (!check_ergodicity(induce_chain(game, u1, u2)).ergodic()) {
            std::cerr << "warning: chain induced by the uniform joint policy is not ergodic; "
                         "exploration guarantees may not hold\n";
        }
    }

    const int n = game.n_states();
    PlayerRngs rngs = PlayerRngs::from_seed(config.seed);
    const long total_steps = config.T * config.K;
    const long cadence = config.resolved_checkpoint(total_steps);

    MarkovDiagnosticsContext ctx;
    ctx.game = &game;
    ctx.v_star1 = minimax_value_iteration(game, 1, config.oracle_tol).v_star;
    ctx.v_star2 = minimax_value_iteration(game, 2, config.oracle_tol).v_star;
    ctx.p_o = uniform_simplex(n);
    ctx.tau = config.tau;
    ctx.tol = config.oracle_tol;
    ctx.c4_hat = config.c4_hat;

    Vec v1 = Vec::Zero(n);
    Vec v2 = Vec::Zero(n);
    LearnerState s1;
    LearnerState s2;
    int state = config.initial_state;

    RunResult out;
    for (long t = 0; t < config.T; ++t) {
        s1 = LearnerState::initial(1, n, game.n_actions(1), true);
        s2 = LearnerState::initial(2, n, game.n_actions(2), true);
        s1.v = v1;
        s2.v = v2;
        for (long k = 0; k < config.K; ++k) {
            const long g = t * config.K + k;
            if (g % cadence == 0) out.records.push_back(compute_record(ctx, s1, s2, t, k));
            state = dsbr_vi_step(game, s1, s2, state, k, config.schedule, config.tau, rngs)
                        .next_state;
        }
        for (int s = 0; s < n; ++s) {
            v1(s) = s1.policy.row(s).dot(s1.q.row(s));
            v2(s) = s2.policy.row(s).dot(s2.q.row(s));
        }
        s1.v = v1;
        s2.v = v2;
        const double ell = ell_tau(config.tau, game.gamma(), game.a_max());
        enforce_invariants(s1, ell, game.gamma());
        enforce_invariants(s2, ell, game.gamma());
    }
    if (total_steps % cadence == 0) {
        // Final record: the learner's state after the run, i.e. v_T together
        // with the output policies and q iterates of the last inner loop.
        out.records.push_back(compute_record(ctx, s1, s2, config.T, 0));
    }
    out.final_policy = JointPolicy{Policy{s1.policy}, Policy{s2.policy}};
    return out;
}

RunResult run_dsbr_vs_fixed(const MatrixGame& game, const Vec& opponent,
                            const RunConfig& config) {
    run_precheck(config, game.a_max(), 1, 0.0);
    if (opponent.size() != game.n_actions(2)) {
        throw ValidationError("run_dsbr_vs_fixed: opponent policy has wrong length");
    }
    Policy opp{opponent.transpose()};
    opp.validate();

    LearnerState s1 = LearnerState::initial(1, 1, game.n_actions(1), false);
    PlayerRngs rngs = PlayerRngs::from_seed(config.seed);
    const long cadence = config.resolved_checkpoint(config.K);
    const Vec marginal = marginal_payoff(game, opponent, 1);
    const double best = marginal.maxCoeff();
    const double ell = ell_tau(config.tau, 0.0, game.a_max());

    auto record_regret = [&](long k) {
        DiagnosticsRecord rec;
        rec.inner_k = k;
        rec.nash_gap = best - (s1.policy.row(0) * marginal)(0);  // gap to best response
        rec.l_q = (s1.q.row(0).transpose() - marginal).squaredNorm();
        rec.smoothing_bias = 2.0 * config.tau * std::log(static_cast<double>(game.a_max()));
        return rec;
    };

    RunResult out;
    for (long k = 0; k < config.K; ++k) {
        if (k % cadence == 0) out.records.push_back(record_regret(k));
        const double alpha_k = config.schedule.alpha_at(k);
        const double beta_k = config.schedule.beta_at(k);
        check_stepsizes(alpha_k, beta_k, k);
        advance_policy(s1, beta_k, config.tau);
        const int a1 = rngs.player1.categorical(s1.policy.row(0).transpose());
        const int a2 = rngs.player2.categorical(opponent);
        update_q(s1, PlayerObservation{0, a1, game.reward(1, a1, a2), 0}, alpha_k, 0.0);
        enforce_invariants(s1, ell, 0.0);
    }
    if (config.K % cadence == 0) out.records.push_back(record_regret(config.K));
    out.final_policy = JointPolicy{Policy{s1.policy}, opp};
    return out;
}

RunResult dsbr_vi_run_vs_fixed(const MarkovGame& game, const Policy& opponent,
                               const RunConfig& config) {
    run_precheck(config, game.a_max(), game.n_states(), game.gamma());
    if (opponent.n_states() != game.n_states() || opponent.n_actions() != game.n_actions(2)) {
        throw ValidationError("dsbr_vi_run_vs_fixed: opponent policy shape mismatch");
    }
    opponent.validate();

    const int n = game.n_states();
    PlayerRngs rngs = PlayerRngs::from_seed(config.seed);
    const long total_steps = config.T * config.K;
    const long cadence = config.resolved_checkpoint(total_steps);
    const Vec brv = best_response_value(game, 1, opponent, config.oracle_tol);
    const Vec p_o = uniform_simplex(n);
    const double ell = ell_tau(config.tau, game.gamma(), game.a_max());

    Vec v1 = Vec::Zero(n);
    LearnerState s1;
    int state = config.initial_state;

    auto record_regret = [&](long t, long k) {
        DiagnosticsRecord rec;
        rec.outer_t = t;
        rec.inner_k = k;
        rec.nash_gap = p_o.dot(brv - policy_value(game, Policy{s1.policy}, opponent, 1));
        rec.l_v = (s1.v - brv).cwiseAbs().maxCoeff();
        rec.l_q = (s1.q - q_target(game, s1.v, opponent, 1)).squaredNorm();
        rec.smoothing_bias = std::numeric_limits<double>::quiet_NaN();
        return rec;
    };

    RunResult out;
    for (long t = 0; t < config.T; ++t) {
        s1 = LearnerState::initial(1, n, game.n_actions(1), true);
        s1.v = v1;
        for (long k = 0; k < config.K; ++k) {
            const long g = t * config.K + k;
            if (g % cadence == 0) out.records.push_back(record_regret(t, k));
            const double alpha_k = config.schedule.alpha_at(k);
            const double beta_k = config.schedule.beta_at(k);
            check_stepsizes(alpha_k, beta_k, k);
            advance_policy(s1, beta_k, config.tau);
            const int a1 = rngs.player1.categorical(s1.policy.row(state).transpose());
            const int a2 = rngs.player2.categorical(opponent.probs.row(state).transpose());
            Vec next_dist(n);
            for (int s2x = 0; s2x < n; ++s2x) next_dist(s2x) = game.prob(state, a1, a2, s2x);
            const int next_state = rngs.environment.categorical(next_dist);
            update_q(s1, PlayerObservation{state, a1, game.reward(1, state, a1, a2), next_state},
                     alpha_k, game.gamma());
            enforce_invariants(s1, ell, game.gamma());
            state = next_state;
        }
        for (int s = 0; s < n; ++s) v1(s) = s1.policy.row(s).dot(s1.q.row(s));
        s1.v = v1;
        enforce_invariants(s1, ell, game.gamma());
    }
    if (total_steps % cadence == 0) out.records.push_back(record_regret(config.T, 0));
    out.final_policy = JointPolicy{Policy{s1.policy}, opponent};
    return out;
}

bool ConditionReport::any_violated() const {
    for (const auto& c : checks) {
        if (c.status == ConditionStatus::violated) return true;
    }
    return false;
}

std::string ConditionReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        const char* tag = c.status == ConditionStatus::satisfied  ? "ok      "
                          : c.status == ConditionStatus::violated ? "VIOLATED"
                                                                  : "symbolic";
        os << "[" << tag << "] " << c.name << ": " << c.detail << "\n";
    }
    return os.str();
}

ConditionReport check_conditions(const RunConfig& config, int a_max, int n_states, double gamma) {
    const StepsizeSchedule& sch = config.schedule;
    sch.validate();
    if (!(config.tau > 0.0)) throw ValidationError("check_conditions: tau must be positive");
    const double tau = config.tau;
    const double ell = a_max >= 2 ? ell_tau(tau, gamma, a_max) : 1.0;

    ConditionReport report;
    auto add = [&](std::string name, ConditionStatus status, std::string detail) {
        report.checks.push_back({std::move(name), status, std::move(detail)});
    };

    // Largest stepsizes along the schedule; both sequences are nonincreasing.
    const double alpha0 = sch.alpha_at(0);
    const double beta0 = sch.beta_at(0);
    {
        std::ostringstream os;
        os << "beta_k = " << beta0 << " at k=0, needs <= 1 to stay in the simplex";
        add("simplex step (beta_k <= 1)",
            beta0 <= 1.0 ? ConditionStatus::satisfied : ConditionStatus::violated, os.str());
    }
    {
        std::ostringstream os;
        os << "alpha_k = " << alpha0 << " at k=0, needs <= 1 to keep q in the payoff hull";
        add("q step (alpha_k <= 1)",
            alpha0 <= 1.0 ? ConditionStatus::satisfied : ConditionStatus::violated, os.str());
    }
    {
        // Single-state ratio hypothesis: c_{alpha,beta} <= ell^3 tau^3 / (c0 A^2)
        // with c0 an unspecified numerical constant.
        std::ostringstream os;
        os << "c_{alpha,beta} = " << sch.ratio << " <= ell_tau^3*tau^3/(c0*A_max^2) = "
           << (ell * ell * ell * tau * tau * tau) / (static_cast<double>(a_max) * a_max)
           << "/c0 -- not checkable, constant c0 unspecified";
        add("ratio bound (matrix case)", ConditionStatus::symbolic, os.str());
    }
    if (n_states > 1 || gamma > 0.0) {
        // Markov-case ratio hypothesis: c <= c_tau ell^2 tau^3 (1-gamma)^2 / (512 |S| A^2),
        // where c_tau = mu_tau * ell_tau involves the unobservable uniform
        // stationary floor mu_tau.
        const double known = (ell * ell * tau * tau * tau * (1.0 - gamma) * (1.0 - gamma)) /
                             (512.0 * n_states * static_cast<double>(a_max) * a_max);
        std::ostringstream os;
        os << "c_{alpha,beta} = " << sch.ratio << " <= c_tau * " << known
           << " -- not checkable, c_tau depends on unknown mixing data";
        add("ratio bound (Markov case)", ConditionStatus::symbolic, os.str());
    }
    {
        std::ostringstream os;
        os << "window sum alpha_{k-z_k,k-1} <= 1/4 -- not checkable, mixing threshold z_k "
              "has unspecified constants";
        add("stepsize window sum", ConditionStatus::symbolic, os.str());
    }
    if (sch.kind == ScheduleKind::linear) {
        const bool ok = sch.alpha > 2.0 / sch.ratio && sch.h > sch.alpha;
        std::ostringstream os;
        os << "linear rate hypothesis: alpha = " << sch.alpha << " > 2/c = " << 2.0 / sch.ratio
           << " and h = " << sch.h << " > alpha";
        add("linear schedule hypothesis",
            ok ? ConditionStatus::satisfied : ConditionStatus::violated, os.str());
    }
    if (sch.kind == ScheduleKind::polynomial) {
        const double h_min = std::pow(4.0 * sch.z / (sch.ratio * sch.alpha), 1.0 / (1.0 - sch.z));
        std::ostringstream os;
        os << "polynomial rate hypothesis: h = " << sch.h << " >= (4z/(c*alpha))^(1/(1-z)) = "
           << h_min;
        add("polynomial schedule hypothesis",
            sch.h >= h_min ? ConditionStatus::satisfied : ConditionStatus::violated, os.str());
    }
    return report;
}

}  // namespace dsbr
