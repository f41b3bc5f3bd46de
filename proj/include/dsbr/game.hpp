#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace dsbr {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Tolerance used when validating stochastic vectors / transition rows.
inline constexpr double kSimplexTol = 1e-12;

// Two-player zero-sum matrix game. Only the row player's payoffs are stored;
// the column player's are -payoff^T by the zero-sum structure. All entries
// are required to lie in [-1, 1].
class MatrixGame {
public:
    explicit MatrixGame(Mat payoff);

    const Mat& payoff() const { return payoff_; }
    int n_actions(int player) const;  // player in {1, 2}
    int a_max() const;

    // Realized payoff of `player` when it plays `own` against `opp`.
    double reward(int player, int own, int opp) const;

private:
    Mat payoff_;
};

// Finite two-player zero-sum Markov game. Stores p(s'|s,a1,a2) and the row
// player's reward R1(s,a1,a2); player 2's reward is -R1(s,a1,a2). Rewards are
// required to lie in [-1, 1] and transition rows must be stochastic.
class MarkovGame {
public:
    MarkovGame(int n_states, int n_actions1, int n_actions2, double gamma,
               std::vector<double> transition,  // [s][a1][a2][s'] row-major
               std::vector<double> reward);     // [s][a1][a2] row-major

    int n_states() const { return n_states_; }
    int n_actions(int player) const;  // player in {1, 2}
    int a_max() const;
    double gamma() const { return gamma_; }

    double prob(int s, int a1, int a2, int s_next) const {
        return transition_[trans_index(s, a1, a2) + static_cast<std::size_t>(s_next)];
    }
    double reward1(int s, int a1, int a2) const {
        return reward_[reward_index(s, a1, a2)];
    }
    // Player-relative reward: arguments are (own action, opponent action).
    double reward(int player, int s, int own, int opp) const;

    // sum_{s'} p(s'|s,a1,a2) v(s')
    double expected_next_value(int s, int a1, int a2, const Vec& v) const;

    const std::vector<double>& transition() const { return transition_; }
    const std::vector<double>& reward_tensor() const { return reward_; }

private:
    std::size_t trans_index(int s, int a1, int a2) const {
        return (((static_cast<std::size_t>(s) * n_a1_ + a1) * n_a2_) + a2) * n_states_;
    }
    std::size_t reward_index(int s, int a1, int a2) const {
        return ((static_cast<std::size_t>(s) * n_a1_ + a1) * n_a2_) + a2;
    }

    int n_states_;
    int n_a1_;
    int n_a2_;
    double gamma_;
    std::vector<double> transition_;
    std::vector<double> reward_;
};

// Per-state distribution over one player's actions; |S| x |A| row-stochastic.
struct Policy {
    Mat probs;

    int n_states() const { return static_cast<int>(probs.rows()); }
    int n_actions() const { return static_cast<int>(probs.cols()); }
    void validate() const;  // throws ValidationError naming the offending row
    static Policy uniform(int n_states, int n_actions);
};

struct JointPolicy {
    Policy p1;
    Policy p2;
};

// A player's action-value estimates, |S| x |A^i|.
struct QFunction {
    Mat values;
};

// A player's state values, length |S|.
struct ValueFunction {
    Vec values;
};

// Softmax with temperature tau, computed with max-subtraction (exact under
// shift invariance). Output sums to 1 with all entries positive.
Vec softmax(const Vec& q, double tau);

// Shannon entropy with the 0*log(0) = 0 convention, so the function is
// continuous on the closed simplex (oracle policies may be deterministic).
double entropy(const Vec& mu);

// One-step lookahead payoff tensor: Q(s, a_own, a_opp) = R^i + gamma * E[v(S')].
// Returned as one |A^i| x |A^{-i}| matrix per state.
std::vector<Mat> apply_T(const MarkovGame& game, const Vec& v, int player);
Mat apply_T_state(const MarkovGame& game, const Vec& v, int player, int s);

// Payoff of each own action against an opponent mixture: R^i pi^{-i}
// (player 1) or -(R^1)^T pi^1 (player 2).
Vec marginal_payoff(const MatrixGame& game, const Vec& opponent_policy, int player);

// Embeds a matrix game as a single-state Markov game with gamma = 0, for the
// code paths that are written once against MarkovGame.
MarkovGame matrix_as_markov(const MatrixGame& game, double gamma = 0.0);

Vec uniform_simplex(int n);

}  // namespace dsbr
