#include "dsbr/game.hpp"

#include <cmath>
#include <sstream>

#include "dsbr/errors.hpp"

namespace dsbr {

namespace {

void check_player(int player) {
    if (player != 1 && player != 2) {
        throw ValidationError("player must be 1 or 2, got " + std::to_string(player));
    }
}

}  // namespace

MatrixGame::MatrixGame(Mat payoff) : payoff_(std::move(payoff)) {
    if (payoff_.rows() < 1 || payoff_.cols() < 1) {
        throw ValidationError("MatrixGame: both dimensions must be >= 1");
    }
    for (Eigen::Index i = 0; i < payoff_.rows(); ++i) {
        for (Eigen::Index j = 0; j < payoff_.cols(); ++j) {
            const double x = payoff_(i, j);
            if (!std::isfinite(x)) {
                std::ostringstream os;
                os << "MatrixGame: payoff[" << i << "][" << j << "] is not finite";
                throw ValidationError(os.str());
            }
            if (std::abs(x) > 1.0 + kSimplexTol) {
                std::ostringstream os;
                os << "MatrixGame: |payoff[" << i << "][" << j << "]| = " << std::abs(x)
                   << " exceeds 1";
                throw ValidationError(os.str());
            }
        }
    }
}

int MatrixGame::n_actions(int player) const {
    check_player(player);
    return static_cast<int>(player == 1 ? payoff_.rows() : payoff_.cols());
}

int MatrixGame::a_max() const {
    return static_cast<int>(std::max(payoff_.rows(), payoff_.cols()));
}

double MatrixGame::reward(int player, int own, int opp) const {
    check_player(player);
    return player == 1 ? payoff_(own, opp) : -payoff_(opp, own);
}

MarkovGame::MarkovGame(int n_states, int n_actions1, int n_actions2, double gamma,
                       std::vector<double> transition, std::vector<double> reward)
    : n_states_(n_states),
      n_a1_(n_actions1),
      n_a2_(n_actions2),
      gamma_(gamma),
      transition_(std::move(transition)),
      reward_(std::move(reward)) {
    if (n_states_ < 1) throw ValidationError("MarkovGame: n_states must be >= 1");
    if (n_a1_ < 1 || n_a2_ < 1) throw ValidationError("MarkovGame: action counts must be >= 1");
    if (!(gamma_ >= 0.0 && gamma_ < 1.0)) {
        throw ValidationError("MarkovGame: gamma must lie in [0, 1)");
    }
    const std::size_t n_sa = static_cast<std::size_t>(n_states_) * n_a1_ * n_a2_;
    if (transition_.size() != n_sa * n_states_) {
        throw ValidationError("MarkovGame: transition tensor has wrong size");
    }
    if (reward_.size() != n_sa) {
        throw ValidationError("MarkovGame: reward tensor has wrong size");
    }
    for (int s = 0; s < n_states_; ++s) {
        for (int a1 = 0; a1 < n_a1_; ++a1) {
            for (int a2 = 0; a2 < n_a2_; ++a2) {
                const double r = reward1(s, a1, a2);
                if (!std::isfinite(r) || std::abs(r) > 1.0 + kSimplexTol) {
                    std::ostringstream os;
                    os << "MarkovGame: reward[" << s << "][" << a1 << "][" << a2 << "] = " << r
                       << " outside [-1, 1]";
                    throw ValidationError(os.str());
                }
                double sum = 0.0;
                for (int s2 = 0; s2 < n_states_; ++s2) {
                    const double p = prob(s, a1, a2, s2);
                    if (!(p >= 0.0) || p > 1.0 + kSimplexTol) {
                        std::ostringstream os;
                        os << "MarkovGame: transition[" << s << "][" << a1 << "][" << a2 << "]["
                           << s2 << "] = " << p << " outside [0, 1]";
                        throw ValidationError(os.str());
                    }
                    sum += p;
                }
                if (std::abs(sum - 1.0) > kSimplexTol) {
                    std::ostringstream os;
                    os << "MarkovGame: transition row (s=" << s << ", a1=" << a1 << ", a2=" << a2
                       << ") sums to " << sum << ", expected 1 within " << kSimplexTol;
                    throw ValidationError(os.str());
                }
            }
        }
    }
}

int MarkovGame::n_actions(int player) const {
    check_player(player);
    return player == 1 ? n_a1_ : n_a2_;
}

int MarkovGame::a_max() const { return std::max(n_a1_, n_a2_); }

double MarkovGame::reward(int player, int s, int own, int opp) const {
    check_player(player);
    return player == 1 ? reward1(s, own, opp) : -reward1(s, opp, own);
}

double MarkovGame::expected_next_value(int s, int a1, int a2, const Vec& v) const {
    const std::size_t base = trans_index(s, a1, a2);
    double acc = 0.0;
    for (int s2 = 0; s2 < n_states_; ++s2) {
        acc += transition_[base + static_cast<std::size_t>(s2)] * v(s2);
    }
    return acc;
}

void Policy::validate() const {
    if (probs.rows() < 1 || probs.cols() < 1) {
        throw ValidationError("Policy: must have at least one state and one action");
    }
    for (Eigen::Index s = 0; s < probs.rows(); ++s) {
        double sum = 0.0;
        for (Eigen::Index a = 0; a < probs.cols(); ++a) {
            const double p = probs(s, a);
            if (!(p >= 0.0)) {
                std::ostringstream os;
                os << "Policy: probs[" << s << "][" << a << "] = " << p << " is negative";
                throw ValidationError(os.str());
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSimplexTol) {
            std::ostringstream os;
            os << "Policy: row " << s << " sums to " << sum << ", expected 1 within "
               << kSimplexTol;
            throw ValidationError(os.str());
        }
    }
}

Policy Policy::uniform(int n_states, int n_actions) {
    Policy p;
    p.probs = Mat::Constant(n_states, n_actions, 1.0 / n_actions);
    return p;
}

Vec softmax(const Vec& q, double tau) {
    if (!(tau > 0.0)) throw ValidationError("softmax: tau must be positive");
    if (q.size() == 0) throw ValidationError("softmax: empty input");
    if (!q.allFinite()) throw ValidationError("softmax: non-finite input");
    const double m = q.maxCoeff();
    Vec out = ((q.array() - m) / tau).exp();
    out /= out.sum();
    return out;
}

double entropy(const Vec& mu) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        const double p = mu(i);
        if (!(p >= 0.0)) {
            throw ValidationError("entropy: entry " + std::to_string(i) + " is negative");
        }
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

Mat apply_T_state(const MarkovGame& game, const Vec& v, int player, int s) {
    if (v.size() != game.n_states()) {
        throw ValidationError("apply_T: value function has wrong length");
    }
    if (!v.allFinite()) throw ValidationError("apply_T: non-finite value function");
    const int n_own = game.n_actions(player);
    const int n_opp = game.n_actions(player == 1 ? 2 : 1);
    Mat q(n_own, n_opp);
    for (int a = 0; a < n_own; ++a) {
        for (int b = 0; b < n_opp; ++b) {
            const int a1 = player == 1 ? a : b;
            const int a2 = player == 1 ? b : a;
            q(a, b) = game.reward(player, s, a, b) +
                      game.gamma() * game.expected_next_value(s, a1, a2, v);
        }
    }
    return q;
}

std::vector<Mat> apply_T(const MarkovGame& game, const Vec& v, int player) {
    std::vector<Mat> out;
    out.reserve(game.n_states());
    for (int s = 0; s < game.n_states(); ++s) out.push_back(apply_T_state(game, v, player, s));
    return out;
}

Vec marginal_payoff(const MatrixGame& game, const Vec& opponent_policy, int player) {
    const int n_opp = game.n_actions(player == 1 ? 2 : 1);
    if (opponent_policy.size() != n_opp) {
        std::ostringstream os;
        os << "marginal_payoff: opponent policy has length " << opponent_policy.size()
           << ", expected " << n_opp;
        throw ValidationError(os.str());
    }
    if (player == 1) return game.payoff() * opponent_policy;
    return -game.payoff().transpose() * opponent_policy;
}

MarkovGame matrix_as_markov(const MatrixGame& game, double gamma) {
    const int a1 = game.n_actions(1);
    const int a2 = game.n_actions(2);
    std::vector<double> transition(static_cast<std::size_t>(a1) * a2, 1.0);
    std::vector<double> reward(static_cast<std::size_t>(a1) * a2);
    for (int i = 0; i < a1; ++i) {
        for (int j = 0; j < a2; ++j) {
            reward[static_cast<std::size_t>(i) * a2 + j] = game.payoff()(i, j);
        }
    }
    return MarkovGame(1, a1, a2, gamma, std::move(transition), std::move(reward));
}

Vec uniform_simplex(int n) { return Vec::Constant(n, 1.0 / n); }

}  // namespace dsbr
