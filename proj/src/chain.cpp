#include "dsbr/chain.hpp"

#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "dsbr/errors.hpp"

namespace dsbr {

namespace {

std::vector<std::vector<int>> support_graph(const Mat& p) {
    const int n = static_cast<int>(p.rows());
    std::vector<std::vector<int>> adj(n);
    for (int s = 0; s < n; ++s) {
        for (int s2 = 0; s2 < n; ++s2) {
            if (p(s, s2) > 0.0) adj[s].push_back(s2);
        }
    }
    return adj;
}

std::vector<char> reachable_from(const std::vector<std::vector<int>>& adj, int start) {
    std::vector<char> seen(adj.size(), 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                q.push(v);
            }
        }
    }
    return seen;
}

}  // namespace

void InducedChain::validate() const {
    const int n = n_states();
    if (n < 1 || transition.cols() != n) {
        throw ValidationError("InducedChain: transition must be square and non-empty");
    }
    for (int s = 0; s < n; ++s) {
        double sum = 0.0;
        for (int s2 = 0; s2 < n; ++s2) {
            const double p = transition(s, s2);
            if (!(p >= 0.0)) {
                std::ostringstream os;
                os << "InducedChain: entry (" << s << ", " << s2 << ") is negative";
                throw ValidationError(os.str());
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSimplexTol) {
            std::ostringstream os;
            os << "InducedChain: row " << s << " sums to " << sum;
            throw ValidationError(os.str());
        }
    }
}

InducedChain induce_chain(const MarkovGame& game, const Policy& pi1, const Policy& pi2) {
    if (pi1.n_states() != game.n_states() || pi1.n_actions() != game.n_actions(1) ||
        pi2.n_states() != game.n_states() || pi2.n_actions() != game.n_actions(2)) {
        throw ValidationError("induce_chain: policy shapes do not match the game");
    }
    pi1.validate();
    pi2.validate();
    const int n = game.n_states();
    InducedChain chain;
    chain.transition = Mat::Zero(n, n);
    for (int s = 0; s < n; ++s) {
        for (int a1 = 0; a1 < game.n_actions(1); ++a1) {
            for (int a2 = 0; a2 < game.n_actions(2); ++a2) {
                const double w = pi1.probs(s, a1) * pi2.probs(s, a2);
                if (w == 0.0) continue;
                for (int s2 = 0; s2 < n; ++s2) {
                    chain.transition(s, s2) += w * game.prob(s, a1, a2, s2);
                }
            }
        }
    }
    return chain;
}

ErgodicityReport check_ergodicity(const InducedChain& chain) {
    chain.validate();
    const int n = chain.n_states();
    const auto adj = support_graph(chain.transition);

    ErgodicityReport report;
    // Strong connectivity: every state reachable from 0 and 0 reachable back.
    std::vector<std::vector<int>> radj(n);
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) radj[v].push_back(u);
    }
    const auto fwd = reachable_from(adj, 0);
    const auto bwd = reachable_from(radj, 0);
    report.irreducible = true;
    for (int s = 0; s < n; ++s) {
        if (!fwd[s] || !bwd[s]) {
            report.irreducible = false;
            break;
        }
    }
    if (!report.irreducible) return report;

    // Period of an irreducible chain: gcd of (d[u] + 1 - d[v]) over support
    // edges u -> v, with d the BFS level from state 0.
    std::vector<int> level(n, -1);
    std::queue<int> q;
    q.push(0);
    level[0] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            }
        }
    }
    int period = 0;
    for (int u = 0; u < n; ++u) {
        for (int v : adj[u]) {
            period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
        }
    }
    report.period = period;
    report.aperiodic = (period == 1);
    return report;
}

Vec stationary_distribution(const InducedChain& chain) {
    const auto report = check_ergodicity(chain);
    if (!report.ergodic()) {
        std::ostringstream os;
        os << "stationary_distribution: chain is not ergodic (irreducible="
           << (report.irreducible ? "yes" : "no");
        if (report.irreducible) os << ", period=" << report.period;
        os << ")";
        throw NotErgodicError(os.str());
    }
    const int n = chain.n_states();
    // Stationarity (P^T - I) mu = 0 with one equation replaced by 1' mu = 1;
    // the system has full rank for an ergodic chain.
    Mat a = chain.transition.transpose() - Mat::Identity(n, n);
    a.row(n - 1).setOnes();
    Vec b = Vec::Zero(n);
    b(n - 1) = 1.0;
    Vec mu = a.fullPivLu().solve(b);
    // Rounding can produce tiny negative entries on near-degenerate chains.
    mu = mu.cwiseMax(0.0);
    mu /= mu.sum();
    return mu;
}

double tv_distance(const Vec& p, const Vec& q) {
    if (p.size() != q.size()) throw ValidationError("tv_distance: length mismatch");
    return 0.5 * (p - q).cwiseAbs().sum();
}

long mixing_time(const InducedChain& chain, double eta, long cap) {
    if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("mixing_time: eta must lie in (0, 1)");
    if (cap < 0) throw ValidationError("mixing_time: cap must be nonnegative");
    const Vec mu = stationary_distribution(chain);  // throws if not ergodic
    const int n = chain.n_states();

    Mat power = Mat::Identity(n, n);
    for (long k = 0; k <= cap; ++k) {
        double worst = 0.0;
        for (int s = 0; s < n; ++s) {
            worst = std::max(worst, tv_distance(power.row(s).transpose(), mu));
        }
        if (worst <= eta) return k;
        power = power * chain.transition;
    }
    std::ostringstream os;
    os << "mixing_time: cap of " << cap << " steps exceeded at eta = " << eta;
    throw NumericalError(os.str());
}

long positivity_index(const InducedChain& chain) {
    chain.validate();
    const int n = chain.n_states();
    const long cap = static_cast<long>(n) * n;
    std::vector<char> support(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            support[static_cast<std::size_t>(i) * n + j] = i == j;  // P^0 = I
        }
    }
    for (long k = 0; k <= cap; ++k) {
        bool all = true;
        for (char c : support) {
            if (!c) {
                all = false;
                break;
            }
        }
        if (all) return k;
        std::vector<char> next(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i) {
            for (int m = 0; m < n; ++m) {
                if (!support[static_cast<std::size_t>(i) * n + m]) continue;
                for (int j = 0; j < n; ++j) {
                    if (chain.transition(m, j) > 0.0) next[static_cast<std::size_t>(i) * n + j] = 1;
                }
            }
        }
        support = std::move(next);
    }
    throw NotErgodicError("positivity_index: no power of P is strictly positive within |S|^2");
}

double uniform_mixing_bound(long t_pib_eta, double delta1, double delta2, double mu_b_min,
                            long r_b) {
    if (t_pib_eta < 0) throw ValidationError("uniform_mixing_bound: negative benchmark time");
    if (!(delta1 > 0.0 && delta1 <= 1.0) || !(delta2 > 0.0 && delta2 <= 1.0)) {
        throw ValidationError("uniform_mixing_bound: margins must lie in (0, 1]");
    }
    if (!(mu_b_min > 0.0)) {
        throw ValidationError("uniform_mixing_bound: mu_b_min must be positive");
    }
    if (r_b < 0) throw ValidationError("uniform_mixing_bound: r_b must be nonnegative");
    const double denom = std::pow(delta1 * delta2, static_cast<double>(r_b)) * mu_b_min;
    if (denom == 0.0) throw ValidationError("uniform_mixing_bound: denominator underflows to 0");
    return static_cast<double>(t_pib_eta) / denom;
}

double rho_delta(double rho_b, double delta1, double delta2, long r_b, double mu_b_min) {
    if (!(rho_b > 0.0 && rho_b < 1.0)) {
        throw ValidationError("rho_delta: rho_b must lie in (0, 1)");
    }
    if (!(delta1 > 0.0 && delta1 <= 1.0) || !(delta2 > 0.0 && delta2 <= 1.0)) {
        throw ValidationError("rho_delta: margins must lie in (0, 1]");
    }
    if (!(mu_b_min > 0.0)) throw ValidationError("rho_delta: mu_b_min must be positive");
    if (r_b < 0) throw ValidationError("rho_delta: r_b must be nonnegative");
    return std::pow(rho_b, std::pow(delta1 * delta2, static_cast<double>(r_b)) * mu_b_min);
}

double stationary_lipschitz_bound(int n_states, double rho_delta_value) {
    if (n_states < 1) throw ValidationError("stationary_lipschitz_bound: n_states must be >= 1");
    if (!(rho_delta_value > 0.0 && rho_delta_value < 1.0)) {
        throw ValidationError("stationary_lipschitz_bound: rho must lie in (0, 1)");
    }
    return 2.0 * std::log(8.0 * n_states / rho_delta_value) / std::log(1.0 / rho_delta_value);
}

}  // namespace dsbr
