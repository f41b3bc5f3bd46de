#pragma once

#include "dsbr/game.hpp"

namespace dsbr {

// Markov chain over states induced by a joint policy: a row-stochastic
// |S| x |S| matrix.
struct InducedChain {
    Mat transition;

    int n_states() const { return static_cast<int>(transition.rows()); }
    void validate() const;
};

// P_pi(s, s') = sum_{a1,a2} pi1(a1|s) pi2(a2|s) p(s'|s,a1,a2).
InducedChain induce_chain(const MarkovGame& game, const Policy& pi1, const Policy& pi2);

struct ErgodicityReport {
    bool irreducible = false;
    bool aperiodic = false;
    int period = 0;  // gcd of cycle lengths; meaningful when irreducible
    bool ergodic() const { return irreducible && aperiodic; }
};

// Exact structural test on the support graph: strong connectivity for
// irreducibility, gcd of cycle lengths through one state for the period.
ErgodicityReport check_ergodicity(const InducedChain& chain);

// Unique stationary distribution of an ergodic chain, from a direct solve of
// the stationarity system with the normalization constraint. Throws
// NotErgodicError on reducible or periodic chains.
Vec stationary_distribution(const InducedChain& chain);

// Total variation distance, computed as half the l1 distance.
double tv_distance(const Vec& p, const Vec& q);

// Smallest k >= 0 with max_s TV(P^k(s,.), mu) <= eta, found by iterated
// matrix powering with exact TV evaluation. Note P^0 = I, so a chain whose
// one-step rows already equal mu has mixing time 1, not 0 (unless eta is
// loose enough to absorb the distance from a point mass to mu).
long mixing_time(const InducedChain& chain, double eta, long cap = 1000000);

// Smallest k >= 0 such that P^k is strictly positive, via iterated support
// closure; capped at |S|^2.
long positivity_index(const InducedChain& chain);

// Upper bound on the uniform mixing time over all joint policies with
// per-player margins (delta1, delta2), in terms of benchmark-chain data:
//   t(delta, eta) <= t_{pi_b, eta} / ((delta1*delta2)^{r_b} * mu_b_min).
double uniform_mixing_bound(long t_pib_eta, double delta1, double delta2, double mu_b_min,
                            long r_b);

// Geometric mixing rate of the margin class given the benchmark rate rho_b:
// rho_delta = rho_b^{(delta1*delta2)^{r_b} * mu_b_min}.
double rho_delta(double rho_b, double delta1, double delta2, long r_b, double mu_b_min);

// Lipschitz constant of the policy -> stationary-distribution map on the
// margin class: 2 log(8|S|/rho_delta) / log(1/rho_delta).
double stationary_lipschitz_bound(int n_states, double rho_delta_value);

}  // namespace dsbr
