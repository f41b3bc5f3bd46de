#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace dsbr {

std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic splittable generator. A (seed, stream) pair is hashed through
// splitmix64 into the mt19937_64 state, so every consumer owns an independent
// stream and adding a new stream never perturbs an existing one.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();

    double uniform(double lo, double hi);

    // Inverse-CDF draw from a probability vector.
    int categorical(const Eigen::Ref<const Eigen::VectorXd>& probs);

private:
    std::mt19937_64 gen_;
};

// The trajectory streams of one engine: one per player plus one for the
// environment transition. Diagnostics consume no randomness at all, so
// recording them can never shift a trajectory.
struct PlayerRngs {
    Rng environment;
    Rng player1;
    Rng player2;

    static PlayerRngs from_seed(std::uint64_t seed);
};

}  // namespace dsbr
