#include "dsbr/rng.hpp"

#include "dsbr/errors.hpp"

namespace dsbr {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0xA02BDBF7BB3C0A7ULL * (stream + 1));
    const std::uint64_t a = splitmix64(s);
    const std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    gen_.seed(seq);
}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

int Rng::categorical(const Eigen::Ref<const Eigen::VectorXd>& probs) {
    if (probs.size() == 0) throw ValidationError("categorical: empty probability vector");
    const double u = uniform01();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        if (u < acc) return static_cast<int>(i);
    }
    // Rounding can leave acc marginally below 1; fall back to the last
    // positive-probability entry.
    for (Eigen::Index i = probs.size() - 1; i >= 0; --i) {
        if (probs(i) > 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

PlayerRngs PlayerRngs::from_seed(std::uint64_t seed) {
    return PlayerRngs{Rng(seed, 0), Rng(seed, 1), Rng(seed, 2)};
}

}  // namespace dsbr
