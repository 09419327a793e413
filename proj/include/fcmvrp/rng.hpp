#ifndef FCMVRP_RNG_HPP
#define FCMVRP_RNG_HPP

#include <cstdint>

namespace fcmvrp {

/// Portable seeded PRNG used for instance generation.
///
/// Algorithm: xoshiro256++ (Blackman & Vigna), state initialized from the
/// user seed with four successive splitmix64 outputs. Doubles in [0,1) are
/// produced from the top 53 bits: (next() >> 11) * 2^-53. The same recipe
/// reproduces identical instances in any language, which is why every
/// emitted instance file names it in its rng_algorithm field.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [0, hi).
    double uniform(double hi) { return uniform01() * hi; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Deterministic mixing of a base seed with task indices (suite replicates).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t x = seed;
        std::uint64_t h = splitmix64(x);
        x = h ^ (a * 0x9e3779b97f4a7c15ULL);
        h = splitmix64(x);
        x = h ^ (b * 0xc2b2ae3d27d4eb4fULL);
        return splitmix64(x);
    }

    /// Text used in instance headers; keep in sync with the implementation.
    static const char* algorithm_id() {
        return "xoshiro256++ seeded by 4x splitmix64(seed); "
               "doubles = (next()>>11)*2^-53; depots before targets, x before y";
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t state_[4];
};

} // namespace fcmvrp

#endif
