#pragma once
// Deterministic random number plumbing. Every stochastic routine in the
// library takes either an explicit seed or an Rng&, never hidden state.

#include <cstdint>
#include <random>

namespace stakelab {

// SplitMix64 finalizer. Used as the documented seed-mixing function:
// replicate i of a run with master seed m uses
//   seed_i = mix64(m + (i+1) * 0x9E3779B97F4A7C15).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

// mt19937_64 is fully specified by the standard, so streams are identical
// across platforms. Uniform doubles are built from the raw 64-bit output
// (top 53 bits) rather than std::uniform_real_distribution, whose mapping
// is implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace stakelab
