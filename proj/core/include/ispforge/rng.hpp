#pragma once

#include <cstdint>

namespace ispforge {

/// Deterministic pseudo-random generator (xoshiro256++ seeded via splitmix64).
///
/// The stdlib distributions are implementation-defined, so every sampling
/// helper here is written out explicitly: identical seeds give bit-identical
/// streams on any platform, which the reproducibility contracts rely on.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n);

    /// Standard normal via Box-Muller (no cached spare; two uniforms per draw).
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Derives an independent child generator. fork(k) for distinct k gives
    /// decorrelated streams regardless of how much the parent is consumed.
    Rng fork(std::uint64_t stream) const;

private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
};

} // namespace ispforge
