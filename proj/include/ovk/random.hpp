#pragma once

#include <cstdint>
#include <random>

namespace ovk {

// Seeded RNG used by every sampling routine in the library.  The standard
// distributions are not guaranteed to produce the same stream across
// implementations, so uniforms are derived from the raw 64-bit output
// directly; given a seed, results are identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return engine_() % n; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace ovk
