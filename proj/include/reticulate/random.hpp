#pragma once

// Portable random streams. Distribution code in <random> is implementation
// defined, so conversions from raw 64-bit draws are done here to keep seeded
// output identical across standard libraries.

#include <cstdint>
#include <random>

namespace reticulate {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Stateless sub-seed for stream (a, b) under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace reticulate
