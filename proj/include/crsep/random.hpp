#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace crsep {

/// Seeded source of uniform, normal and exponential variates. Every stream is
/// a pure function of (master_seed, stream_index), so Monte Carlo chunks can
/// be scheduled on any thread without changing results.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream_index = 0);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::uint32_t index(std::uint32_t n);

    double normal();
    double exponential(double mean = 1.0) { return -mean * std::log(uniform_open()); }

    /// Circularly-symmetric complex Gaussian with the given per-axis variance.
    std::complex<double> complex_normal(double per_axis_variance);

  private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Mixes two 64-bit words into a well-spread seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace crsep
