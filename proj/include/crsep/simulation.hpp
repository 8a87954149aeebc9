#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "crsep/detection.hpp"
#include "crsep/random.hpp"
#include "crsep/scenario.hpp"

namespace crsep {

struct MonteCarloConfig {
    std::uint64_t trials = 1'000'000;
    std::uint64_t master_seed = 1;
    std::uint64_t chunk_size = 65536;
    unsigned workers = 0;  // 0 = hardware concurrency; never affects results
    /// OSA only: count trials skipped on a busy decision as correct instead
    /// of conditioning the SEP on transmission.
    bool count_skips_as_correct = false;
};

struct SepEstimate {
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;   // trials entering the SEP denominator
    std::uint64_t skipped = 0;  // OSA trials with no transmission
    std::uint64_t total = 0;    // all simulated trials
    double sep = 0.0;
    double ci95_half_width = 0.0;  // Wilson score interval

    double skip_fraction() const { return total ? double(skipped) / double(total) : 0.0; }
};

/// No trial transmitted, so there is no SEP to report.
class InsufficientDataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TrialOutcome {
    bool error = false;
    bool skipped = false;
    ChannelState true_state = ChannelState::idle;
    ChannelState decision = ChannelState::idle;
    double fading_power = 0.0;  // |h|^2
};

/// One symbol through the cognitive link: sensing draw, uniform symbol,
/// Rayleigh h with E|h|^2 = 1, Gaussian noise, and an independent mixture
/// draw added when the channel is truly busy. Detection derotates and uses
/// the midpoint-threshold rule. Zero power or |h| = 0 decides index (0, 0).
class TrialSimulator {
  public:
    explicit TrialSimulator(const Scenario& scenario);
    TrialOutcome run(RandomStream& rng) const;

  private:
    Scenario scenario_;
    std::vector<ConstellationPoint> unit_points_;  // unit average power
};

TrialOutcome run_trial(const Scenario& scenario, RandomStream& rng);

/// Chunked Monte Carlo. Chunk c draws from RandomStream(master_seed, c), so
/// the estimate depends on (master_seed, chunk_size) only, never on workers.
/// Throws InsufficientDataError when no trial transmits.
SepEstimate run_monte_carlo(const Scenario& scenario, const MonteCarloConfig& config);

/// 95% Wilson score half-width for k successes in n trials.
double wilson_half_width(std::uint64_t k, std::uint64_t n);

}  // namespace crsep
