#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "crsep/gaussian_mixture.hpp"
#include "crsep/modulation.hpp"
#include "crsep/sensing.hpp"

namespace crsep {

/// Sensing-based spectrum sharing transmits under both decisions;
/// opportunistic access transmits only on an idle decision (P1 = 0).
enum class Scheme { sss, osa };

const char* to_string(Scheme scheme);

/// Transmit power and interference limits, all linear.
struct ConstraintSet {
    double peak_power = 1.0;                   // P_pk
    std::optional<double> avg_interference;    // Q_avg
    std::optional<double> peak_interference;   // Q_pk
    double mean_gain_to_primary = 1.0;         // E{|g|^2}

    void validate() const;
};

/// How transmit power is chosen for a trial.
enum class PowerPolicy {
    fixed,              // p_idle / p_busy as stored in the scenario
    peak_interference,  // min(P_pk, Q_pk / |g|^2) drawn per symbol, both decisions
};

struct Scenario {
    Scheme scheme = Scheme::sss;
    Modulation modulation;
    double p_idle = 1.0;  // P0, power under an idle decision
    double p_busy = 1.0;  // P1, must be 0 for OSA
    SensingModel sensing;
    double noise_variance = 0.01;  // per-axis
    GaussianMixture interference = GaussianMixture::four_component_preset();
    ConstraintSet constraints;
    PowerPolicy policy = PowerPolicy::fixed;

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;

    double power(ChannelState decision) const {
        return decision == ChannelState::busy ? p_busy : p_idle;
    }
    ConstellationSpec spec(ChannelState decision) const { return {modulation, power(decision)}; }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace crsep
