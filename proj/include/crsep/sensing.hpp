#pragma once

#include <stdexcept>

#include "crsep/random.hpp"

namespace crsep {

/// Occupancy of the licensed channel, used both for the true primary-user
/// state and for the secondary user's sensing decision.
enum class ChannelState { idle = 0, busy = 1 };

/// Raised when conditioning on a sensing decision that has probability zero.
class ConditioningError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Spectrum-sensing reliability together with the prior occupancy.
struct SensingModel {
    double p_detect = 1.0;       // Pr{decide busy | busy}
    double p_false_alarm = 0.0;  // Pr{decide busy | idle}
    double prior_busy = 0.4;

    /// Throws std::invalid_argument if any field lies outside [0, 1].
    void validate() const;

    double prior(ChannelState state) const {
        return state == ChannelState::busy ? prior_busy : 1.0 - prior_busy;
    }

    /// Pr{decision | true_state}.
    double decision_likelihood(ChannelState decision, ChannelState true_state) const;
};

/// Marginal probability of a sensing decision.
double decision_prob(const SensingModel& model, ChannelState decision);

/// Pr{true_state | decision} by Bayes' rule. Throws ConditioningError when
/// the decision has zero probability.
double posterior(const SensingModel& model, ChannelState true_state, ChannelState decision);

struct OccupancyDraw {
    ChannelState true_state;
    ChannelState decision;
};

/// Draws the true state, then the decision given that state. Always consumes
/// exactly two uniforms so downstream draws line up across sensing models.
OccupancyDraw sample_occupancy_and_decision(const SensingModel& model, RandomStream& rng);

}  // namespace crsep
