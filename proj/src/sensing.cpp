#include "crsep/sensing.hpp"

#include <cmath>

namespace crsep {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SensingModel::validate() const {
    if (!is_probability(p_detect))
        throw std::invalid_argument("sensing: p_detect must lie in [0, 1]");
    if (!is_probability(p_false_alarm))
        throw std::invalid_argument("sensing: p_false_alarm must lie in [0, 1]");
    if (!is_probability(prior_busy))
        throw std::invalid_argument("sensing: prior_busy must lie in [0, 1]");
}

double SensingModel::decision_likelihood(ChannelState decision, ChannelState true_state) const {
    const double p_busy_decision = true_state == ChannelState::busy ? p_detect : p_false_alarm;
    return decision == ChannelState::busy ? p_busy_decision : 1.0 - p_busy_decision;
}

double decision_prob(const SensingModel& model, ChannelState decision) {
    const double busy = model.prior_busy * model.p_detect +
                        (1.0 - model.prior_busy) * model.p_false_alarm;
    return decision == ChannelState::busy ? busy : 1.0 - busy;
}

double posterior(const SensingModel& model, ChannelState true_state, ChannelState decision) {
    const double joint_idle =
        model.prior(ChannelState::idle) * model.decision_likelihood(decision, ChannelState::idle);
    const double joint_busy =
        model.prior(ChannelState::busy) * model.decision_likelihood(decision, ChannelState::busy);
    const double evidence = joint_idle + joint_busy;
    if (!(evidence > 0.0))
        throw ConditioningError(
            "posterior: sensing decision has zero probability under this model");
    return (true_state == ChannelState::busy ? joint_busy : joint_idle) / evidence;
}

OccupancyDraw sample_occupancy_and_decision(const SensingModel& model, RandomStream& rng) {
    const double u_state = rng.uniform();
    const double u_decision = rng.uniform();
    const ChannelState truth = u_state < model.prior_busy ? ChannelState::busy : ChannelState::idle;
    const bool decide_busy = u_decision < model.decision_likelihood(ChannelState::busy, truth);
    return {truth, decide_busy ? ChannelState::busy : ChannelState::idle};
}

}  // namespace crsep
