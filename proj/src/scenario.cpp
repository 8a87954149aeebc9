#include "crsep/scenario.hpp"

#include <stdexcept>

namespace crsep {

const char* to_string(Scheme scheme) { return scheme == Scheme::sss ? "sss" : "osa"; }

void ConstraintSet::validate() const {
    auto positive = [](double v) { return v > 0.0 && !std::isnan(v); };
    if (!positive(peak_power)) throw std::invalid_argument("constraints: peak power must be positive");
    if (avg_interference && !positive(*avg_interference))
        throw std::invalid_argument("constraints: average interference limit must be positive");
    if (peak_interference && !positive(*peak_interference))
        throw std::invalid_argument("constraints: peak interference limit must be positive");
    if (!positive(mean_gain_to_primary) || std::isinf(mean_gain_to_primary))
        throw std::invalid_argument("constraints: mean gain to primary must be positive");
}

void Scenario::validate() const {
    sensing.validate();
    ConstellationSpec(modulation, 1.0).validate();
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
        throw std::invalid_argument("scenario: noise variance must be positive");
    if (!(p_idle >= 0.0) || !std::isfinite(p_idle) || !(p_busy >= 0.0) || !std::isfinite(p_busy))
        throw std::invalid_argument("scenario: transmit powers must be finite and nonnegative");
    if (scheme == Scheme::osa && p_busy != 0.0)
        throw std::invalid_argument("scenario: OSA does not transmit on a busy decision, P1 must be 0");
    if (policy == PowerPolicy::peak_interference) {
        constraints.validate();
        if (!constraints.peak_interference)
            throw std::invalid_argument("scenario: peak-interference policy needs Q_pk");
    }
}

}  // namespace crsep
