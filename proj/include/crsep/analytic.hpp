#pragma once

#include <stdexcept>

#include "crsep/gaussian_mixture.hpp"
#include "crsep/modulation.hpp"
#include "crsep/scenario.hpp"
#include "crsep/sensing.hpp"

namespace crsep {

/// Thrown when a numeric SEP integral misses its tolerance.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};

// ---------------------------------------------------------------------------
// Error probability for a given fading magnitude |h|
// ---------------------------------------------------------------------------

/// SEP of one point class with the sensing posterior folded in:
///   post_idle * [a Q(x0) - b Q(x0)^2] + (1 - post_idle) * sum_l w_l [a Q(xl) - b Q(xl)^2],
/// with (a, b) = (2, 1), (3, 2), (4, 4) for corner, edge and inner points and
/// x_v = sqrt(d^2 |h|^2 / (4 v)). For PAM the pairs are (1, 0) for the end
/// points and (2, 0) for the interior; "inner" is rejected.
/// `convolved` must already include the background noise.
double sep_class_conditional(PointClass cls, const ConstellationSpec& spec, double magnitude,
                             double post_idle, double noise_variance,
                             const GaussianMixture& convolved);

/// Average SEP of the scenario given |h|, over symbols, sensing decisions
/// and channel states. OSA conditions on an idle decision.
double sep_conditional(const Scenario& scenario, double magnitude);

struct NumericSep {
    double value;
    double error_estimate;
};

/// Same quantity as sep_conditional, by 2-D quadrature of the received-signal
/// densities over every rectangular decision region. Slow; a reference.
/// Throws QuadratureError if an integral misses its tolerance.
NumericSep sep_general_numeric(const Scenario& scenario, double magnitude);

// ---------------------------------------------------------------------------
// Rayleigh-averaged closed forms
// ---------------------------------------------------------------------------

/// Closed-form Rayleigh-averaged SEP and its Q^2-free upper bound as a
/// function of the two transmit powers, for fixed modulation, sensing,
/// noise and interference. Powers may be zero (a silent branch errs with
/// probability 1 - 1/M). When both powers are equal the decision no longer
/// matters and the sensing average collapses to the occupancy priors.
class RayleighSep {
  public:
    RayleighSep(Scheme scheme, Modulation modulation, const SensingModel& sensing,
                double noise_variance, const GaussianMixture& interference);
    explicit RayleighSep(const Scenario& scenario);

    double exact(double p_idle, double p_busy) const;
    double bound(double p_idle, double p_busy) const;

    /// Decision-independent power: weights are the occupancy priors (SSS) or
    /// the idle-decision posteriors (OSA).
    double exact_common(double power) const;
    double bound_common(double power) const;

    Scheme scheme() const { return scheme_; }
    const Modulation& modulation() const { return modulation_; }

  private:
    struct Weights {
        double idle;
        double busy;
    };
    double branch(double power, Weights w, bool exact) const;
    double evaluate(double p_idle, double p_busy, bool exact) const;

    Scheme scheme_;
    Modulation modulation_;
    double noise_variance_;
    GaussianMixture convolved_;
    double linear_coef_;     // 2 - 1/M_I - 1/M_Q
    double quadratic_coef_;  // (1 - 1/M_I)(1 - 1/M_Q)
    Weights per_decision_[2] = {{0, 0}, {0, 0}};  // Pr{decision} * Pr{state | decision}
    bool decision_possible_[2] = {false, false};
    Weights common_ = {0, 0};
};

double sep_rayleigh_sss(const Scenario& scenario);
double sep_rayleigh_osa(const Scenario& scenario);
/// Dispatches on scenario.scheme.
double sep_rayleigh(const Scenario& scenario);

/// Rayleigh-averaged bound obtained by dropping the Q^2 terms. Exact for PAM.
double sep_upper_bound(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Power policies
// ---------------------------------------------------------------------------

struct PowerAllocation {
    double p_idle;
    double p_busy;
    double sep;
};

/// Minimizes the Rayleigh SEP of an SSS link over 0 <= P0, P1 <= P_pk
/// subject to (1 - P_d) P0 E|g|^2 + P_d P1 E|g|^2 <= Q_avg. The SEP falls in
/// both powers, so the search runs along the active interference segment:
/// a uniform scan followed by golden-section refinement.
PowerAllocation optimize_powers_sss(const Modulation& modulation, const SensingModel& sensing,
                                    double noise_variance, const GaussianMixture& interference,
                                    const ConstraintSet& constraints);

/// min(P_pk, Q_avg / ((1 - P_d) E|g|^2)); P_pk when P_d = 1.
double max_power_osa(const ConstraintSet& constraints, double p_detect);

/// min(P_pk, Q_pk / |g|^2); P_pk when gain = 0.
double peak_power_policy(const ConstraintSet& constraints, double gain);

/// Mean of peak_power_policy over |g|^2 ~ Exp(E|g|^2).
double mean_peak_policy_power(const ConstraintSet& constraints);

// ---------------------------------------------------------------------------
// Peak interference constraint, averaged over the primary-link gain
// ---------------------------------------------------------------------------

/// Closed-form upper bound on the SEP when both decisions transmit at
/// min(P_pk, Q_pk / |g|^2) with |g|^2 exponential. SSS uses the occupancy
/// priors, OSA the idle-decision posteriors.
double sep_peak_interference(const Scenario& scenario);

/// Exact SEP under the same policy: the closed-form Rayleigh SEP averaged
/// over |g|^2 by adaptive quadrature.
double sep_peak_interference_exact(const Scenario& scenario);

}  // namespace crsep
