#include "crsep/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "crsep/quadrature.hpp"
#include "crsep/special_functions.hpp"

namespace crsep {

namespace {

struct Branch {
    double power;
    double w_idle;  // Pr{decision} * Pr{idle | decision}, or the conditional form for OSA
    double w_busy;
};

/// Sensing decisions under which the scenario transmits, with the weight of
/// each true channel state.
std::vector<Branch> sensing_branches(const Scenario& s) {
    const SensingModel& m = s.sensing;
    if (s.scheme == Scheme::osa) {
        return {{s.p_idle, posterior(m, ChannelState::idle, ChannelState::idle),
                 posterior(m, ChannelState::busy, ChannelState::idle)}};
    }
    if (s.p_idle == s.p_busy) return {{s.p_idle, m.prior(ChannelState::idle), m.prior(ChannelState::busy)}};

    std::vector<Branch> branches;
    for (ChannelState k : {ChannelState::idle, ChannelState::busy}) {
        const double pk = decision_prob(m, k);
        if (pk <= 0.0) continue;
        branches.push_back({s.power(k), pk * posterior(m, ChannelState::idle, k),
                            pk * posterior(m, ChannelState::busy, k)});
    }
    return branches;
}

double linear_coefficient(const Modulation& mod) {
    return 2.0 - 1.0 / mod.m_inphase - 1.0 / mod.m_quadrature;
}

double quadratic_coefficient(const Modulation& mod) {
    return (1.0 - 1.0 / mod.m_inphase) * (1.0 - 1.0 / mod.m_quadrature);
}

/// d^2 |h|^2 / 4 for a grid of the given power.
double half_distance_sq(const Modulation& mod, double power, double magnitude) {
    return 3.0 * power * magnitude * magnitude / mod.energy_normalizer();
}

/// 2(2 - 1/M_I - 1/M_Q) Q(x) - 4(1 - 1/M_I)(1 - 1/M_Q) Q(x)^2 with x^2 = e / v.
double conditional_term(const Modulation& mod, double energy, double variance) {
    const double q = gaussian_q(std::sqrt(energy / variance));
    return 2.0 * linear_coefficient(mod) * q - 4.0 * quadratic_coefficient(mod) * q * q;
}

/// 1 / beta = sqrt(P / (P + (2/3)(M_I^2 + M_Q^2 - 2) v)), zero for a silent branch.
double inverse_beta(const Modulation& mod, double power, double variance) {
    const double k = 2.0 / 3.0 * mod.energy_normalizer();
    return std::sqrt(power / (power + k * variance));
}

void require_power(double p) {
    if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("transmit power must be finite and nonnegative");
}

}  // namespace

// ---------------------------------------------------------------------------

double sep_class_conditional(PointClass cls, const ConstellationSpec& spec, double magnitude,
                             double post_idle, double noise_variance,
                             const GaussianMixture& convolved) {
    spec.validate();
    double a = 0.0;
    double b = 0.0;
    if (spec.shape().is_pam()) {
        switch (cls) {
            case PointClass::corner: a = 1.0; break;
            case PointClass::edge: a = 2.0; break;
            case PointClass::inner:
                throw std::invalid_argument("sep_class_conditional: PAM has no inner points");
        }
    } else {
        switch (cls) {
            case PointClass::corner: a = 2.0; b = 1.0; break;
            case PointClass::edge: a = 3.0; b = 2.0; break;
            case PointClass::inner: a = 4.0; b = 4.0; break;
        }
    }
    const double energy = half_distance_sq(spec.shape(), spec.power, magnitude);
    auto term = [&](double v) {
        const double q = gaussian_q(std::sqrt(energy / v));
        return a * q - b * q * q;
    };
    double busy = 0.0;
    for (const auto& c : convolved.components()) busy += c.weight * term(c.variance);
    return post_idle * term(noise_variance) + (1.0 - post_idle) * busy;
}

double sep_conditional(const Scenario& scenario, double magnitude) {
    scenario.validate();
    if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
        throw std::invalid_argument("sep_conditional: |h| must be finite and nonnegative");
    const GaussianMixture convolved =
        convolve_with_gaussian(scenario.interference, scenario.noise_variance);

    double sep = 0.0;
    for (const Branch& br : sensing_branches(scenario)) {
        const double energy = half_distance_sq(scenario.modulation, br.power, magnitude);
        double busy = 0.0;
        for (const auto& c : convolved.components())
            busy += c.weight * conditional_term(scenario.modulation, energy, c.variance);
        sep += br.w_idle * conditional_term(scenario.modulation, energy, scenario.noise_variance) +
               br.w_busy * busy;
    }
    return sep;
}

NumericSep sep_general_numeric(const Scenario& scenario, double magnitude) {
    scenario.validate();
    if (!(magnitude > 0.0) || !std::isfinite(magnitude))
        throw std::invalid_argument("sep_general_numeric: decision regions need |h| > 0");
    const double sn2 = scenario.noise_variance;
    const GaussianMixture convolved = convolve_with_gaussian(scenario.interference, sn2);
    const double inf = std::numeric_limits<double>::infinity();

    auto gaussian_density = [sn2](double x, double y) {
        return std::exp(-(x * x + y * y) / (2.0 * sn2)) / (2.0 * std::numbers::pi * sn2);
    };
    auto mixture_density = [&convolved](double x, double y) {
        return mixture_pdf(convolved, {x, y});
    };

    const QuadratureTolerance tol{.absolute = 1e-12, .relative = 1e-11, .max_intervals = 2000};
    double correct = 0.0;
    double error = 0.0;
    const int m = scenario.modulation.order();

    for (const Branch& br : sensing_branches(scenario)) {
        const ConstellationSpec spec(scenario.modulation, br.power);
        const double step = min_distance(spec) * magnitude;
        for (const ConstellationPoint& pt : build_constellation(spec)) {
            // Decision region of the point, in coordinates relative to the
            // received point s * |h|.
            auto axis = [&](int i, int levels) {
                const double lo = i == 0 ? -inf : -0.5 * step;
                const double hi = i == levels - 1 ? inf : 0.5 * step;
                return std::pair{lo, hi};
            };
            const auto [x_lo, x_hi] = axis(pt.n, spec.m_inphase);
            const auto [y_lo, y_hi] = axis(pt.q, spec.m_quadrature);

            auto region_mass = [&](const auto& density, double variance) {
                const double reach = 12.0 * std::sqrt(variance);
                const QuadratureResult r = integrate_2d(
                    density, std::max(x_lo, -reach), std::min(x_hi, reach), std::max(y_lo, -reach),
                    std::min(y_hi, reach), tol);
                if (!r.converged)
                    throw QuadratureError("sep_general_numeric: region integral did not converge",
                                          r.error);
                error += r.error;
                return r.value;
            };
            if (br.w_idle > 0.0) correct += br.w_idle / m * region_mass(gaussian_density, sn2);
            if (br.w_busy > 0.0)
                correct += br.w_busy / m * region_mass(mixture_density, convolved.max_variance());
        }
    }
    return {1.0 - correct, error};
}

// ---------------------------------------------------------------------------

RayleighSep::RayleighSep(Scheme scheme, Modulation modulation, const SensingModel& sensing,
                         double noise_variance, const GaussianMixture& interference)
    : scheme_(scheme),
      modulation_(modulation),
      noise_variance_(noise_variance),
      convolved_(convolve_with_gaussian(interference, noise_variance)),
      linear_coef_(linear_coefficient(modulation)),
      quadratic_coef_(quadratic_coefficient(modulation)) {
    sensing.validate();
    ConstellationSpec(modulation, 1.0).validate();
    if (scheme == Scheme::osa) {
        common_ = {posterior(sensing, ChannelState::idle, ChannelState::idle),
                   posterior(sensing, ChannelState::busy, ChannelState::idle)};
        per_decision_[0] = common_;
        decision_possible_[0] = true;
        return;
    }
    common_ = {sensing.prior(ChannelState::idle), sensing.prior(ChannelState::busy)};
    for (ChannelState k : {ChannelState::idle, ChannelState::busy}) {
        const double pk = decision_prob(sensing, k);
        const auto i = static_cast<std::size_t>(k);
        if (pk <= 0.0) continue;
        decision_possible_[i] = true;
        per_decision_[i] = {pk * posterior(sensing, ChannelState::idle, k),
                            pk * posterior(sensing, ChannelState::busy, k)};
    }
}

RayleighSep::RayleighSep(const Scenario& s)
    : RayleighSep(s.scheme, s.modulation, s.sensing, s.noise_variance, s.interference) {}

double RayleighSep::branch(double power, Weights w, bool exact) const {
    // E{Q} = (1 - 1/beta) / 2 and
    // E{Q^2} = ((2/pi)(1/beta) atan(1/beta) - 1/beta + 1/2) / 2 over |h|^2 ~ Exp(1).
    auto term = [&](double variance) {
        const double ib = inverse_beta(modulation_, power, variance);
        double value = linear_coef_ * (1.0 - ib);
        if (exact)
            value -= 2.0 * quadratic_coef_ *
                     (2.0 / std::numbers::pi * ib * std::atan(ib) - ib + 0.5);
        return value;
    };
    double busy = 0.0;
    for (const auto& c : convolved_.components()) busy += c.weight * term(c.variance);
    return w.idle * term(noise_variance_) + w.busy * busy;
}

double RayleighSep::evaluate(double p_idle, double p_busy, bool exact) const {
    require_power(p_idle);
    if (scheme_ == Scheme::osa) return branch(p_idle, common_, exact);
    require_power(p_busy);
    if (p_idle == p_busy) return branch(p_idle, common_, exact);
    double sep = 0.0;
    if (decision_possible_[0]) sep += branch(p_idle, per_decision_[0], exact);
    if (decision_possible_[1]) sep += branch(p_busy, per_decision_[1], exact);
    return sep;
}

double RayleighSep::exact(double p_idle, double p_busy) const { return evaluate(p_idle, p_busy, true); }
double RayleighSep::bound(double p_idle, double p_busy) const { return evaluate(p_idle, p_busy, false); }

double RayleighSep::exact_common(double power) const {
    require_power(power);
    return branch(power, common_, true);
}

double RayleighSep::bound_common(double power) const {
    require_power(power);
    return branch(power, common_, false);
}

double sep_rayleigh_sss(const Scenario& scenario) {
    if (scenario.scheme != Scheme::sss) throw std::invalid_argument("sep_rayleigh_sss: scheme must be SSS");
    scenario.validate();
    return RayleighSep(scenario).exact(scenario.p_idle, scenario.p_busy);
}

double sep_rayleigh_osa(const Scenario& scenario) {
    if (scenario.scheme != Scheme::osa) throw std::invalid_argument("sep_rayleigh_osa: scheme must be OSA");
    scenario.validate();
    return RayleighSep(scenario).exact(scenario.p_idle, 0.0);
}

double sep_rayleigh(const Scenario& scenario) {
    return scenario.scheme == Scheme::sss ? sep_rayleigh_sss(scenario) : sep_rayleigh_osa(scenario);
}

double sep_upper_bound(const Scenario& scenario) {
    scenario.validate();
    return RayleighSep(scenario).bound(scenario.p_idle, scenario.p_busy);
}

// ---------------------------------------------------------------------------

PowerAllocation optimize_powers_sss(const Modulation& modulation, const SensingModel& sensing,
                                    double noise_variance, const GaussianMixture& interference,
                                    const ConstraintSet& constraints) {
    constraints.validate();
    if (!constraints.avg_interference)
        throw std::invalid_argument("optimize_powers_sss: needs an average interference limit");
    const RayleighSep sep(Scheme::sss, modulation, sensing, noise_variance, interference);
    const double p_pk = constraints.peak_power;
    const double budget = *constraints.avg_interference / constraints.mean_gain_to_primary;
    const double pd = sensing.p_detect;

    auto at = [&](double p0, double p1) { return PowerAllocation{p0, p1, sep.exact(p0, p1)}; };

    if (p_pk <= budget) return at(p_pk, p_pk);
    if (pd == 1.0) return at(p_pk, std::min(p_pk, budget));
    if (pd == 0.0) return at(std::min(p_pk, budget), p_pk);

    // Active segment (1 - P_d) P0 + P_d P1 = budget inside the box.
    const double lo = std::max(0.0, (budget - pd * p_pk) / (1.0 - pd));
    const double hi = std::min(p_pk, budget / (1.0 - pd));
    auto p1_of = [&](double p0) { return std::clamp((budget - (1.0 - pd) * p0) / pd, 0.0, p_pk); };
    auto f = [&](double p0) { return sep.exact(p0, p1_of(p0)); };

    constexpr int kScan = 256;
    std::vector<double> grid(kScan + 1);
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kScan; ++i) {
        grid[i] = i == kScan ? hi : lo + (hi - lo) * i / kScan;
        const double v = f(grid[i]);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }

    double a = grid[std::max(best - 1, 0)];
    double b = grid[std::min(best + 1, kScan)];
    double best_p0 = grid[best];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, hi); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    for (double cand : {c, d}) {
        const double v = f(cand);
        if (v < best_value) {
            best_value = v;
            best_p0 = cand;
        }
    }
    return at(best_p0, p1_of(best_p0));
}

double max_power_osa(const ConstraintSet& constraints, double p_detect) {
    constraints.validate();
    if (!constraints.avg_interference)
        throw std::invalid_argument("max_power_osa: needs an average interference limit");
    if (p_detect >= 1.0) return constraints.peak_power;
    const double limit =
        *constraints.avg_interference / ((1.0 - p_detect) * constraints.mean_gain_to_primary);
    return std::min(constraints.peak_power, limit);
}

double peak_power_policy(const ConstraintSet& constraints, double gain) {
    constraints.validate();
    if (!constraints.peak_interference)
        throw std::invalid_argument("peak_power_policy: needs a peak interference limit");
    if (!(gain >= 0.0)) throw std::invalid_argument("peak_power_policy: gain must be nonnegative");
    if (gain == 0.0) return constraints.peak_power;
    return std::min(constraints.peak_power, *constraints.peak_interference / gain);
}

double mean_peak_policy_power(const ConstraintSet& constraints) {
    constraints.validate();
    if (!constraints.peak_interference)
        throw std::invalid_argument("mean_peak_policy_power: needs a peak interference limit");
    // E min(P_pk, Q/y) over y ~ Exp(1) with Q scaled by the mean gain.
    const double q = *constraints.peak_interference / constraints.mean_gain_to_primary;
    const double b1 = q / constraints.peak_power;
    const double tail = b1 > 700.0 ? 0.0 : -std::expint(-b1);  // E1(b1)
    return constraints.peak_power * -std::expm1(-b1) + q * tail;
}

// ---------------------------------------------------------------------------

namespace {

struct PeakSetup {
    RayleighSep sep;
    double p_pk;
    double q_eff;  // Q_pk / E|g|^2, so that |g|^2 / E|g|^2 ~ Exp(1)
    double b1;     // Q_eff / P_pk
};

PeakSetup peak_setup(const Scenario& s) {
    s.validate();
    s.constraints.validate();
    if (!s.constraints.peak_interference)
        throw std::invalid_argument("peak interference SEP needs Q_pk");
    const double q = *s.constraints.peak_interference / s.constraints.mean_gain_to_primary;
    return {RayleighSep(s), s.constraints.peak_power, q, q / s.constraints.peak_power};
}

}  // namespace

double sep_peak_interference(const Scenario& scenario) {
    const PeakSetup setup = peak_setup(scenario);
    const Modulation& mod = scenario.modulation;
    const double k = 2.0 / 3.0 * mod.energy_normalizer();
    const double tail_weight = std::exp(-setup.b1);

    // Over y > b1 the power is Q/y; with gamma = Q / (k v),
    //   int_{b1}^inf (1 - 1/beta(Q/y)) e^{-y} dy
    //     = e^{-b1} - sqrt(pi gamma) e^{gamma} erfc(sqrt(gamma + b1))
    //     = e^{-b1} (1 - sqrt(pi gamma) erfcx(sqrt(gamma + b1))).
    auto tail = [&](double variance) {
        if (tail_weight == 0.0) return 0.0;
        const double gamma = setup.q_eff / (k * variance);
        return tail_weight *
               (1.0 - std::sqrt(std::numbers::pi * gamma) * scaled_erfc(std::sqrt(gamma + setup.b1)));
    };

    SensingModel m = scenario.sensing;
    double w_idle = m.prior(ChannelState::idle);
    double w_busy = m.prior(ChannelState::busy);
    if (scenario.scheme == Scheme::osa) {
        w_idle = posterior(m, ChannelState::idle, ChannelState::idle);
        w_busy = posterior(m, ChannelState::busy, ChannelState::idle);
    }
    const GaussianMixture convolved =
        convolve_with_gaussian(scenario.interference, scenario.noise_variance);
    double busy = 0.0;
    for (const auto& c : convolved.components()) busy += c.weight * tail(c.variance);
    const double capped = -std::expm1(-setup.b1) * setup.sep.bound_common(setup.p_pk);
    return capped + linear_coefficient(mod) * (w_idle * tail(scenario.noise_variance) + w_busy * busy);
}

double sep_peak_interference_exact(const Scenario& scenario) {
    const PeakSetup setup = peak_setup(scenario);
    const double capped = -std::expm1(-setup.b1) * setup.sep.exact_common(setup.p_pk);
    if (std::exp(-setup.b1) == 0.0) return capped;
    auto integrand = [&](double s) {
        const double y = setup.b1 + s;
        return setup.sep.exact_common(setup.q_eff / y) * std::exp(-y);
    };
    const QuadratureResult r = integrate(integrand, 0.0, 60.0, {.absolute = 1e-14, .relative = 1e-12});
    if (!r.converged)
        throw QuadratureError("sep_peak_interference_exact: gain average did not converge", r.error);
    return capped + r.value;
}

}  // namespace crsep
