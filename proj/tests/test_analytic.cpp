#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "crsep/analytic.hpp"
#include "crsep/special_functions.hpp"
#include "oracles.hpp"

using namespace crsep;

namespace {

const SensingModel kTypical{0.9, 0.05, 0.4};
const SensingModel kPerfect{1.0, 0.0, 0.4};

Scenario make(Scheme scheme, Modulation mod, double p0, double p1, SensingModel sensing = kTypical,
              GaussianMixture mix = GaussianMixture::four_component_preset()) {
    Scenario s;
    s.scheme = scheme;
    s.modulation = mod;
    s.p_idle = p0;
    s.p_busy = scheme == Scheme::osa ? 0.0 : p1;
    s.sensing = sensing;
    s.noise_variance = 0.01;
    s.interference = std::move(mix);
    return s;
}

const Modulation kShapes[] = {{2, 1}, {4, 1}, {8, 1}, {2, 2}, {8, 2}, {4, 4}, {1, 4}};

}  // namespace

TEST(ClassConditional, Examples) {
    const auto conv = convolve_with_gaussian(GaussianMixture::four_component_preset(), 0.01);
    EXPECT_DOUBLE_EQ(sep_class_conditional(PointClass::corner, {2, 2, 1.0}, 0.0, 0.3, 0.01, conv), 0.75);
    EXPECT_DOUBLE_EQ(sep_class_conditional(PointClass::inner, {4, 4, 1.0}, 0.0, 0.3, 0.01, conv), 1.0);
    const double q = gaussian_q(std::sqrt(50.0));
    const double got = sep_class_conditional(PointClass::corner, {2, 2, 1.0}, 1.0, 1.0, 0.01, conv);
    EXPECT_NEAR(got, 2 * q - q * q, 1e-24);
    EXPECT_NEAR(got, 1.54e-12, 0.01e-12);
    EXPECT_THROW(sep_class_conditional(PointClass::inner, {8, 1, 1.0}, 1.0, 1.0, 0.01, conv),
                 std::invalid_argument);
}

TEST(Conditional, ZeroFadingGivesChanceLevel) {
    for (const auto& mod : kShapes)
        for (Scheme scheme : {Scheme::sss, Scheme::osa}) {
            const auto s = make(scheme, mod, 1.3, 0.4);
            EXPECT_NEAR(sep_conditional(s, 0.0), 1.0 - 1.0 / mod.order(), 1e-15) << mod.label();
        }
}

TEST(Conditional, ClassWeightedSum) {
    for (const auto& mod : kShapes) {
        const auto s = make(Scheme::sss, mod, 2.5119, 2.5119);
        const auto conv = convolve_with_gaussian(s.interference, s.noise_variance);
        const ConstellationSpec spec(mod, s.p_idle);
        for (double mag : {0.3, 1.0, 2.0}) {
            double weighted = 0.0;
            for (auto cls : {PointClass::corner, PointClass::edge, PointClass::inner}) {
                const int count = class_count(mod, cls);
                if (count == 0) continue;
                weighted += count * sep_class_conditional(cls, spec, mag, 0.6, s.noise_variance, conv);
            }
            weighted /= mod.order();
            EXPECT_NEAR(sep_conditional(s, mag), weighted, 1e-14) << mod.label() << " |h|=" << mag;
            EXPECT_NEAR(sep_conditional(s, mag), oracle::conditional_sep(s, s.p_idle, s.p_busy, mag * mag), 1e-14);
        }
    }
}

TEST(Conditional, DecreasesWithPower) {
    auto s = make(Scheme::osa, {8, 2}, 0.0, 0.0, kPerfect);
    double prev = 1.0;
    for (double p = 0.01; p < 1e4; p *= 2) {
        s.p_idle = p;
        const double v = sep_conditional(s, 1.0);
        if (prev > 0.0) EXPECT_LT(v, prev);
        else EXPECT_EQ(v, 0.0);  // underflowed
        prev = v;
    }
    EXPECT_LT(prev, 1e-12);
}

TEST(GeneralNumeric, MatchesClosedFormConditional) {
    for (const auto& mod : {Modulation{2, 2}, Modulation{8, 2}, Modulation{4, 1}}) {
        for (Scheme scheme : {Scheme::sss, Scheme::osa}) {
            const auto s = make(scheme, mod, 1.0, 0.3);
            for (double mag : {0.5, 1.0}) {
                const NumericSep num = sep_general_numeric(s, mag);
                EXPECT_NEAR(num.value, sep_conditional(s, mag), 1e-8) << mod.label() << " " << mag;
            }
        }
    }
}

TEST(GeneralNumeric, TwoPamMatchesQExpression) {
    const auto s = make(Scheme::sss, {2, 1}, 0.8, 0.8);
    const double mag = 0.9;
    const double d = std::sqrt(12 * 0.8 / 3.0);
    const double arg = d * mag / 2;
    double expected = 0.6 * oracle::q_function(arg / std::sqrt(0.01));
    for (const auto& c : s.interference.components())
        expected += 0.4 * c.weight * oracle::q_function(arg / std::sqrt(c.variance + 0.01));
    EXPECT_NEAR(sep_general_numeric(s, mag).value, expected, 1e-9);
}

TEST(GeneralNumeric, NoiselessIdleChannelIsErrorFree) {
    auto s = make(Scheme::sss, {4, 4}, 1.0, 1.0, {1.0, 0.0, 0.0});
    s.noise_variance = 1e-6;
    EXPECT_NEAR(sep_general_numeric(s, 1.0).value, 0.0, 1e-10);
    EXPECT_THROW(sep_general_numeric(s, 0.0), std::invalid_argument);
}

TEST(Rayleigh, MatchesFadingAverageOracle) {
    for (const auto& mod : kShapes) {
        for (auto [p0, p1] : {std::pair{2.5119, 2.5119}, {1.0, 0.1}, {0.05, 2.0}, {30.0, 7.0}}) {
            const auto sss = make(Scheme::sss, mod, p0, p1);
            EXPECT_NEAR(sep_rayleigh_sss(sss), oracle::rayleigh_average(sss, p0, p1), 1e-9) << mod.label();
            EXPECT_NEAR(sep_upper_bound(sss), oracle::rayleigh_average(sss, p0, p1, true), 1e-9);
            const auto osa = make(Scheme::osa, mod, p0, 0.0);
            EXPECT_NEAR(sep_rayleigh_osa(osa), oracle::rayleigh_average(osa, p0, 0.0), 1e-9) << mod.label();
        }
    }
}

TEST(Rayleigh, OsaFalseAlarmOne) {
    const auto osa = make(Scheme::osa, {2, 2}, 1.0, 0.0, {0.9, 1.0, 0.4});
    EXPECT_NEAR(posterior(osa.sensing, ChannelState::busy, ChannelState::idle), 1.0, 0.0);
    EXPECT_NEAR(sep_rayleigh_osa(osa), oracle::rayleigh_average(osa, 1.0, 0.0), 1e-9);
}

TEST(Rayleigh, PerfectSensingOsaIsGaussianRayleighSep) {
    // 4-QAM over Rayleigh fading in Gaussian noise, in the textbook form
    // E{Q(sqrt(2 g X))} = (1 - mu) / 2 and E{Q^2(sqrt(2 g X))} = 1/4 - (mu / pi) atan(1 / mu),
    // mu = sqrt(g / (1 + g)), X ~ Exp(1).
    const double p = 2.0;
    const auto osa = make(Scheme::osa, {2, 2}, p, 0.0, kPerfect);
    const double g = p / (4 * 0.01);  // d^2 / (8 sigma^2) with d^2 = 2P
    const double mu = std::sqrt(g / (1 + g));
    const double eq = 0.5 * (1 - mu);
    const double eq2 = 0.25 - mu / std::numbers::pi * std::atan(1 / mu);
    EXPECT_NEAR(sep_rayleigh_osa(osa), 2 * eq - eq2, 1e-14);
}

TEST(Rayleigh, ZeroPowerLimit) {
    for (const auto& mod : kShapes) {
        const auto s = make(Scheme::sss, mod, 1e-14, 1e-14);
        EXPECT_NEAR(sep_rayleigh_sss(s), 1.0 - 1.0 / mod.order(), 1e-6);
        const auto z = make(Scheme::sss, mod, 0.0, 0.0);
        EXPECT_NEAR(sep_rayleigh_sss(z), 1.0 - 1.0 / mod.order(), 1e-15);
    }
    EXPECT_THROW(sep_rayleigh_sss(make(Scheme::sss, {2, 2}, -1.0, 1.0)), std::invalid_argument);
}

TEST(Rayleigh, SingleComponentReduction) {
    // A mixture of identical components is the single Gaussian.
    const auto split = GaussianMixture({{0.3, 0.5}, {0.7, 0.5}});
    const auto one = GaussianMixture::gaussian(0.5);
    for (const auto& mod : kShapes) {
        const double a = sep_rayleigh_sss(make(Scheme::sss, mod, 1.2, 0.3, kTypical, split));
        const double b = sep_rayleigh_sss(make(Scheme::sss, mod, 1.2, 0.3, kTypical, one));
        EXPECT_NEAR(a, b, 1e-15);
    }
}

TEST(Rayleigh, StrictlyDecreasingInEachPower) {
    for (const auto& mod : kShapes) {
        const RayleighSep sep(Scheme::sss, mod, kTypical, 0.01, GaussianMixture::four_component_preset());
        for (double fixed : {0.1, 1.0, 10.0}) {
            double prev0 = 1.0, prev1 = 1.0;
            for (double p = 0.01; p < 100; p *= 1.5) {
                const double v0 = sep.exact(p, fixed);
                const double v1 = sep.exact(fixed, p);
                EXPECT_LT(v0, prev0);
                EXPECT_LT(v1, prev1);
                prev0 = v0;
                prev1 = v1;
            }
        }
    }
}

TEST(Rayleigh, EqualPowersCollapseToPriors) {
    const auto a = make(Scheme::sss, {8, 2}, 1.7, 1.7, kTypical);
    const auto b = make(Scheme::sss, {8, 2}, 1.7, 1.7, kPerfect);
    EXPECT_EQ(sep_rayleigh_sss(a), sep_rayleigh_sss(b));
}

TEST(Bound, PamIsExactAndQamIsAbove) {
    for (const auto& mod : kShapes) {
        for (auto [p0, p1] : {std::pair{2.5119, 2.5119}, {1.0, 0.1}, {0.01, 4.0}}) {
            for (Scheme scheme : {Scheme::sss, Scheme::osa}) {
                const auto s = make(scheme, mod, p0, p1);
                const double exact = sep_rayleigh(s);
                const double bound = sep_upper_bound(s);
                if (mod.is_pam()) EXPECT_NEAR(bound, exact, 1e-12) << mod.label();
                else EXPECT_GT(bound, exact) << mod.label();
            }
        }
    }
    const auto s = make(Scheme::sss, {8, 2}, 2.5119, 2.5119);
    const double gap = sep_upper_bound(s) - sep_rayleigh(s);
    EXPECT_GT(gap, 1e-4);
    RecordProperty("bound_gap_8x2", std::to_string(gap));
}

TEST(Bound, MixtureBelowEqualVarianceGaussian) {
    const auto mix = GaussianMixture::four_component_preset();
    const auto gauss = GaussianMixture::gaussian(mixture_total_variance(mix));
    for (const auto& mod : kShapes)
        for (double p : {0.05, 0.5, 2.5119, 20.0}) {
            EXPECT_LT(sep_rayleigh(make(Scheme::sss, mod, p, p / 3, kTypical, mix)),
                      sep_rayleigh(make(Scheme::sss, mod, p, p / 3, kTypical, gauss)));
            EXPECT_LT(sep_rayleigh(make(Scheme::osa, mod, p, 0, kTypical, mix)),
                      sep_rayleigh(make(Scheme::osa, mod, p, 0, kTypical, gauss)));
        }
}

// ---------------------------------------------------------------------------

namespace {

ConstraintSet average_limits(double p_pk, double q_avg, double gain = 1.0) {
    ConstraintSet c;
    c.peak_power = p_pk;
    c.avg_interference = q_avg;
    c.mean_gain_to_primary = gain;
    return c;
}

ConstraintSet peak_limits(double p_pk, double q_pk, double gain = 1.0) {
    ConstraintSet c;
    c.peak_power = p_pk;
    c.peak_interference = q_pk;
    c.mean_gain_to_primary = gain;
    return c;
}

}  // namespace

TEST(Optimizer, MatchesGridSearch) {
    const auto mix = GaussianMixture::four_component_preset();
    for (const auto& mod : {Modulation{2, 2}, Modulation{8, 1}, Modulation{8, 2}}) {
        for (auto [pd, pf] : {std::pair{0.9, 0.05}, {0.6, 0.3}, {0.9, 0.95}}) {
            const SensingModel sensing{pd, pf, 0.4};
            const auto limits = average_limits(2.5119, 0.1, 1.3);
            const PowerAllocation opt = optimize_powers_sss(mod, sensing, 0.01, mix, limits);
            const double budget = 0.1 / 1.3;
            EXPECT_LE((1 - pd) * opt.p_idle + pd * opt.p_busy, budget * (1 + 1e-12));
            EXPECT_LE(opt.p_idle, 2.5119);
            EXPECT_LE(opt.p_busy, 2.5119);

            EXPECT_EQ(opt.sep, sep_rayleigh_sss(make(Scheme::sss, mod, opt.p_idle, opt.p_busy, sensing, mix)));

            // 2000 x 2000 grid of the box, feasible points only.
            const RayleighSep closed(Scheme::sss, mod, sensing, 0.01, mix);
            double grid_best = 1.0;
            const int n = 2000;
            for (int i = 0; i <= n; ++i) {
                const double p0 = 2.5119 * i / n;
                for (int j = 0; j <= n; ++j) {
                    const double p1 = 2.5119 * j / n;
                    if ((1 - pd) * p0 + pd * p1 > budget) break;
                    grid_best = std::min(grid_best, closed.exact(p0, p1));
                }
            }
            EXPECT_LE(opt.sep, grid_best + 1e-15);

            // Dense scan of the active boundary.
            double line_best = 1.0;
            const double lo = std::max(0.0, (budget - pd * 2.5119) / (1 - pd));
            const double hi = std::min(2.5119, budget / (1 - pd));
            for (int i = 0; i <= 200000; ++i) {
                const double p0 = lo + (hi - lo) * i / 200000.0;
                const double p1 = std::clamp((budget - (1 - pd) * p0) / pd, 0.0, 2.5119);
                line_best = std::min(line_best, closed.exact(p0, p1));
            }
            EXPECT_LE(opt.sep, line_best + 1e-15);
            EXPECT_NEAR(opt.sep, line_best, 1e-8) << mod.label() << " pd=" << pd << " pf=" << pf;
        }
    }
}

TEST(Optimizer, SpecialCases) {
    const auto mix = GaussianMixture::four_component_preset();
    const auto loose = optimize_powers_sss({2, 2}, kTypical, 0.01, mix, average_limits(2.5119, 10.0));
    EXPECT_EQ(loose.p_idle, 2.5119);
    EXPECT_EQ(loose.p_busy, 2.5119);

    const auto perfect = optimize_powers_sss({2, 2}, kPerfect, 0.01, mix, average_limits(2.5119, 0.1));
    EXPECT_EQ(perfect.p_idle, 2.5119);
    EXPECT_NEAR(perfect.p_busy, 0.1, 1e-15);
    EXPECT_THROW(optimize_powers_sss({2, 2}, kPerfect, 0.01, mix, peak_limits(1, 1)), std::invalid_argument);
}

TEST(Optimizer, BusyPowerOvertakesIdleAtHighFalseAlarm) {
    const auto mix = GaussianMixture::four_component_preset();
    const auto limits = average_limits(2.5119, 0.1);
    const auto low = optimize_powers_sss({2, 2}, {0.9, 0.05, 0.4}, 0.01, mix, limits);
    EXPECT_GT(low.p_idle, low.p_busy);
    for (double pf : {0.95, 1.0}) {
        const auto high = optimize_powers_sss({2, 2}, {0.9, pf, 0.4}, 0.01, mix, limits);
        EXPECT_GT(high.p_busy, high.p_idle) << pf;
    }
}

TEST(PowerRules, OsaMaximumPower) {
    EXPECT_NEAR(max_power_osa(average_limits(2.5119, 0.1), 0.9), 1.0, 1e-12);
    EXPECT_EQ(max_power_osa(average_limits(2.5119, 0.1), 1.0), 2.5119);
    EXPECT_EQ(max_power_osa(average_limits(2.5119, 1e9), 0.9), 2.5119);
    EXPECT_NEAR(max_power_osa(average_limits(2.5119, 0.1, 2.0), 0.9), 0.5, 1e-12);
}

TEST(PowerRules, PeakPolicy) {
    EXPECT_EQ(peak_power_policy(peak_limits(2.5119, 1.0), 0.25), 2.5119);
    EXPECT_EQ(peak_power_policy(peak_limits(2.5119, 1.0), 4.0), 0.25);
    EXPECT_EQ(peak_power_policy(peak_limits(2.0, 1.0), 0.5), 2.0);
    EXPECT_EQ(peak_power_policy(peak_limits(2.0, 1.0), 0.0), 2.0);
    EXPECT_THROW(peak_power_policy(average_limits(2.0, 1.0), 1.0), std::invalid_argument);
}

TEST(PowerRules, MeanPeakPolicyPower) {
    for (auto [ppk, qpk, gain] : {std::tuple{2.5119, 2.5119, 1.0}, {10.0, 1.0, 1.0}, {1.0, 3.0, 0.5}}) {
        const auto c = peak_limits(ppk, qpk, gain);
        const double q = qpk / gain;
        const double numeric =
            oracle::integrate([&](double y) { return std::min(ppk, q / y) * std::exp(-y); }, 0.0, q / ppk) +
            oracle::integrate([&](double y) { return std::min(ppk, q / y) * std::exp(-y); }, q / ppk, 80.0);
        EXPECT_NEAR(mean_peak_policy_power(c), numeric, 1e-10);
    }
}

TEST(PeakInterference, ClosedFormMatchesOracle) {
    for (const auto& mod : {Modulation{2, 2}, Modulation{8, 1}, Modulation{8, 2}}) {
        for (Scheme scheme : {Scheme::sss, Scheme::osa}) {
            for (auto [ppk, qpk] : {std::pair{2.5119, 2.5119}, {2.5119, 1.0}, {10.0, 2.5119}, {0.5, 4.0}}) {
                Scenario s = make(scheme, mod, 1.0, 1.0);
                s.policy = PowerPolicy::peak_interference;
                s.constraints = peak_limits(ppk, qpk, 0.8);
                EXPECT_NEAR(sep_peak_interference(s), oracle::peak_average(s, true), 1e-8) << mod.label();
                EXPECT_NEAR(sep_peak_interference_exact(s), oracle::peak_average(s, false), 1e-8) << mod.label();
                if (mod.is_pam())
                    EXPECT_NEAR(sep_peak_interference(s), sep_peak_interference_exact(s), 1e-12);
                else
                    EXPECT_GT(sep_peak_interference(s), sep_peak_interference_exact(s));
            }
        }
    }
}

TEST(PeakInterference, LooseLimitReducesToPeakPowerBound) {
    Scenario s = make(Scheme::sss, {8, 2}, 2.5119, 2.5119);
    s.policy = PowerPolicy::peak_interference;
    s.constraints = peak_limits(2.5119, 1e6);
    EXPECT_NEAR(sep_peak_interference(s), sep_upper_bound(s), 1e-12);
}

TEST(PeakInterference, SssIgnoresSensingQuality) {
    for (const auto& mod : kShapes) {
        Scenario a = make(Scheme::sss, mod, 1.0, 1.0, {0.9, 0.05, 0.4});
        Scenario b = make(Scheme::sss, mod, 1.0, 1.0, {1.0, 0.0, 0.4});
        for (Scenario* s : {&a, &b}) {
            s->policy = PowerPolicy::peak_interference;
            s->constraints = peak_limits(2.5119, 2.5119);
        }
        EXPECT_EQ(sep_peak_interference(a), sep_peak_interference(b));
        EXPECT_EQ(sep_peak_interference_exact(a), sep_peak_interference_exact(b));
    }
}
