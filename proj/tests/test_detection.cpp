#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "crsep/detection.hpp"
#include "crsep/random.hpp"

using namespace crsep;

namespace {

const SensingModel kTypical{0.9, 0.05, 0.4};
constexpr double kNoise = 0.01;

}  // namespace

TEST(Derotate, Examples) {
    const auto a = derotate({1.0, 0.0}, {1.0, 0.0});
    EXPECT_NEAR(a.real(), 1.0, 1e-15);
    EXPECT_NEAR(a.imag(), 0.0, 1e-15);
    const auto b = derotate({0.0, 1.0}, {1.0, std::numbers::pi / 2});
    EXPECT_NEAR(b.real(), 1.0, 1e-15);
    EXPECT_NEAR(b.imag(), 0.0, 1e-15);
}

TEST(Derotate, Isometry) {
    RandomStream rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        const std::complex<double> y = rng.complex_normal(3.0);
        const FadingSample f{rng.exponential(), (rng.uniform() * 2 - 1) * std::numbers::pi};
        const auto r = receive(y, f);
        EXPECT_EQ(r.value, y);
        EXPECT_NEAR(std::abs(r.derotated), std::abs(y), 1e-12);
    }
}

TEST(DetectThreshold, NoiselessPointsRecovered) {
    for (auto [mi, mq] : {std::pair{2, 2}, {8, 2}, {8, 1}, {1, 4}, {4, 4}}) {
        const ConstellationSpec spec{mi, mq, 1.0};
        for (const auto& p : build_constellation(spec)) {
            const auto idx = detect_threshold(spec, p.amplitude * 0.7, 0.7);
            EXPECT_EQ(idx, (SymbolIndex{p.n, p.q}));
        }
    }
}

TEST(DetectThreshold, Examples) {
    EXPECT_EQ(detect_threshold({2, 1, 1.0}, {-0.01, 0.0}, 0.5), (SymbolIndex{0, 0}));
    EXPECT_EQ(detect_threshold({2, 1, 1.0}, {0.01, 0.0}, 0.5), (SymbolIndex{1, 0}));
    // Exactly on the midpoint: lower index.
    EXPECT_EQ(detect_threshold({2, 1, 1.0}, {0.0, 0.0}, 0.5), (SymbolIndex{0, 0}));
    EXPECT_EQ(detect_threshold({4, 1, 1.0}, {100.0, -3.0}, 1.0), (SymbolIndex{3, 0}));
    EXPECT_THROW(detect_threshold({2, 2, 1.0}, {0.3, 0.2}, 0.0), DeepFadeError);
}

TEST(DetectThreshold, ScaleEquivariance) {
    RandomStream rng(9, 0);
    const ConstellationSpec spec{8, 2, 1.3};
    for (int i = 0; i < 20000; ++i) {
        const std::complex<double> y = rng.complex_normal(2.0);
        const double mag = rng.exponential() + 0.01;
        for (double c : {0.25, 4.0, 1024.0})  // powers of two keep the arithmetic exact
            ASSERT_EQ(detect_threshold(spec, c * y, c * mag), detect_threshold(spec, y, mag));
    }
}

TEST(MapDetector, TieRuleMatchesThreshold) {
    const ConstellationSpec spec{2, 2, 1.0};
    const auto mix = GaussianMixture::four_component_preset();
    for (std::complex<double> y : {std::complex<double>{0, 0}, {0.0, 0.5}, {-0.5, 0.0}}) {
        for (auto dec : {ChannelState::idle, ChannelState::busy})
            EXPECT_EQ(map_detect_numeric(spec, spec, y, 1.0, dec, kTypical, kNoise, mix),
                      detect_threshold(spec, y, 1.0));
    }
}

TEST(MapDetector, PerfectSensingIdleIsNearestNeighbor) {
    const SensingModel perfect{1.0, 0.0, 0.4};
    const ConstellationSpec spec{4, 4, 1.0};
    const auto mix = GaussianMixture::four_component_preset();
    const MapDetector det(spec, spec, perfect, kNoise, mix);
    RandomStream rng(4, 0);
    for (int i = 0; i < 20000; ++i) {
        const std::complex<double> y = rng.complex_normal(1.0);
        const SymbolIndex got = det.detect(y, 0.8, ChannelState::idle);
        // Brute-force nearest point.
        double best = INFINITY;
        SymbolIndex want;
        for (const auto& p : build_constellation(spec)) {
            const double dist = std::abs(y - 0.8 * p.amplitude);
            if (dist < best) {
                best = dist;
                want = {p.n, p.q};
            }
        }
        ASSERT_EQ(got, want);
    }
}

TEST(MapDetector, ZeroProbabilityDecisionThrows) {
    const SensingModel never_busy{1.0, 0.0, 0.0};
    const ConstellationSpec spec{2, 2, 1.0};
    const MapDetector det(spec, spec, never_busy, kNoise, GaussianMixture::four_component_preset());
    EXPECT_THROW(det.detect({0.1, 0.1}, 1.0, ChannelState::busy), ConditioningError);
    EXPECT_NO_THROW(det.detect({0.1, 0.1}, 1.0, ChannelState::idle));
}

TEST(MapDetector, AgreesWithThresholdOn8x2) {
    const ConstellationSpec idle{8, 2, 2.0};
    const ConstellationSpec busy{8, 2, 0.4};
    const auto mix = GaussianMixture::four_component_preset();
    const MapDetector det(idle, busy, kTypical, kNoise, mix);
    RandomStream rng(21, 0);
    int compared = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto dec = i % 2 ? ChannelState::busy : ChannelState::idle;
        const ConstellationSpec& spec = dec == ChannelState::busy ? busy : idle;
        const double mag = std::abs(rng.complex_normal(0.5));
        const auto pts = build_constellation(spec);
        const auto& s = pts[rng.index(std::uint32_t(pts.size()))];
        const std::complex<double> y = mag * s.amplitude + rng.complex_normal(0.3);
        if (mag < 1e-6) continue;
        ASSERT_EQ(det.detect(y, mag, dec), detect_threshold(spec, y, mag)) << i;
        ++compared;
    }
    EXPECT_GT(compared, 99000);
}
