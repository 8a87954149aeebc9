#include "crsep/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace crsep {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int nearest_level(double coordinate, int levels, double scaled_distance) {
    // Level i owns (s_i - d/2, s_i + d/2]; s_i / d + levels / 2 = i + 1/2.
    const double position = coordinate / scaled_distance + 0.5 * levels;
    const double index = std::ceil(position) - 1.0;
    return static_cast<int>(std::clamp(index, 0.0, static_cast<double>(levels - 1)));
}

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

std::complex<double> derotate(std::complex<double> y, const FadingSample& fading) {
    return y * std::polar(1.0, -fading.phase);
}

ReceivedSample receive(std::complex<double> y, const FadingSample& fading) {
    return {y, derotate(y, fading)};
}

SymbolIndex detect_threshold(const ConstellationSpec& spec, std::complex<double> derotated,
                             double magnitude) {
    if (!(magnitude > 0.0)) throw DeepFadeError("detect_threshold: |h| = 0 carries no information");
    const double scaled = min_distance(spec) * magnitude;
    return {nearest_level(derotated.real(), spec.m_inphase, scaled),
            nearest_level(derotated.imag(), spec.m_quadrature, scaled)};
}

MapDetector::MapDetector(const ConstellationSpec& spec_idle, const ConstellationSpec& spec_busy,
                         const SensingModel& model, double noise_variance,
                         const GaussianMixture& mix)
    : noise_variance_(noise_variance), convolved_(convolve_with_gaussian(mix, noise_variance)) {
    auto make_branch = [&](const ConstellationSpec& spec, ChannelState decision) {
        Branch b{build_constellation(spec), kNegInf, kNegInf, false};
        if (decision_prob(model, decision) > 0.0) {
            b.log_post_idle = safe_log(posterior(model, ChannelState::idle, decision));
            b.log_post_busy = safe_log(posterior(model, ChannelState::busy, decision));
            b.usable = true;
        }
        return b;
    };
    idle_ = make_branch(spec_idle, ChannelState::idle);
    busy_ = make_branch(spec_busy, ChannelState::busy);
}

SymbolIndex MapDetector::detect(std::complex<double> derotated, double magnitude,
                                ChannelState decision) const {
    const Branch& branch = decision == ChannelState::busy ? busy_ : idle_;
    if (!branch.usable)
        throw ConditioningError("MapDetector: sensing decision has zero probability");

    const double log_norm = -std::log(2.0 * std::numbers::pi * noise_variance_);
    SymbolIndex best;
    double best_score = kNegInf;
    bool first = true;
    // Visit points in lexicographic (n, q) order; only a strictly larger
    // score replaces the incumbent.
    const int m_i = static_cast<int>(branch.points.back().n) + 1;
    const int m_q = static_cast<int>(branch.points.back().q) + 1;
    for (int n = 0; n < m_i; ++n) {
        for (int q = 0; q < m_q; ++q) {
            const auto& point = branch.points[static_cast<std::size_t>(q * m_i + n)];
            const std::complex<double> residual = derotated - point.amplitude * magnitude;
            double score = kNegInf;
            if (branch.log_post_idle != kNegInf)
                score = branch.log_post_idle + log_norm -
                        std::norm(residual) / (2.0 * noise_variance_);
            if (branch.log_post_busy != kNegInf)
                score = log_add(score, branch.log_post_busy + mixture_log_pdf(convolved_, residual));
            if (first || score > best_score) {
                best = {n, q};
                best_score = score;
                first = false;
            }
        }
    }
    return best;
}

SymbolIndex map_detect_numeric(const ConstellationSpec& spec_idle,
                               const ConstellationSpec& spec_busy,
                               std::complex<double> derotated, double magnitude,
                               ChannelState decision, const SensingModel& model,
                               double noise_variance, const GaussianMixture& mix) {
    return MapDetector(spec_idle, spec_busy, model, noise_variance, mix)
        .detect(derotated, magnitude, decision);
}

}  // namespace crsep
