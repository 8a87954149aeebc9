#include "crsep/gaussian_mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace crsep {

GaussianMixture::GaussianMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("mixture: at least one component required");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
            throw std::invalid_argument("mixture: weights must be nonnegative");
        if (!(c.variance > 0.0) || !std::isfinite(c.variance))
            throw std::invalid_argument("mixture: variances must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("mixture: weights must sum to 1 (got " + std::to_string(total) +
                                    ")");
    cumulative_.reserve(components_.size());
    double acc = 0.0;
    for (const auto& c : components_) cumulative_.push_back(acc += c.weight);
    cumulative_.back() = 1.0;
}

GaussianMixture GaussianMixture::gaussian(double variance) {
    return GaussianMixture({{1.0, variance}});
}

GaussianMixture GaussianMixture::four_component_preset() {
    return GaussianMixture({{0.25, 0.2}, {0.25, 0.4}, {0.25, 0.6}, {0.25, 0.8}});
}

double GaussianMixture::max_variance() const {
    double v = 0.0;
    for (const auto& c : components_) v = std::max(v, c.variance);
    return v;
}

GaussianMixture convolve_with_gaussian(const GaussianMixture& mix, double noise_variance) {
    if (!(noise_variance > 0.0) || !std::isfinite(noise_variance))
        throw std::invalid_argument("convolve_with_gaussian: noise variance must be positive");
    std::vector<MixtureComponent> shifted(mix.components().begin(), mix.components().end());
    for (auto& c : shifted) c.variance += noise_variance;
    return GaussianMixture(std::move(shifted));
}

double mixture_pdf(const GaussianMixture& mix, std::complex<double> sample) {
    const double r2 = std::norm(sample);
    double density = 0.0;
    for (const auto& c : mix.components())
        density += c.weight / (2.0 * std::numbers::pi * c.variance) * std::exp(-r2 / (2.0 * c.variance));
    return density;
}

double mixture_log_pdf(const GaussianMixture& mix, std::complex<double> sample) {
    const double r2 = std::norm(sample);
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& c : mix.components()) {
        if (c.weight == 0.0) continue;
        peak = std::max(peak, std::log(c.weight / (2.0 * std::numbers::pi * c.variance)) -
                                  r2 / (2.0 * c.variance));
    }
    double sum = 0.0;
    for (const auto& c : mix.components()) {
        if (c.weight == 0.0) continue;
        sum += std::exp(std::log(c.weight / (2.0 * std::numbers::pi * c.variance)) -
                        r2 / (2.0 * c.variance) - peak);
    }
    return peak + std::log(sum);
}

double mixture_total_variance(const GaussianMixture& mix) {
    double total = 0.0;
    for (const auto& c : mix.components()) total += c.weight * c.variance;
    return total;
}

std::complex<double> sample_mixture(const GaussianMixture& mix, RandomStream& rng) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(mix.cumulative_.begin(), mix.cumulative_.end(), u);
    const auto l = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - mix.cumulative_.begin(), static_cast<std::ptrdiff_t>(mix.size()) - 1));
    return rng.complex_normal(mix.components_[l].variance);
}

}  // namespace crsep
