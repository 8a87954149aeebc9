#pragma once

#include <complex>
#include <span>
#include <vector>

#include "crsep/random.hpp"

namespace crsep {

struct MixtureComponent {
    double weight;
    double variance;  // per-axis
};

/// Weighted sum of zero-mean circularly-symmetric complex Gaussians,
///   f(w) = sum_l weight_l / (2 pi v_l) * exp(-|w|^2 / (2 v_l)).
/// Weights are nonnegative and sum to one within 1e-12; variances are
/// positive. Construction throws std::invalid_argument otherwise.
class GaussianMixture {
  public:
    explicit GaussianMixture(std::vector<MixtureComponent> components);

    /// Single component (p = 1): the pure Gaussian case.
    static GaussianMixture gaussian(double variance);

    /// Four equal-weight components with variances 0.2, 0.4, 0.6, 0.8
    /// (total per-axis variance 0.5).
    static GaussianMixture four_component_preset();

    std::span<const MixtureComponent> components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    double max_variance() const;

  private:
    std::vector<MixtureComponent> components_;
    std::vector<double> cumulative_;  // for component selection in sampling

    friend std::complex<double> sample_mixture(const GaussianMixture&, RandomStream&);
};

/// Distribution of n + w for Gaussian n of the given per-axis variance:
/// same weights, every component variance shifted by noise_variance.
GaussianMixture convolve_with_gaussian(const GaussianMixture& mix, double noise_variance);

double mixture_pdf(const GaussianMixture& mix, std::complex<double> sample);

/// log of mixture_pdf, stable far in the tails where the density underflows.
double mixture_log_pdf(const GaussianMixture& mix, std::complex<double> sample);

/// Per-axis variance sum_l weight_l * v_l.
double mixture_total_variance(const GaussianMixture& mix);

std::complex<double> sample_mixture(const GaussianMixture& mix, RandomStream& rng);

}  // namespace crsep
