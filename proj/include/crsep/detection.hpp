#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "crsep/gaussian_mixture.hpp"
#include "crsep/modulation.hpp"
#include "crsep/sensing.hpp"

namespace crsep {

/// Secondary-link fading coefficient h in polar form, known to the receiver.
struct FadingSample {
    double magnitude = 1.0;  // |h| >= 0
    double phase = 0.0;      // theta_h in [-pi, pi)

    static FadingSample from_complex(std::complex<double> h) { return {std::abs(h), std::arg(h)}; }
};

struct ReceivedSample {
    std::complex<double> value;      // y
    std::complex<double> derotated;  // y * exp(-j theta_h)
};

struct SymbolIndex {
    int n = 0;
    int q = 0;
    bool operator==(const SymbolIndex&) const = default;
};

/// |h| = 0: the received signal carries no information about the symbol.
class DeepFadeError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// y * exp(-j theta_h).
std::complex<double> derotate(std::complex<double> y, const FadingSample& fading);

ReceivedSample receive(std::complex<double> y, const FadingSample& fading);

/// Midpoint-threshold detector: on each axis, the grid level whose scaled
/// amplitude s * |h| is nearest the received coordinate. A coordinate
/// exactly on a midpoint goes to the lower index. Throws DeepFadeError when
/// magnitude == 0.
SymbolIndex detect_threshold(const ConstellationSpec& spec, std::complex<double> derotated,
                             double magnitude);

/// Brute-force MAP detector over all M points, using the posterior-weighted
/// sum of the Gaussian (idle) and noise-convolved mixture (busy) likelihoods.
/// Precomputes the convolved mixture and the constellations once; intended
/// as a reference for detect_threshold.
class MapDetector {
  public:
    MapDetector(const ConstellationSpec& spec_idle, const ConstellationSpec& spec_busy,
                const SensingModel& model, double noise_variance, const GaussianMixture& mix);

    /// Ties go to the lexicographically smallest (n, q).
    SymbolIndex detect(std::complex<double> derotated, double magnitude,
                       ChannelState decision) const;

  private:
    struct Branch {
        std::vector<ConstellationPoint> points;
        double log_post_idle;  // -inf when the posterior is zero
        double log_post_busy;
        bool usable;
    };
    Branch idle_;
    Branch busy_;
    double noise_variance_;
    GaussianMixture convolved_;
};

/// One-shot form of MapDetector::detect; convolves the mixture on each call.
SymbolIndex map_detect_numeric(const ConstellationSpec& spec_idle,
                               const ConstellationSpec& spec_busy,
                               std::complex<double> derotated, double magnitude,
                               ChannelState decision, const SensingModel& model,
                               double noise_variance, const GaussianMixture& mix);

}  // namespace crsep
