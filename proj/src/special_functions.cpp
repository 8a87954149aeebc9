#include "crsep/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "crsep/quadrature.hpp"

namespace crsep {

double gaussian_q(double x) {
    if (!std::isfinite(x)) throw std::domain_error("gaussian_q: argument must be finite");
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double craig_q_numeric(double x, bool squared) {
    if (!(x >= 0.0)) throw std::domain_error("craig_q_numeric: argument must be nonnegative");
    const double upper = squared ? std::numbers::pi / 4 : std::numbers::pi / 2;
    if (x == 0.0) return upper / std::numbers::pi;

    const double half_x2 = 0.5 * x * x;
    auto integrand = [half_x2](double phi) {
        const double s = std::sin(phi);
        return std::exp(-half_x2 / (s * s));
    };
    const QuadratureResult r =
        integrate(integrand, 0.0, upper, {.absolute = 1e-300, .relative = 1e-10});
    return r.value / std::numbers::pi;
}

double scaled_erfc(double x) {
    if (!(x >= 0.0)) throw std::domain_error("scaled_erfc: argument must be nonnegative");
    if (x < 25.0) return std::exp(x * x) * std::erfc(x);
    // Asymptotic series; at x >= 25 the truncation error is below 1e-16.
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * std::sqrt(std::numbers::pi));
}

}  // namespace crsep
