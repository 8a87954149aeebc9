#pragma once

#include <cstddef>
#include <functional>

namespace crsep {

struct QuadratureTolerance {
    double absolute = 1e-12;
    double relative = 1e-10;
    std::size_t max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    std::size_t evaluations = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration on a finite
/// interval. Bisects the interval with the largest error estimate until
/// the summed estimate satisfies the tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureTolerance& tol = {});

/// Iterated 2-D integral over the rectangle [x_lo, x_hi] x [y_lo, y_hi].
/// The inner integral runs at a tighter absolute tolerance than the outer.
QuadratureResult integrate_2d(const std::function<double(double, double)>& f, double x_lo,
                              double x_hi, double y_lo, double y_hi,
                              const QuadratureTolerance& tol = {});

}  // namespace crsep
