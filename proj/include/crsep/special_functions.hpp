#pragma once

namespace crsep {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
/// Throws std::domain_error for non-finite input.
double gaussian_q(double x);

/// Q(x) or Q(x)^2 evaluated from Craig's finite-range integral by adaptive
/// quadrature (relative tolerance 1e-10). Slow; meant as a reference for
/// gaussian_q. Throws std::domain_error for x < 0.
double craig_q_numeric(double x, bool squared = false);

/// exp(x^2) * erfc(x) for x >= 0, accurate where erfc itself underflows.
double scaled_erfc(double x);

}  // namespace crsep
