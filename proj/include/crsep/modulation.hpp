#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace crsep {

/// Grid shape of a rectangular M_I x M_Q constellation; PAM when either side is 1.
struct Modulation {
    int m_inphase = 2;
    int m_quadrature = 1;

    int order() const { return m_inphase * m_quadrature; }
    bool is_pam() const { return m_inphase == 1 || m_quadrature == 1; }

    /// M_I^2 + M_Q^2 - 2, the energy normalizer of the grid.
    double energy_normalizer() const {
        return double(m_inphase) * m_inphase + double(m_quadrature) * m_quadrature - 2.0;
    }

    /// "8x2" style label; parse() accepts the same form.
    std::string label() const;
    static Modulation parse(const std::string& text);

    bool operator==(const Modulation&) const = default;
};

class DegenerateConstellation : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct ConstellationSpec {
    int m_inphase = 2;
    int m_quadrature = 1;
    double power = 1.0;  // average symbol energy, linear

    ConstellationSpec() = default;
    ConstellationSpec(int m_i, int m_q, double p) : m_inphase(m_i), m_quadrature(m_q), power(p) {}
    ConstellationSpec(Modulation shape, double p)
        : m_inphase(shape.m_inphase), m_quadrature(shape.m_quadrature), power(p) {}

    Modulation shape() const { return {m_inphase, m_quadrature}; }
    int order() const { return m_inphase * m_quadrature; }

    /// Throws DegenerateConstellation for M < 2, std::invalid_argument for
    /// nonpositive power.
    void validate() const;
};

struct ConstellationPoint {
    int n;  // in-phase index
    int q;  // quadrature index
    std::complex<double> amplitude;
};

/// sqrt(12 P / (M_I^2 + M_Q^2 - 2)).
double min_distance(const ConstellationSpec& spec);

/// All M points, n fastest: index = q * M_I + n.
std::vector<ConstellationPoint> build_constellation(const ConstellationSpec& spec);

/// Amplitude level (2i + 1 - levels) * d / 2 along one axis.
inline double axis_level(int index, int levels, double distance) {
    return (2.0 * index + 1.0 - levels) * distance / 2.0;
}

/// Error-pattern class of a grid point. For PAM the two end points are
/// "corner" (one-sided error) and the interior points are "edge".
enum class PointClass { corner, edge, inner };

PointClass classify_point(const ConstellationSpec& spec, int n, int q);

/// Number of grid points in a class, by closed-form count.
int class_count(const Modulation& shape, PointClass cls);

}  // namespace crsep
