#include "crsep/modulation.hpp"

#include <charconv>
#include <cmath>

namespace crsep {

std::string Modulation::label() const {
    return std::to_string(m_inphase) + "x" + std::to_string(m_quadrature);
}

Modulation Modulation::parse(const std::string& text) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw std::invalid_argument("modulation must look like MIxMQ");
    Modulation m;
    const char* begin = text.data();
    const auto r1 = std::from_chars(begin, begin + x, m.m_inphase);
    const auto r2 = std::from_chars(begin + x + 1, begin + text.size(), m.m_quadrature);
    if (r1.ec != std::errc{} || r1.ptr != begin + x || r2.ec != std::errc{} ||
        r2.ptr != begin + text.size())
        throw std::invalid_argument("modulation must look like MIxMQ, got '" + text + "'");
    if (m.m_inphase < 1 || m.m_quadrature < 1 || m.order() < 2)
        throw DegenerateConstellation("modulation '" + text + "' has fewer than two points");
    return m;
}

void ConstellationSpec::validate() const {
    if (m_inphase < 1 || m_quadrature < 1 || m_inphase * m_quadrature < 2)
        throw DegenerateConstellation("constellation needs M_I, M_Q >= 1 and M_I * M_Q >= 2");
    if (!(power > 0.0) || !std::isfinite(power))
        throw std::invalid_argument("constellation power must be positive");
}

double min_distance(const ConstellationSpec& spec) {
    spec.validate();
    return std::sqrt(12.0 * spec.power / spec.shape().energy_normalizer());
}

std::vector<ConstellationPoint> build_constellation(const ConstellationSpec& spec) {
    const double d = min_distance(spec);
    std::vector<ConstellationPoint> points;
    points.reserve(static_cast<std::size_t>(spec.order()));
    for (int q = 0; q < spec.m_quadrature; ++q)
        for (int n = 0; n < spec.m_inphase; ++n)
            points.push_back({n, q, {axis_level(n, spec.m_inphase, d),
                                     axis_level(q, spec.m_quadrature, d)}});
    return points;
}

PointClass classify_point(const ConstellationSpec& spec, int n, int q) {
    spec.validate();
    if (n < 0 || n >= spec.m_inphase || q < 0 || q >= spec.m_quadrature)
        throw std::out_of_range("classify_point: index outside the constellation");

    if (spec.shape().is_pam()) {
        const bool vertical = spec.m_inphase == 1;
        const int i = vertical ? q : n;
        const int levels = vertical ? spec.m_quadrature : spec.m_inphase;
        return (i == 0 || i == levels - 1) ? PointClass::corner : PointClass::edge;
    }
    const bool n_edge = n == 0 || n == spec.m_inphase - 1;
    const bool q_edge = q == 0 || q == spec.m_quadrature - 1;
    if (n_edge && q_edge) return PointClass::corner;
    if (n_edge || q_edge) return PointClass::edge;
    return PointClass::inner;
}

int class_count(const Modulation& shape, PointClass cls) {
    const int m_i = shape.m_inphase;
    const int m_q = shape.m_quadrature;
    if (shape.is_pam()) {
        const int m = shape.order();
        switch (cls) {
            case PointClass::corner: return 2;
            case PointClass::edge: return m - 2;
            case PointClass::inner: return 0;
        }
    }
    switch (cls) {
        case PointClass::corner: return 4;
        case PointClass::edge: return 2 * (m_i + m_q - 4);
        case PointClass::inner: return m_i * m_q - 2 * (m_i + m_q) + 4;
    }
    return 0;
}

}  // namespace crsep
