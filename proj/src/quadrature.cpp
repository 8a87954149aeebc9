#include "crsep/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace crsep {

namespace {

// Kronrod abscissae; odd indices are shared with the 7-point Gauss rule.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod_15(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    const double f_center = f(center);
    double kronrod = kKronrodWeights[7] * f_center;
    double gauss = kGaussWeights[3] * f_center;
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kNodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureTolerance& tol) {
    QuadratureResult result;
    if (lo == hi) {
        result.converged = true;
        return result;
    }
    const double sign = hi > lo ? 1.0 : -1.0;
    if (sign < 0) std::swap(lo, hi);

    std::priority_queue<Segment> heap;
    heap.push(gauss_kronrod_15(f, lo, hi));
    result.evaluations = 15;
    double total = heap.top().value;
    double error = heap.top().error;

    while (error > std::max(tol.absolute, tol.relative * std::abs(total))) {
        if (heap.size() >= tol.max_intervals) break;
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) break;  // interval exhausted
        heap.pop();
        const Segment left = gauss_kronrod_15(f, worst.lo, mid);
        const Segment right = gauss_kronrod_15(f, mid, worst.hi);
        result.evaluations += 30;
        heap.push(left);
        heap.push(right);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
    }

    // Re-sum from scratch to shed the drift of the running updates.
    total = 0.0;
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    result.value = sign * total;
    result.error = error;
    result.converged = error <= std::max(tol.absolute, tol.relative * std::abs(total));
    return result;
}

QuadratureResult integrate_2d(const std::function<double(double, double)>& f, double x_lo,
                              double x_hi, double y_lo, double y_hi,
                              const QuadratureTolerance& tol) {
    QuadratureTolerance inner_tol = tol;
    const double x_span = std::abs(x_hi - x_lo);
    inner_tol.absolute = 0.1 * tol.absolute / std::max(1.0, x_span);

    bool inner_ok = true;
    std::size_t evaluations = 0;
    auto outer = [&](double x) {
        const QuadratureResult inner =
            integrate([&](double y) { return f(x, y); }, y_lo, y_hi, inner_tol);
        inner_ok = inner_ok && inner.converged;
        evaluations += inner.evaluations;
        return inner.value;
    };
    QuadratureResult result = integrate(outer, x_lo, x_hi, tol);
    result.evaluations = evaluations;
    result.converged = result.converged && inner_ok;
    return result;
}

}  // namespace crsep
