#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lagmirror::quadrature {

namespace detail {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

/// Bisects until the Kronrod error estimate of every piece is below rel_tol
/// times that piece's L1 mass, or below its share (abs_density per unit
/// length) of the absolute budget. Unlike a tolerance relative to the
/// integral itself this terminates on integrands whose pieces cancel.
template <class F>
double adapt(F& f, double a, double b, double rel_tol, double abs_density, unsigned depth) {
    double err = 0.0, l1 = 0.0;
    const double r = GK::integrate(f, a, b, 0, rel_tol, &err, &l1);
    // Boost reports the error on the reference interval [-1, 1] but the L1
    // mass on [a, b].
    err *= 0.5 * (b - a);
    if (depth == 0 || err <= rel_tol * l1 || err <= abs_density * (b - a) ||
        err <= std::numeric_limits<double>::min())
        return r;
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, rel_tol, abs_density, depth - 1) + adapt(f, mid, b, rel_tol, abs_density, depth - 1);
}

/// Adapts over consecutive pieces with a shared absolute budget of rel_tol
/// times the total L1 mass.
template <class F>
double adapt_pieces(F& f, double a, double b, long pieces, double rel_tol, unsigned depth) {
    const double step = (b - a) / static_cast<double>(pieces);
    auto edge = [&](long i) { return i == pieces ? b : a + static_cast<double>(i) * step; };
    double l1_total = 0.0;
    for (long i = 0; i < pieces; ++i) {
        double err = 0.0, l1 = 0.0;
        GK::integrate(f, edge(i), edge(i + 1), 0, rel_tol, &err, &l1);
        l1_total += l1;
    }
    const double abs_density = rel_tol * l1_total / (b - a);
    double sum = 0.0;
    for (long i = 0; i < pieces; ++i) sum += adapt(f, edge(i), edge(i + 1), rel_tol, abs_density, depth);
    return sum;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b] (b < a allowed,
/// infinite limits allowed). Finite ranges are pre-split into pieces no longer
/// than max_piece so oscillatory integrands are not under-sampled on the
/// first level.
template <class F>
double integrate(F&& f, double a, double b, double max_piece = 0.5) {
    constexpr unsigned depth = 30;
    constexpr double rel_tol = 1e-14;
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, max_piece);
    if (std::isinf(a) && std::isinf(b)) return integrate(f, a, 0.0, max_piece) + integrate(f, 0.0, b, max_piece);
    if (std::isinf(a) || std::isinf(b)) {
        // t = end -+ (1 - u)/u maps u in (0, 1] onto the half line.
        const double end = std::isinf(a) ? b : a;
        const double dir = std::isinf(a) ? -1.0 : 1.0;
        auto g = [&](double u) {
            if (u <= 0.0) return 0.0;
            const double v = f(end + dir * (1.0 - u) / u);
            return v == 0.0 ? 0.0 : v / (u * u);
        };
        return detail::adapt_pieces(g, 0.0, 1.0, 8, rel_tol, depth);
    }
    const auto pieces = std::max(1L, static_cast<long>(std::ceil((b - a) / max_piece)));
    return detail::adapt_pieces(f, a, b, pieces, rel_tol, depth);
}

}  // namespace lagmirror::quadrature
