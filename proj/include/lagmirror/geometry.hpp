#pragma once

// Base circle t in R/Z, fiber coordinate y (R/Z on the torus, R on the
// cotangent cylinder), symplectic form dy^dt. A Lagrangian curve transversal
// to the fibers is the graph y = Y(t) over a q-fold cover of the base.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"
#include "quadrature.hpp"

namespace lagmirror {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// One term a cos(2 pi m t / q) + b sin(2 pi m t / q) of the wiggle.
struct Harmonic {
    int m = 1;
    double a = 0.0;
    double b = 0.0;

    friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

/// Closed Lagrangian curve y = Y(t), t in R/qZ, with Y(t + q) = Y(t) + p and
/// Y(t) = (p/q) t + c + W(t).
struct LagrangianGraph {
    std::string id;
    int q = 1;
    int p = 0;
    double c = 0.0;
    std::vector<Harmonic> wiggle;

    double lift(double t) const {
        double y = static_cast<double>(p) / q * t + c;
        for (const auto& h : wiggle) {
            const double w = two_pi * h.m * t / q;
            y += h.a * std::cos(w) + h.b * std::sin(w);
        }
        return y;
    }

    double slope(double t) const {
        double d = static_cast<double>(p) / q;
        for (const auto& h : wiggle) {
            const double k = two_pi * h.m / q;
            const double w = k * t;
            d += k * (-h.a * std::sin(w) + h.b * std::cos(w));
        }
        return d;
    }

    double curvature(double t) const {
        double d = 0.0;
        for (const auto& h : wiggle) {
            const double k = two_pi * h.m / q;
            const double w = k * t;
            d -= k * k * (h.a * std::cos(w) + h.b * std::sin(w));
        }
        return d;
    }

    /// Upper bound on |W|.
    double wiggle_amplitude() const {
        double s = 0.0;
        for (const auto& h : wiggle) s += std::abs(h.a) + std::abs(h.b);
        return s;
    }

    int harmonic_sum() const {
        int s = 0;
        for (const auto& h : wiggle) s += h.m;
        return s;
    }

    int max_harmonic() const {
        int s = 0;
        for (const auto& h : wiggle) s = std::max(s, h.m);
        return s;
    }

    bool is_straight() const {
        return std::all_of(wiggle.begin(), wiggle.end(),
                           [](const Harmonic& h) { return h.a == 0.0 && h.b == 0.0; });
    }

    /// Structural invariants; transversality is checked separately because it
    /// needs root finding.
    void validate() const {
        if (q < 1) throw ValidationError(id, "cover degree q must be >= 1");
        if (p != 0 && std::gcd(p, q) != 1)
            throw ValidationError(id, "gcd(p, q) must be 1 when p != 0");
        if (!std::isfinite(c)) throw ValidationError(id, "offset c must be finite");
        for (const auto& h : wiggle) {
            if (h.m < 1) throw ValidationError(id, "wiggle harmonic m must be positive");
            if (!std::isfinite(h.a) || !std::isfinite(h.b))
                throw ValidationError(id, "wiggle coefficients must be finite");
        }
        for (double t : {0.0, 0.37, 1.91 * q}) {
            const double gap = lift(t + q) - lift(t) - p;
            if (std::abs(gap) > 1e-9 * (1.0 + std::abs(lift(t))))
                throw ValidationError(id, "graph does not close up: Y(t+q) != Y(t)+p");
        }
    }

    friend bool operator==(const LagrangianGraph&, const LagrangianGraph&) = default;
};

enum class ComponentKind { Line, Circle };

/// Connected component of the preimage of L in the cotangent cylinder: the
/// branch t -> Y(t) + shift, over t in R (Line) or R/qZ (Circle).
struct LiftComponent {
    LagrangianGraph graph;
    ComponentKind kind = ComponentKind::Line;
    int shift = 0;

    double operator()(double t) const { return graph.lift(t) + shift; }
    double derivative(double t) const { return graph.slope(t); }
    bool is_line() const { return kind == ComponentKind::Line; }
    double period() const { return static_cast<double>(graph.q); }
};

enum class Crossing { Positive, Negative };

/// Zero of a lift branch. Positive iff the branch crosses upward, i.e. the
/// local primitive has a minimum there.
struct IntersectionPoint {
    int shift = 0;
    double t = 0.0;
    Crossing sign = Crossing::Positive;

    bool positive() const { return sign == Crossing::Positive; }
};

/// Arc of a lift component from a positive to a negative zero that avoids
/// the zero section in between. t_to may differ from to.t by a multiple of q
/// for wrap-around arcs on circles.
struct SimpleArc {
    IntersectionPoint from;
    IntersectionPoint to;
    double t_from = 0.0;
    double t_to = 0.0;
    int direction = 1;
};

struct RootOptions {
    double tol = 1e-12;        // root location
    double slope_tol = 1e-6;   // |Y'| at a root below this is tangential
};

inline double default_window(const LagrangianGraph& L) {
    return std::max(4.0, 2.0 + std::abs(L.c) + L.wiggle_amplitude());
}

/// For p != 0 the |p| line components; for p = 0 every circle whose branch
/// meets the band |y| <= window.
inline std::vector<LiftComponent> lift_components(const LagrangianGraph& L, double window) {
    L.validate();
    if (!(window > 0.0)) throw Error("lift_components: window must be positive");
    std::vector<LiftComponent> out;
    if (L.p != 0) {
        for (int r = 0; r < std::abs(L.p); ++r) out.push_back({L, ComponentKind::Line, r});
        return out;
    }
    const double amp = L.wiggle_amplitude();
    const auto lo = static_cast<int>(std::ceil(-window - L.c - amp));
    const auto hi = static_cast<int>(std::floor(window - L.c + amp));
    // Bound by amplitude first, then confirm on a sample grid.
    const int samples = 256 * std::max(1, L.q) * (1 + L.max_harmonic());
    for (int r = lo; r <= hi; ++r) {
        double ymin = INFINITY, ymax = -INFINITY;
        for (int i = 0; i <= samples; ++i) {
            const double y = L.lift(L.q * static_cast<double>(i) / samples) + r;
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        if (ymax >= -window && ymin <= window) out.push_back({L, ComponentKind::Circle, r});
    }
    return out;
}

/// Parameter range that contains every zero of the branch.
inline std::pair<double, double> crossing_search_range(const LiftComponent& comp) {
    const auto& L = comp.graph;
    if (!comp.is_line()) return {0.0, comp.period()};
    const double amp = L.wiggle_amplitude();
    const double k = static_cast<double>(L.q) / L.p;
    double a = k * (-amp - L.c - comp.shift);
    double b = k * (amp - L.c - comp.shift);
    if (a > b) std::swap(a, b);
    return {a - 1e-3, b + 1e-3};
}

inline double root_grid_step(const LagrangianGraph& L) {
    return std::min(0.01, L.q / (64.0 * (1 + L.harmonic_sum())));
}

namespace detail {

template <class F, class DF>
double refine_root(F&& f, DF&& df, double lo, double hi, double tol) {
    using boost::math::tools::bisect;
    auto stop = [](double a, double b) { return std::abs(b - a) < 1e-9; };
    auto bracket = bisect(f, lo, hi, stop);
    lo = bracket.first;
    hi = bracket.second;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double d = df(x);
        if (d == 0.0) break;
        const double next = x - f(x) / d;
        if (!(next >= lo && next <= hi)) break;
        const bool done = std::abs(next - x) <= tol;
        x = next;
        if (done) break;
    }
    if (std::abs(f(x)) > std::abs(f(0.5 * (lo + hi)))) x = 0.5 * (lo + hi);
    return x;
}

}  // namespace detail

/// All zeros of the branch, sorted by t, classified by the sign of Y'.
/// Sign changes are bracketed on a uniform grid and refined by bisection and
/// Newton. Tangential zeros (including touching without a sign change) raise
/// TransversalityError.
inline std::vector<IntersectionPoint> zero_crossings(const LiftComponent& comp,
                                                     const RootOptions& opts = {}) {
    const auto& L = comp.graph;
    auto [lo, hi] = crossing_search_range(comp);
    const double step0 = root_grid_step(L);
    const auto cells = static_cast<long>(std::ceil((hi - lo) / step0));
    const double step = (hi - lo) / static_cast<double>(cells);
    const double period = comp.period();
    auto f = [&](double t) { return comp(t); };
    auto df = [&](double t) { return comp.derivative(t); };
    auto tangential = [&](double t) {
        throw TransversalityError(L.id, comp.shift, t, df(t));
    };

    std::vector<double> roots;
    double t0 = lo;
    double y0 = f(t0);
    double d0 = df(t0);
    for (long i = 1; i <= cells; ++i) {
        const double t1 = (i == cells) ? hi : lo + static_cast<double>(i) * step;
        const double y1 = f(t1);
        const double d1 = df(t1);
        if (y0 == 0.0) {
            roots.push_back(t0);
        } else if ((y0 < 0.0) != (y1 < 0.0) && y1 != 0.0) {
            roots.push_back(detail::refine_root(f, df, t0, t1, opts.tol));
        }
        if ((d0 < 0.0) != (d1 < 0.0)) {
            // Critical point inside the cell: reject if it touches zero.
            const double tc = detail::refine_root(df, [&](double t) { return L.curvature(t); },
                                                  t0, t1, opts.tol);
            if (std::abs(f(tc)) <= 1e3 * opts.tol) tangential(tc);
        }
        t0 = t1;
        y0 = y1;
        d0 = d1;
    }
    if (comp.is_line() && y0 == 0.0) roots.push_back(t0);

    std::vector<IntersectionPoint> out;
    for (double t : roots) {
        if (!comp.is_line()) {
            t = std::fmod(t, period);
            if (t < 0) t += period;
            if (period - t <= 1e-9) t = 0.0;
        }
        const double d = df(t);
        if (std::abs(d) <= opts.slope_tol) tangential(t);
        out.push_back({comp.shift, t, d > 0 ? Crossing::Positive : Crossing::Negative});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const auto& a, const auto& b) { return std::abs(a.t - b.t) <= 1e-9; }),
              out.end());
    return out;
}

/// Adjacent (positive, negative) pairs along the component; on circles the
/// wrap-around pair is included. Direction is +1 when the arc runs from the
/// positive to the negative point in the positive base direction.
inline std::vector<SimpleArc> simple_arcs(const LiftComponent& comp,
                                          std::span<const IntersectionPoint> points) {
    std::vector<SimpleArc> arcs;
    const std::size_t n = points.size();
    if (n < 2) return arcs;
    auto add = [&](const IntersectionPoint& left, double tl, const IntersectionPoint& right, double tr) {
        if (left.sign == right.sign) return;
        if (left.positive())
            arcs.push_back({left, right, tl, tr, +1});
        else
            arcs.push_back({right, left, tr, tl, -1});
    };
    for (std::size_t i = 0; i + 1 < n; ++i) add(points[i], points[i].t, points[i + 1], points[i + 1].t);
    if (!comp.is_line()) add(points[n - 1], points[n - 1].t, points[0], points[0].t + comp.period());
    return arcs;
}

/// -integral of the branch from t_from to t_to (oriented).
inline double oriented_area(const LiftComponent& comp, double t_from, double t_to) {
    const auto& L = comp.graph;
    const double piece = 0.5 * L.q / std::max(1, L.max_harmonic());
    return -quadrature::integrate([&](double t) { return comp(t); }, t_from, t_to, piece);
}

inline double arc_area(const LiftComponent& comp, const SimpleArc& arc) {
    return oriented_area(comp, arc.t_from, arc.t_to);
}

/// Components that can meet the zero section (all lines, or the circles
/// within the wiggle band).
inline std::vector<LiftComponent> crossing_components(const LagrangianGraph& L) {
    if (L.p != 0) return lift_components(L, default_window(L));
    std::vector<LiftComponent> out;
    for (auto& comp : lift_components(L, default_window(L))) {
        if (!zero_crossings(comp).empty()) out.push_back(std::move(comp));
    }
    return out;
}

/// Throws TransversalityError if some lift meets the zero section
/// tangentially.
inline void check_transversality(const LagrangianGraph& L, const RootOptions& opts = {}) {
    L.validate();
    for (const auto& comp : lift_components(L, default_window(L))) (void)zero_crossings(comp, opts);
}

}  // namespace lagmirror
