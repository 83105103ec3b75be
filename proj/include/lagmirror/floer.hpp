#pragma once

// Two-term Floer complex of (L, zero section) with coefficients in the local
// system: F0 on positive crossings, F1 on negative ones, differential from
// simple arcs weighted by monodromy and exp(2 pi area).

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "geometry.hpp"
#include "localsys.hpp"
#include "object.hpp"

namespace lagmirror {

struct FloerComplex {
    int rank = 1;
    std::vector<IntersectionPoint> F0;  // positive points, sorted by (shift, t)
    std::vector<IntersectionPoint> F1;  // negative points, same order
    Matrix d;                           // (n |F1|) x (n |F0|)
    /// Some pair of points is joined by two arcs with the same direction.
    bool equal_direction_arcs = false;

    int dim0() const { return rank * static_cast<int>(F0.size()); }
    int dim1() const { return rank * static_cast<int>(F1.size()); }
};

namespace detail {

inline bool point_less(const IntersectionPoint& a, const IntersectionPoint& b) {
    return std::pair(a.shift, a.t) < std::pair(b.shift, b.t);
}

inline long index_of(const std::vector<IntersectionPoint>& pts, const IntersectionPoint& x) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].shift == x.shift && std::abs(pts[i].t - x.t) <= 1e-12) return static_cast<long>(i);
    }
    return -1;
}

struct ComponentPoints {
    LiftComponent comp;
    std::vector<IntersectionPoint> points;
};

inline std::vector<ComponentPoints> collect_points(const LagrangianGraph& L, const RootOptions& opts) {
    std::vector<ComponentPoints> out;
    for (auto& comp : crossing_components(L)) {
        auto pts = zero_crossings(comp, opts);
        out.push_back({std::move(comp), std::move(pts)});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.comp.shift < b.comp.shift; });
    return out;
}

inline void split_points(const std::vector<ComponentPoints>& cps, FloerComplex& fc) {
    for (const auto& cp : cps) {
        for (const auto& x : cp.points) (x.positive() ? fc.F0 : fc.F1).push_back(x);
    }
    std::sort(fc.F0.begin(), fc.F0.end(), point_less);
    std::sort(fc.F1.begin(), fc.F1.end(), point_less);
}

}  // namespace detail

/// Assembles d block by block: d_kl = sum over simple arcs from the k-th
/// positive to the l-th negative point of direction * M(arc).
inline FloerComplex build_complex(const SceneObject& obj, const RootOptions& opts = {}) {
    const auto& ls = obj.local_system;
    const int n = obj.rank();
    const auto cps = detail::collect_points(obj.graph, opts);
    FloerComplex fc;
    fc.rank = n;
    detail::split_points(cps, fc);
    fc.d = Matrix::Zero(fc.dim1(), fc.dim0());

    for (const auto& cp : cps) {
        const auto arcs = simple_arcs(cp.comp, cp.points);
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            const auto& arc = arcs[i];
            const long k = detail::index_of(fc.F0, arc.from);
            const long l = detail::index_of(fc.F1, arc.to);
            const Matrix M = transport_flat(ls, cp.comp, arc.t_from, arc.t_to) *
                             std::exp(two_pi * arc_area(cp.comp, arc));
            fc.d.block(l * n, k * n, n, n) += static_cast<double>(arc.direction) * M;
            for (std::size_t j = 0; j < i; ++j) {
                const auto& other = arcs[j];
                if (detail::index_of(fc.F0, other.from) == k && detail::index_of(fc.F1, other.to) == l &&
                    other.direction == arc.direction)
                    fc.equal_direction_arcs = true;
            }
        }
    }
    return fc;
}

inline int numerical_rank(const Matrix& m, double rank_tol = 1e-9) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > rank_tol * s(0) ? 1 : 0;
    return r;
}

struct Dims {
    int h0 = 0;
    int h1 = 0;

    friend bool operator==(const Dims&, const Dims&) = default;
};

inline Dims cohomology_dims(const FloerComplex& fc, double rank_tol = 1e-9) {
    const int r = numerical_rank(fc.d, rank_tol);
    return {fc.dim0() - r, fc.dim1() - r};
}

/// The differential read off from horizontal extensions: a basis vector v at
/// a positive point extends horizontally until the nearest negative point on
/// either side, where its distributional derivative leaves +v (right end) or
/// -v (left end), transported along the twisted system.
inline Matrix boundary_transport_differential(const SceneObject& obj, const RootOptions& opts = {}) {
    const auto& ls = obj.local_system;
    const int n = obj.rank();
    const auto cps = detail::collect_points(obj.graph, opts);
    FloerComplex fc;
    detail::split_points(cps, fc);
    Matrix d = Matrix::Zero(n * static_cast<long>(fc.F1.size()), n * static_cast<long>(fc.F0.size()));

    for (const auto& cp : cps) {
        const double period = cp.comp.period();
        for (const auto& x : cp.points) {
            if (!x.positive()) continue;
            const long k = detail::index_of(fc.F0, x);
            // Nearest negative point to the right and to the left, as a
            // parameter on the component (wrapped on circles).
            const IntersectionPoint* right = nullptr;
            const IntersectionPoint* left = nullptr;
            double t_right = INFINITY, t_left = -INFINITY;
            for (const auto& y : cp.points) {
                if (y.positive()) continue;
                double tr = y.t, tl = y.t;
                if (!cp.comp.is_line()) {
                    while (tr <= x.t) tr += period;
                    while (tl >= x.t) tl -= period;
                }
                if (tr > x.t && tr < t_right) {
                    t_right = tr;
                    right = &y;
                }
                if (tl < x.t && tl > t_left) {
                    t_left = tl;
                    left = &y;
                }
            }
            if (right) {
                const long l = detail::index_of(fc.F1, *right);
                d.block(l * n, k * n, n, n) += transport_twisted(ls, cp.comp, x.t, t_right);
            }
            if (left) {
                const long l = detail::index_of(fc.F1, *left);
                d.block(l * n, k * n, n, n) -= transport_twisted(ls, cp.comp, x.t, t_left);
            }
        }
    }
    return d;
}

}  // namespace lagmirror
