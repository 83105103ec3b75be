#pragma once

// De Rham cohomology of rapidly decreasing sections of the twisted local
// system on the lift: the case-by-case analytic count and a finite-difference
// discretization.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "banded_svd.hpp"
#include "errors.hpp"
#include "floer.hpp"
#include "geometry.hpp"
#include "localsys.hpp"
#include "object.hpp"
#include "quadrature.hpp"

namespace lagmirror {

enum class CaseTag { Case1, Case2, Case3a, Case3b };

inline const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::Case1: return "Case1";
        case CaseTag::Case2: return "Case2";
        case CaseTag::Case3a: return "Case3a";
        case CaseTag::Case3b: return "Case3b";
    }
    return "?";
}

/// Connected piece of the lift with the negative points removed.
struct ComponentCase {
    LiftComponent component;
    CaseTag tag = CaseTag::Case2;
    double t_lo = -INFINITY;  // parameter range of the piece
    double t_hi = INFINITY;
    std::vector<IntersectionPoint> positives;
    // Linearized weight derivative 2 pi Y ~ a t + b.
    double a = 0.0;
    double b = 0.0;
    // Case1 only.
    Matrix twisted_monodromy;
    bool eigenvalue_one = false;
    int kernel_dim = 0;
    int cokernel_dim = 0;
};

/// Circles that carry data: the ones near the zero section plus any circle
/// whose twisted monodromy has eigenvalue 1 (possible only for
/// non-unitary local systems).
inline std::vector<LiftComponent> derham_circles(const SceneObject& obj) {
    const auto& L = obj.graph;
    auto comps = lift_components(L, default_window(L));
    Eigen::ComplexEigenSolver<Matrix> es(obj.local_system.monodromy, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx lambda = es.eigenvalues()[i];
        if (std::abs(lambda.imag()) > 1e-9 * std::abs(lambda) || lambda.real() <= 0.0) continue;
        const double r = std::log(lambda.real()) / (two_pi * L.q) - L.c;
        const double ri = std::round(r);
        if (std::abs(r - ri) > 1e-9) continue;
        const bool known = std::any_of(comps.begin(), comps.end(),
                                       [&](const LiftComponent& c) { return c.shift == static_cast<int>(ri); });
        if (!known) comps.push_back({L, ComponentKind::Circle, static_cast<int>(ri)});
    }
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.shift < b.shift; });
    return comps;
}

inline std::vector<ComponentCase> classify_components(const SceneObject& obj, const RootOptions& opts = {},
                                                      double rank_tol = 1e-9) {
    const auto& L = obj.graph;
    const int n = obj.rank();
    std::vector<ComponentCase> out;
    const auto comps = L.p != 0 ? lift_components(L, default_window(L)) : derham_circles(obj);
    for (const auto& comp : comps) {
        const auto pts = zero_crossings(comp, opts);
        const double a = two_pi * L.p / L.q;
        const double b = two_pi * (L.c + comp.shift);
        std::vector<double> negs;
        for (const auto& x : pts)
            if (!x.positive()) negs.push_back(x.t);

        auto piece = [&](CaseTag tag, double lo, double hi) {
            ComponentCase cc{comp, tag, lo, hi, {}, a, b, {}, false, 0, 0};
            for (const auto& x : pts) {
                if (!x.positive()) continue;
                // On circles a piece may wrap past the seam.
                const bool inside = (x.t > lo && x.t < hi) ||
                                    (!comp.is_line() && x.t + comp.period() > lo && x.t + comp.period() < hi);
                if (inside) cc.positives.push_back(x);
            }
            return cc;
        };

        if (comp.is_line()) {
            const CaseTag ends = a > 0 ? CaseTag::Case3a : CaseTag::Case3b;
            if (negs.empty()) {
                out.push_back(piece(ends, -INFINITY, INFINITY));
                continue;
            }
            out.push_back(piece(ends, -INFINITY, negs.front()));
            for (std::size_t i = 0; i + 1 < negs.size(); ++i) out.push_back(piece(CaseTag::Case2, negs[i], negs[i + 1]));
            out.push_back(piece(ends, negs.back(), INFINITY));
        } else if (pts.empty()) {
            ComponentCase cc{comp, CaseTag::Case1, 0.0, comp.period(), {}, 0.0, b, {}, false, 0, 0};
            cc.twisted_monodromy = circle_twisted_monodromy(obj.local_system, comp);
            const int r = numerical_rank(cc.twisted_monodromy - Matrix::Identity(n, n), rank_tol);
            cc.kernel_dim = n - r;
            cc.cokernel_dim = n - r;
            cc.eigenvalue_one = r < n;
            out.push_back(std::move(cc));
        } else {
            for (std::size_t i = 0; i < negs.size(); ++i) {
                const double lo = negs[i];
                const double hi = i + 1 < negs.size() ? negs[i + 1] : negs.front() + comp.period();
                out.push_back(piece(CaseTag::Case2, lo, hi));
            }
        }
    }
    return out;
}

enum class Anchor { Origin, MinusInfinity, PlusInfinity };

struct Case3Solution {
    std::vector<cplx> values;
    bool decays = false;
};

/// Solves f' + (a x + b) f = g on the line:
///   f(x) = int_anchor^x g(t) exp(phi(t) - phi(x)) dt + C exp(-phi(x)),
/// phi(x) = a x^2/2 + b x, with the exponent differences formed before
/// exponentiating. decays reports rapid decrease on the infinite side(s)
/// selected by the anchor (both for Origin).
inline Case3Solution case3_solve(double a, double b, const std::function<cplx(double)>& g, cplx C,
                                 std::span<const double> xs, Anchor anchor = Anchor::Origin) {
    if (a == 0.0) throw UnsupportedError("case3_solve: a = 0 has no Gaussian weight");
    auto phi = [&](double x) { return 0.5 * a * x * x + b * x; };
    auto dphi = [&](double t, double x) { return (t - x) * (0.5 * a * (t + x) + b); };
    const double start = anchor == Anchor::Origin ? 0.0 : anchor == Anchor::MinusInfinity ? -INFINITY : INFINITY;

    auto integral = [&](double lo, double hi, auto&& weight) {
        const double re = quadrature::integrate([&](double t) { return (g(t) * weight(t)).real(); }, lo, hi);
        const double im = quadrature::integrate([&](double t) { return (g(t) * weight(t)).imag(); }, lo, hi);
        return cplx(re, im);
    };

    Case3Solution out;
    for (double x : xs) {
        const cplx part = integral(start, x, [&](double t) { return std::exp(dphi(t, x)); });
        const double hom = -phi(x);
        out.values.push_back(part + (C == 0.0 ? cplx(0.0) : C * std::exp(hom)));
    }

    if (a > 0) {
        out.decays = true;
        return out;
    }
    // a < 0: f exp(phi) tends to C + int_anchor^side g exp(phi), which must vanish.
    auto limit = [&](double side) {
        if (start == side) return C;
        return C + integral(start, side, [&](double t) { return std::exp(phi(t)); });
    };
    const double scale =
        std::abs(C) + quadrature::integrate([&](double t) { return std::abs(g(t)) * std::exp(phi(t)); },
                                            -INFINITY, INFINITY);
    const double tol = 1e-12 * std::max(scale, 1e-300);
    out.decays = true;
    if (anchor != Anchor::PlusInfinity) out.decays = out.decays && std::abs(limit(-INFINITY)) <= tol;
    if (anchor != Anchor::MinusInfinity) out.decays = out.decays && std::abs(limit(INFINITY)) <= tol;
    return out;
}

/// Componentwise version for rank-n systems.
inline std::vector<Vector> case3_solve(double a, double b, const std::function<Vector(double)>& g, const Vector& C,
                                       std::span<const double> xs, Anchor anchor, bool* decays = nullptr) {
    std::vector<Vector> out(xs.size(), Vector::Zero(C.size()));
    bool all = true;
    for (Eigen::Index k = 0; k < C.size(); ++k) {
        const auto s = case3_solve(a, b, [&](double t) { return g(t)(k); }, C(k), xs, anchor);
        for (std::size_t i = 0; i < xs.size(); ++i) out[i](k) = s.values[i];
        all = all && s.decays;
    }
    if (decays) *decays = all;
    return out;
}

/// max |f' + (a x + b) f - g| / max |g| at the sample points, with a
/// sixth-order central difference of step h.
inline double case3_residual(double a, double b, const std::function<cplx(double)>& g, cplx C,
                             std::span<const double> xs, Anchor anchor, double h = 2e-3) {
    static constexpr double w[] = {-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
    double worst = 0.0, gmax = 0.0;
    for (double x : xs) {
        std::vector<double> pts;
        for (int j = -3; j <= 3; ++j) pts.push_back(x + j * h);
        const auto f = case3_solve(a, b, g, C, pts, anchor).values;
        cplx df = 0.0;
        for (int j = 0; j < 7; ++j) df += w[j] * f[static_cast<std::size_t>(j)];
        df /= 60.0 * h;
        const cplx gx = g(x);
        worst = std::max(worst, std::abs(df + (a * x + b) * f[3] - gx));
        gmax = std::max(gmax, std::abs(gx));
    }
    return gmax > 0 ? worst / gmax : worst;
}

struct AnalyticResult {
    Dims dims;
    std::vector<ComponentCase> cases;
    int positive_points = 0;
    /// h0 of the direct sum of the pieces: n per positive point.
    int piece_h0 = 0;
    /// Sampled surjectivity of the Case 3 pieces.
    bool surjective = true;
    double max_residual = 0.0;
};

inline AnalyticResult analytic_dims(const SceneObject& obj, double rank_tol = 1e-9, int samples = 10,
                                    unsigned seed = 7, const RootOptions& opts = {}) {
    const int n = obj.rank();
    AnalyticResult res;
    res.cases = classify_components(obj, opts, rank_tol);
    const Matrix d = boundary_transport_differential(obj, opts);
    const int r = numerical_rank(d, rank_tol);
    int extra0 = 0, extra1 = 0;
    for (const auto& cc : res.cases) {
        res.positive_points += static_cast<int>(cc.positives.size());
        extra0 += cc.kernel_dim;
        extra1 += cc.cokernel_dim;
    }
    res.piece_h0 = n * res.positive_points;
    res.dims = {static_cast<int>(d.cols()) - r + extra0, static_cast<int>(d.rows()) - r + extra1};

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& cc : res.cases) {
        if (cc.tag != CaseTag::Case3a && cc.tag != CaseTag::Case3b) continue;
        // Work in x = t - t_edge so the sampled region stays near the finite end.
        const double edge = std::isfinite(cc.t_hi) ? cc.t_hi : std::isfinite(cc.t_lo) ? cc.t_lo : 0.0;
        const double b = cc.b + cc.a * edge;
        Anchor anchor = Anchor::Origin;
        if (cc.tag == CaseTag::Case3b) anchor = std::isfinite(cc.t_hi) ? Anchor::MinusInfinity : Anchor::PlusInfinity;
        const double side = anchor == Anchor::MinusInfinity ? -1.0 : 1.0;
        for (int s = 0; s < samples; ++s) {
            const double mu = side * 1.5 * unit(rng);
            const cplx amp(unit(rng) - 0.5, unit(rng) - 0.5);
            const cplx C = anchor == Anchor::Origin ? cplx(unit(rng), unit(rng)) : cplx(0.0);
            auto g = [=](double x) { return amp * std::exp(-(x - mu) * (x - mu)); };
            const double xs[] = {mu - 0.5, mu, mu + 0.5};
            const auto sol = case3_solve(cc.a, b, g, C, xs, anchor);
            res.surjective = res.surjective && sol.decays;
            res.max_residual = std::max(res.max_residual, case3_residual(cc.a, b, g, C, xs, anchor));
        }
    }
    res.surjective = res.surjective && res.max_residual <= 1e-8;
    return res;
}

struct DiscretizedBlock {
    LiftComponent component;
    long rows = 0;
    long cols = 0;
    Dims dims;
};

struct DiscretizedResult {
    Dims dims;
    std::vector<DiscretizedBlock> blocks;
};

namespace detail {

/// Dimension counts of one assembled block from its numerical rank.
inline Dims block_dims(long rows, long cols, const std::vector<Triplet>& entries, double rank_tol) {
    const auto rank = static_cast<int>(banded_rank(rows, cols, entries, rank_tol).rank);
    return {static_cast<int>(cols) - rank, static_cast<int>(rows) - rank};
}

/// Appends the n x n blocks of one edge equation
///   (f_{i+1} - P f_i)/h + pi Y(m) (f_{i+1} + P f_i) = 0.
inline void add_edge(std::vector<Triplet>& e, long row, long col_next, long col_prev, const Matrix& P, double h,
                     double y_mid) {
    const long n = P.rows();
    const double w = std::numbers::pi * y_mid;
    for (long i = 0; i < n; ++i) {
        if (col_next >= 0) e.push_back({row * n + i, col_next * n + i, 1.0 / h + w});
        if (col_prev >= 0)
            for (long j = 0; j < n; ++j)
                if (P(i, j) != 0.0) e.push_back({row * n + i, col_prev * n + j, (-1.0 / h + w) * P(i, j)});
    }
}

}  // namespace detail

namespace detail {

/// Unitary change of fiber basis to Schur form T = U S U^*, which leaves the
/// singular values of the discretized operator unchanged, followed by a
/// split of the channels into groups that S does not couple. For unitary
/// monodromy every channel is its own group.
inline std::vector<Matrix> decoupled_monodromies(const Matrix& T) {
    Eigen::ComplexSchur<Matrix> schur(T);
    Matrix S = schur.matrixT();
    const Eigen::Index n = S.rows();
    const double tiny = 1e-14 * S.norm();
    std::vector<int> group(static_cast<std::size_t>(n));
    std::iota(group.begin(), group.end(), 0);
    auto find = [&](int i) {
        while (group[static_cast<std::size_t>(i)] != i) i = group[static_cast<std::size_t>(i)];
        return i;
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(S(i, j)) <= tiny) {
                S(i, j) = 0.0;
                continue;
            }
            group[static_cast<std::size_t>(find(static_cast<int>(j)))] = find(static_cast<int>(i));
        }
    std::vector<Matrix> out;
    for (int root = 0; root < n; ++root) {
        if (find(root) != root) continue;
        std::vector<Eigen::Index> idx;
        for (int i = 0; i < n; ++i)
            if (find(i) == root) idx.push_back(i);
        Matrix block(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b)
                block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = S(idx[a], idx[b]);
        out.push_back(std::move(block));
    }
    return out;
}

}  // namespace detail

/// Finite-difference de Rham complex on every lift component: lines are cut
/// at distance T beyond their outermost crossings, with zero boundary values
/// at ends where the homogeneous solution grows; circles are periodic with the
/// monodromy applied across the seam.
inline DiscretizedResult discretized_dims(const SceneObject& obj, double h = 1.0 / 512, double T = 6.0,
                                          double rank_tol = 1e-9, const RootOptions& opts = {}) {
    const auto& L = obj.graph;
    if (!(h > 0.0) || !(T > 0.0)) throw Error("discretized_dims: grid step and window must be positive");
    DiscretizedResult res;
    const auto comps = L.p != 0 ? lift_components(L, default_window(L)) : derham_circles(obj);
    const auto channels = detail::decoupled_monodromies(obj.local_system.monodromy);
    for (const auto& comp : comps) {
        DiscretizedBlock block{comp, 0, 0, {}};
        for (const auto& mono : channels) {
            const LocalSystem ls{mono};
            const long n = ls.rank();
            std::vector<Triplet> e;
            long rows = 0, cols = 0;
            if (comp.is_line()) {
                const auto pts = zero_crossings(comp, opts);
                const double first = pts.front().t, last = pts.back().t;
                const double lo = first - T, hi = last + T;
                const double needed = 12.0 * std::log(10.0);
                for (auto [from, to] : {std::pair(first, lo), std::pair(last, hi)}) {
                    if (two_pi * std::abs(branch_integral(comp, from, to)) < needed)
                        throw WindowError("object '" + L.id +
                                          "': Gaussian weight is not below 1e-12 at the window edge");
                }
                const double t0 = std::floor(lo / h) * h;
                const long N = static_cast<long>(std::ceil((hi - t0) / h));
                auto node = [&](long i) { return t0 + (static_cast<double>(i) + 0.5) * h; };
                // Zero boundary values where homogeneous solutions grow (both ends for p < 0).
                const long first_col = L.p < 0 ? 1 : 0;
                const long last_col = L.p < 0 ? N - 2 : N - 1;
                auto col = [&](long i) { return i < first_col || i > last_col ? -1L : i - first_col; };
                for (long i = 0; i + 1 < N; ++i) {
                    const double m = t0 + static_cast<double>(i + 1) * h;
                    detail::add_edge(e, i, col(i + 1), col(i), transport_flat(ls, comp, node(i), node(i + 1)), h,
                                     comp(m));
                }
                rows = (N - 1) * n;
                cols = (last_col - first_col + 1) * n;
            } else {
                const long N = std::max(8L, std::lround(comp.period() / h));
                const double step = comp.period() / static_cast<double>(N);
                // Fold the ring 0, N-1, 1, N-2, ... so every edge stays within the band.
                auto pos = [&](long i) { return i < (N + 1) / 2 ? 2 * i : 2 * (N - 1 - i) + 1; };
                std::vector<std::pair<long, long>> order;  // (min position, edge)
                for (long i = 0; i < N; ++i) order.push_back({std::min(pos(i), pos((i + 1) % N)), i});
                std::sort(order.begin(), order.end());
                for (long r = 0; r < N; ++r) {
                    const long i = order[static_cast<std::size_t>(r)].second;
                    const double ti = (static_cast<double>(i) + 0.5) * step;
                    detail::add_edge(e, r, pos((i + 1) % N), pos(i), transport_flat(ls, comp, ti, ti + step), step,
                                     comp(ti + 0.5 * step));
                }
                rows = N * n;
                cols = N * n;
            }
            const Dims dims = detail::block_dims(rows, cols, e, rank_tol);
            block.rows += rows;
            block.cols += cols;
            block.dims.h0 += dims.h0;
            block.dims.h1 += dims.h1;
        }
        res.dims.h0 += block.dims.h0;
        res.dims.h1 += block.dims.h1;
        res.blocks.push_back(std::move(block));
    }
    return res;
}

}  // namespace lagmirror
