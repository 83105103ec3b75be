#pragma once

// Mirror side: the Poincare kernel exp(2 pi i x v), theta-type lattice sums
// realizing the Fourier transform of horizontal coefficient data, the
// Cauchy-Riemann check, bundle invariants, convolution and duals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "localsys.hpp"
#include "object.hpp"

namespace lagmirror {

inline constexpr cplx imag_unit{0.0, 1.0};

/// Point of the mirror torus; holomorphic coordinate z = x + i t.
struct MirrorPoint {
    double t = 0.0;
    double xdual = 0.0;

    cplx z() const { return {xdual, t}; }
};

/// e(v, x) = exp(2 pi i x v).
inline cplx kernel(double v, double xdual) { return std::exp(imag_unit * (two_pi * xdual * v)); }

/// Transport of d + 2 pi i v dx along the straight segment (v0,x0) -> (v1,x1).
inline cplx poincare_edge_transport(double v0, double x0, double v1, double x1) {
    const double integral = 0.5 * (v0 + v1) * (x1 - x0);
    return std::exp(-imag_unit * (two_pi * integral));
}

/// Holonomy around the boundary of [v0,v1] x [x0,x1], counterclockwise in
/// the (v, x) plane.
inline cplx poincare_holonomy(double v0, double v1, double x0, double x1) {
    return poincare_edge_transport(v0, x0, v1, x0) * poincare_edge_transport(v1, x0, v1, x1) *
           poincare_edge_transport(v1, x1, v0, x1) * poincare_edge_transport(v0, x1, v0, x0);
}

/// Horizontal coefficient data on one lift component, fixed by its value at
/// an anchor parameter.
struct HorizontalCoefficient {
    int shift = 0;
    double anchor_t = 0.0;
    Vector value;
};

/// Fourier transform of horizontal coefficient data: per branch of L over the
/// base point, the lattice sum of coefficient times kernel.
class ThetaSection {
public:
    ThetaSection(SceneObject object, std::vector<HorizontalCoefficient> coefficients, int K = 25)
        : object_(std::move(object)), coefficients_(std::move(coefficients)), K_(K) {
        const auto& L = object_.graph;
        if (K_ < 1) throw Error("theta section: truncation K must be >= 1");
        for (const auto& coef : coefficients_) {
            if (coef.value.size() != object_.rank())
                throw Error("theta section: coefficient size does not match rank");
            const bool zero = coef.value.norm() == 0.0;
            const LiftComponent comp = component(coef.shift);
            if (comp.is_line()) {
                if (coef.shift < 0 || coef.shift >= std::abs(L.p))
                    throw Error("theta section: line shift out of range");
                if (!zero && L.p < 0)
                    throw RefusalError("object '" + L.id +
                                       "': horizontal coefficients grow on negative-slope lines");
            } else if (!zero) {
                const Matrix mono = circle_twisted_monodromy(object_.local_system, comp);
                const Vector v0 = transport_twisted(object_.local_system, comp, coef.anchor_t, 0.0) * coef.value;
                if ((mono * v0 - v0).norm() > 1e-9 * v0.norm())
                    throw RefusalError("object '" + L.id + "': circle coefficient is not single-valued");
            }
        }
    }

    const SceneObject& object() const { return object_; }
    const std::vector<HorizontalCoefficient>& coefficients() const { return coefficients_; }
    int truncation() const { return K_; }

    LiftComponent component(int shift) const {
        const auto& L = object_.graph;
        return {L, L.p != 0 ? ComponentKind::Line : ComponentKind::Circle, shift};
    }

    /// Coefficient at the lift point (t, Y(t) + r).
    Vector coefficient_at(double t, long r) const {
        const auto& L = object_.graph;
        Vector out = Vector::Zero(object_.rank());
        int shift = 0;
        double s = t;
        if (L.p != 0) {
            const long ap = std::abs(L.p);
            shift = static_cast<int>(((r % ap) + ap) % ap);
            s = t + static_cast<double>(L.q) * static_cast<double>((r - shift) / L.p);
        } else {
            shift = static_cast<int>(r);
        }
        for (const auto& coef : coefficients_) {
            if (coef.shift != shift || coef.value.norm() == 0.0) continue;
            out += transport_twisted(object_.local_system, component(shift), coef.anchor_t, s) * coef.value;
        }
        return out;
    }

    bool has_line_data() const {
        return object_.graph.p != 0 &&
               std::any_of(coefficients_.begin(), coefficients_.end(),
                           [](const auto& c) { return c.value.norm() != 0.0; });
    }

private:
    SceneObject object_;
    std::vector<HorizontalCoefficient> coefficients_;
    int K_;
};

struct ThetaValue {
    std::vector<Vector> branches;   // branch j sits over parameter t + j
    std::vector<double> abs_sums;   // sum of |term| per branch
    double truncation_bound = 0.0;
};

/// Lattice shifts 0, -1, 1, -2, 2, ... up to K, for a fixed summation order.
inline std::vector<long> ascending_shifts(int K) {
    std::vector<long> out{0};
    for (long k = 1; k <= K; ++k) {
        out.push_back(-k);
        out.push_back(k);
    }
    return out;
}

inline ThetaValue theta_eval(const ThetaSection& sec, const MirrorPoint& P) {
    const auto& obj = sec.object();
    const auto& L = obj.graph;
    const int n = obj.rank();
    ThetaValue out;
    const bool lines = sec.has_line_data();
    // Decay rate of the coefficients along the lattice, |term| ~ exp(-pi sigma y^2).
    const double sigma = L.p != 0 ? static_cast<double>(L.q) / std::abs(L.p) : 0.0;
    const auto shifts = ascending_shifts(sec.truncation());
    for (int j = 0; j < L.q; ++j) {
        const double t = P.t + j;
        const double y = L.lift(t);
        Vector sum = Vector::Zero(n);
        double abs_sum = 0.0;
        if (lines) {
            const long center = -std::lround(y);
            double c_est = 0.0;
            for (long k : shifts) {
                const long r = center + k;
                const double v = y + static_cast<double>(r);
                const Vector term = sec.coefficient_at(t, r) * kernel(v, P.xdual);
                sum += term;
                const double mag = term.norm();
                abs_sum += mag;
                c_est = std::max(c_est, mag * std::exp(std::min(700.0, std::numbers::pi * sigma * v * v)));
            }
            double tail = 0.0;
            for (int jj = sec.truncation() + 1; jj <= sec.truncation() + 60; ++jj) {
                const double d = jj - 0.5;
                tail += std::exp(-std::numbers::pi * sigma * d * d);
            }
            out.truncation_bound = std::max(out.truncation_bound, 2.0 * c_est * tail);
        } else {
            for (const auto& coef : sec.coefficients()) {
                if (coef.value.norm() == 0.0) continue;
                const Vector term = sec.coefficient_at(t, coef.shift) * kernel(y + coef.shift, P.xdual);
                sum += term;
                abs_sum += term.norm();
            }
        }
        out.truncation_bound = std::max(out.truncation_bound, 4e-16 * abs_sum);
        out.branches.push_back(std::move(sum));
        out.abs_sums.push_back(abs_sum);
    }
    return out;
}

/// Horizontal sections anchored at the first positive crossing of every
/// positive-slope line (value (1,...,1)); single-valued horizontal sections
/// on circles when the twisted monodromy has eigenvalue 1; otherwise the zero
/// section.
inline ThetaSection canonical_theta_section(const SceneObject& obj, int K = 25) {
    const auto& L = obj.graph;
    const int n = obj.rank();
    std::vector<HorizontalCoefficient> coefs;
    if (L.p > 0) {
        for (const auto& comp : lift_components(L, default_window(L))) {
            const auto pts = zero_crossings(comp);
            const auto first = std::find_if(pts.begin(), pts.end(), [](const auto& x) { return x.positive(); });
            coefs.push_back({comp.shift, first != pts.end() ? first->t : 0.0, Vector::Ones(n)});
        }
    } else if (L.p == 0) {
        for (const auto& comp : lift_components(L, default_window(L))) {
            const Matrix mono = circle_twisted_monodromy(obj.local_system, comp);
            Eigen::JacobiSVD<Matrix> svd(mono - Matrix::Identity(n, n), Eigen::ComputeFullV);
            const auto& s = svd.singularValues();
            if (s(n - 1) <= 1e-9 * std::max(1.0, mono.norm()))
                coefs.push_back({comp.shift, 0.0, svd.matrixV().col(n - 1)});
        }
    }
    return {obj, std::move(coefs), K};
}

namespace detail {

/// Second-order central difference estimate of the connection-inclusive
/// dbar operator per branch: (1/2)(d_x + i d_t) S + pi x Y'(t) S.
inline std::vector<Vector> dbar_estimate(const ThetaSection& sec, const MirrorPoint& P, double h) {
    const auto& L = sec.object().graph;
    const auto xp = theta_eval(sec, {P.t, P.xdual + h});
    const auto xm = theta_eval(sec, {P.t, P.xdual - h});
    const auto tp = theta_eval(sec, {P.t + h, P.xdual});
    const auto tm = theta_eval(sec, {P.t - h, P.xdual});
    const auto c = theta_eval(sec, P);
    std::vector<Vector> out;
    for (std::size_t j = 0; j < c.branches.size(); ++j) {
        const Vector dx = (xp.branches[j] - xm.branches[j]) / (2 * h);
        const Vector dt = (tp.branches[j] - tm.branches[j]) / (2 * h);
        const double slope = L.slope(P.t + static_cast<double>(j));
        out.push_back(0.5 * (dx + imag_unit * dt) + std::numbers::pi * P.xdual * slope * c.branches[j]);
    }
    return out;
}

inline double normalized_max(const std::vector<Vector>& d, const ThetaValue& c) {
    double worst = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (c.abs_sums[j] == 0.0) continue;
        worst = std::max(worst, d[j].norm() / c.abs_sums[j]);
    }
    return worst;
}

}  // namespace detail

/// Plain second-order residual |dbar_A S| / sum|terms|, maximized over
/// branches. Decays like h^2.
inline double dbar_residual_raw(const ThetaSection& sec, const MirrorPoint& P, double h) {
    return detail::normalized_max(detail::dbar_estimate(sec, P, h), theta_eval(sec, P));
}

/// Residual of the Richardson-extrapolated (h, h/2) second-order estimate.
inline double dbar_residual(const ThetaSection& sec, const MirrorPoint& P, double h) {
    const auto coarse = detail::dbar_estimate(sec, P, h);
    auto fine = detail::dbar_estimate(sec, P, h / 2);
    for (std::size_t j = 0; j < fine.size(); ++j) fine[j] = (4.0 * fine[j] - coarse[j]) / 3.0;
    return detail::normalized_max(fine, theta_eval(sec, P));
}

/// Plain Cauchy-Riemann residual of g = S exp(pi (p/q) x^2) on straight
/// graphs, Richardson-extrapolated like dbar_residual.
inline double gauge_cr_residual(const ThetaSection& sec, const MirrorPoint& P, double h) {
    const auto& L = sec.object().graph;
    if (!L.is_straight()) throw UnsupportedError("gauge test needs a straight graph");
    const double slope = static_cast<double>(L.p) / L.q;
    auto g = [&](double t, double x) {
        auto v = theta_eval(sec, {t, x});
        for (auto& b : v.branches) b *= std::exp(std::numbers::pi * slope * x * x);
        return v.branches;
    };
    auto estimate = [&](double step) {
        const auto xp = g(P.t, P.xdual + step), xm = g(P.t, P.xdual - step);
        const auto tp = g(P.t + step, P.xdual), tm = g(P.t - step, P.xdual);
        std::vector<Vector> out;
        for (std::size_t j = 0; j < xp.size(); ++j)
            out.push_back(0.5 * ((xp[j] - xm[j]) + imag_unit * (tp[j] - tm[j])) / (2 * step));
        return out;
    };
    const auto coarse = estimate(h);
    const auto fine = estimate(h / 2);
    const auto c = theta_eval(sec, P);
    const double scale = std::exp(std::numbers::pi * slope * P.xdual * P.xdual);
    double worst = 0.0;
    for (std::size_t j = 0; j < fine.size(); ++j) {
        if (c.abs_sums[j] == 0.0) continue;
        worst = std::max(worst, ((4.0 * fine[j] - coarse[j]) / 3.0).norm() / (scale * c.abs_sums[j]));
    }
    return worst;
}

struct BundleInvariants {
    int rank = 0;
    int degree = 0;
    int euler = 0;
};

inline BundleInvariants bundle_invariants(const SceneObject& obj) {
    const int n = obj.rank();
    return {n * obj.graph.q, n * obj.graph.p, n * obj.graph.p};
}

/// Signed count of zero crossings over all lift components, times rank.
inline int signed_crossing_degree(const SceneObject& obj) {
    int count = 0;
    for (const auto& comp : crossing_components(obj.graph)) {
        for (const auto& x : zero_crossings(comp)) count += x.positive() ? 1 : -1;
    }
    return count * obj.rank();
}

inline SceneObject unit_object(std::string id = "unit") {
    return {{std::move(id), 1, 0, 0.0, {}}, LocalSystem::trivial(1)};
}

/// (-p, q, -c, -W) with inverse-transpose monodromy.
inline SceneObject dual_object(const SceneObject& obj) {
    SceneObject out = obj;
    out.graph.id = "dual(" + obj.graph.id + ")";
    out.graph.p = -obj.graph.p;
    out.graph.c = -obj.graph.c;
    for (auto& h : out.graph.wiggle) {
        h.a = -h.a;
        h.b = -h.b;
    }
    out.local_system.monodromy = obj.local_system.monodromy.inverse().transpose();
    return out;
}

inline Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Fiberwise sum of the two supports. One graph per pairing of branches
/// (gcd(q1, q2) of them) over the common cover lcm(q1, q2); the local system
/// is the tensor product. A pairing whose winding shares a factor d with the
/// cover degree is reduced to a d-fold cover with the pushed-forward local
/// system when its wiggle allows it.
inline std::vector<SceneObject> convolve(const SceneObject& o1, const SceneObject& o2) {
    const auto& L1 = o1.graph;
    const auto& L2 = o2.graph;
    const int Q = std::lcm(L1.q, L2.q);
    const int g = std::gcd(L1.q, L2.q);
    const int f1 = Q / L1.q;
    const int f2 = Q / L2.q;
    const Matrix mono = kronecker(matrix_power(o1.local_system.monodromy, f1),
                                  matrix_power(o2.local_system.monodromy, f2));
    std::vector<SceneObject> out;
    for (int j = 0; j < g; ++j) {
        LagrangianGraph G;
        G.id = L1.id + "*" + L2.id + (g > 1 ? "#" + std::to_string(j) : "");
        G.q = Q;
        G.p = L1.p * f1 + L2.p * f2;
        G.c = L1.c + L2.c + static_cast<double>(L2.p) * j / L2.q;
        std::map<int, std::pair<double, double>> harmonics;
        for (const auto& h : L1.wiggle) {
            auto& acc = harmonics[h.m * f1];
            acc.first += h.a;
            acc.second += h.b;
        }
        for (const auto& h : L2.wiggle) {
            const double phi = two_pi * h.m * j / L2.q;
            auto& acc = harmonics[h.m * f2];
            acc.first += h.a * std::cos(phi) + h.b * std::sin(phi);
            acc.second += -h.a * std::sin(phi) + h.b * std::cos(phi);
        }
        for (const auto& [m, ab] : harmonics) G.wiggle.push_back({m, ab.first, ab.second});

        Matrix T = mono;
        const int d = G.p != 0 ? std::gcd(std::abs(G.p), G.q) : 1;
        if (d > 1) {
            const bool reducible = std::all_of(G.wiggle.begin(), G.wiggle.end(),
                                               [&](const Harmonic& h) { return h.m % d == 0; });
            if (!reducible)
                throw UnsupportedError("convolution of '" + L1.id + "' and '" + L2.id +
                                       "' is an immersed curve with non-coprime winding");
            G.p /= d;
            G.q /= d;
            for (auto& h : G.wiggle) h.m /= d;
            const Eigen::Index n = mono.rows();
            T = Matrix::Zero(n * d, n * d);
            for (int i = 0; i + 1 < d; ++i) T.block((i + 1) * n, i * n, n, n) = Matrix::Identity(n, n);
            T.block(0, (d - 1) * n, n, n) = mono;
        }
        out.push_back({std::move(G), LocalSystem{T}});
    }
    return out;
}

/// Max over a grid x grid sample of |Four(F1 * F2) - Four(F1) Four(F2)|,
/// where the convolved coefficients are the lattice convolution of the two
/// coefficient sequences. Rank one, q = 1 only.
inline double tensor_compat_check(const SceneObject& o1, const SceneObject& o2, int grid = 10, int K = 30) {
    if (o1.rank() != 1 || o2.rank() != 1 || o1.graph.q != 1 || o2.graph.q != 1)
        throw UnsupportedError("tensor_compat_check needs rank-one objects over the base (q = 1)");
    const ThetaSection s1 = canonical_theta_section(o1, K);
    const ThetaSection s2 = canonical_theta_section(o2, K);
    const SceneObject conv = convolve(o1, o2).front();

    // Convolved coefficient sequence at t = 0, one value per lattice index.
    auto convolved = [&](long R) {
        const long c1 = -std::lround(o1.graph.lift(0.0));
        cplx acc = 0.0;
        for (long k : ascending_shifts(K)) {
            const long r1 = c1 + k;
            acc += s1.coefficient_at(0.0, r1)(0) * s2.coefficient_at(0.0, R - r1)(0);
        }
        return acc;
    };
    std::vector<HorizontalCoefficient> coefs;
    const auto& G = conv.graph;
    if (G.p > 0) {
        for (int r = 0; r < G.p; ++r) coefs.push_back({r, 0.0, Vector::Constant(1, convolved(r))});
    } else if (G.p == 0) {
        const long center = -std::lround(G.lift(0.0));
        for (long k : ascending_shifts(K)) {
            const cplx v = convolved(center + k);
            if (v != 0.0) coefs.push_back({static_cast<int>(center + k), 0.0, Vector::Constant(1, v)});
        }
    } else {
        throw UnsupportedError("convolution has negative slope; its coefficients do not decay");
    }
    const ThetaSection sc(conv, std::move(coefs), K);

    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const MirrorPoint P{(i + 0.5) / grid, (j + 0.5) / grid};
            const cplx lhs = theta_eval(sc, P).branches[0](0);
            const cplx rhs = theta_eval(s1, P).branches[0](0) * theta_eval(s2, P).branches[0](0);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

}  // namespace lagmirror
