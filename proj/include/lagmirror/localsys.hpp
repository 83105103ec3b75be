#pragma once

// Local systems on Lagrangian graphs and the twisted system obtained by
// adding the Gaussian weight exp(-2 pi int Y dt) to the pulled-back
// connection on the lift.

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"
#include "geometry.hpp"

namespace lagmirror {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Rank-n flat bundle on a connected graph, encoded by its monodromy once
/// around L in the positive base direction, seam at t = 0 mod q.
struct LocalSystem {
    Matrix monodromy = Matrix::Identity(1, 1);

    static LocalSystem trivial(int rank = 1) { return {Matrix::Identity(rank, rank)}; }

    int rank() const { return static_cast<int>(monodromy.rows()); }

    bool is_quasi_unitary(double tol = 1e-9) const {
        Eigen::ComplexEigenSolver<Matrix> es(monodromy, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            if (std::abs(std::abs(es.eigenvalues()[i]) - 1.0) > tol) return false;
        }
        return true;
    }

    void validate(const std::string& id) const {
        if (monodromy.rows() < 1 || monodromy.rows() != monodromy.cols())
            throw ValidationError(id, "monodromy must be a non-empty square matrix");
        if (!monodromy.allFinite()) throw ValidationError(id, "monodromy entries must be finite");
        Eigen::JacobiSVD<Matrix> svd(monodromy);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) <= 1e-12 * std::max(1.0, s(0)))
            throw ValidationError(id, "monodromy matrix is singular");
    }
};

/// M^k for any integer k.
inline Matrix matrix_power(const Matrix& m, long k) {
    Matrix base = k < 0 ? Matrix(m.inverse()) : m;
    unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
    Matrix result = Matrix::Identity(m.rows(), m.cols());
    while (e) {
        if (e & 1UL) result = result * base;
        base = base * base;
        e >>= 1UL;
    }
    return result;
}

/// Net number of seams (t = 0 mod q) crossed positively on the way from t0 to t1.
inline long seam_crossings(double q, double t0, double t1) {
    return static_cast<long>(std::floor(t1 / q)) - static_cast<long>(std::floor(t0 / q));
}

/// Parallel transport of the pulled-back local system along the component
/// from t0 to t1.
inline Matrix transport_flat(const LocalSystem& ls, const LiftComponent& comp, double t0, double t1) {
    return matrix_power(ls.monodromy, seam_crossings(comp.period(), t0, t1));
}

/// int_{t0}^{t1} of the branch, by adaptive quadrature.
inline double branch_integral(const LiftComponent& comp, double t0, double t1) {
    return -oriented_area(comp, t0, t1);
}

/// Transport of the twisted system: flat part times exp(-2 pi int Y).
inline Matrix transport_twisted(const LocalSystem& ls, const LiftComponent& comp, double t0, double t1) {
    return transport_flat(ls, comp, t0, t1) * std::exp(-two_pi * branch_integral(comp, t0, t1));
}

/// Twisted monodromy once around a circle component, starting at t = 0.
inline Matrix circle_twisted_monodromy(const LocalSystem& ls, const LiftComponent& comp) {
    return transport_twisted(ls, comp, 0.0, comp.period());
}

/// Covariantly constant section s(t) = transport_twisted(anchor, t) v.
class HorizontalSection {
public:
    HorizontalSection(LocalSystem ls, LiftComponent comp, double anchor, Vector value)
        : ls_(std::move(ls)), comp_(std::move(comp)), anchor_(anchor), value_(std::move(value)) {
        if (value_.size() != ls_.rank()) throw Error("horizontal_section: vector size must match rank");
    }

    Vector operator()(double t) const { return transport_twisted(ls_, comp_, anchor_, t) * value_; }

    /// Rapidly decreasing at both ends. Lines decay iff their slope is
    /// positive; circles are compact.
    bool decays() const { return !comp_.is_line() || comp_.graph.p > 0; }

    const LiftComponent& component() const { return comp_; }
    double anchor() const { return anchor_; }
    const Vector& value() const { return value_; }

private:
    LocalSystem ls_;
    LiftComponent comp_;
    double anchor_;
    Vector value_;
};

inline HorizontalSection horizontal_section(const LocalSystem& ls, const LiftComponent& comp,
                                            double anchor, const Vector& v) {
    return {ls, comp, anchor, v};
}

inline HorizontalSection horizontal_section(const LocalSystem& ls, const LiftComponent& comp,
                                            const IntersectionPoint& anchor, const Vector& v) {
    if (anchor.shift != comp.shift) throw Error("horizontal_section: anchor is not on the component");
    return {ls, comp, anchor.t, v};
}

struct QuasiUnitarization {
    LocalSystem system;
    /// log(|det T|^(1/n)) / (2 pi): fiber shift accumulated over one loop of L.
    double coefficient = 0.0;
};

/// Rescales the monodromy by |det T|^(-1/n). Eigenvalues sharing a common
/// modulus end up on the unit circle; mixed moduli stay mixed.
inline QuasiUnitarization quasi_unitarize(const LocalSystem& ls) {
    const double det = std::abs(ls.monodromy.determinant());
    if (!(det > 0.0) || !std::isfinite(det)) throw Error("quasi_unitarize: singular monodromy");
    const double n = ls.rank();
    const double log_scale = std::log(det) / n;
    QuasiUnitarization out;
    out.system.monodromy = ls.monodromy * std::exp(-log_scale);
    out.coefficient = log_scale / two_pi;
    return out;
}

/// Graph moved by the invariant 1-form that pairs with quasi_unitarize: the
/// twisted system of (apply_twist(L, k), T |det T|^(-1/n)) is gauge equivalent
/// to that of (L, T).
inline LagrangianGraph apply_twist(LagrangianGraph L, double coefficient) {
    L.c -= coefficient / L.q;
    return L;
}

}  // namespace lagmirror
