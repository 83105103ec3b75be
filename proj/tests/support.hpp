#pragma once

// Independent oracles for the test suite. Nothing here calls into the
// library's numerics; only its data types are shared.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagmirror/lagmirror.hpp"

namespace oracle {

using cplx = std::complex<double>;
using lagmirror::Matrix;
using lagmirror::SceneObject;

inline constexpr double pi = std::numbers::pi;

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Y(t) written out from the harmonic data, without LagrangianGraph::lift.
inline double lift(const lagmirror::LagrangianGraph& L, double t) {
    double y = static_cast<double>(L.p) / L.q * t + L.c;
    for (const auto& h : L.wiggle) {
        const double w = 2 * pi * h.m * t / L.q;
        y += h.a * std::cos(w) + h.b * std::sin(w);
    }
    return y;
}

/// Sign changes of f on a fine grid, refined by plain bisection.
inline std::vector<double> roots(const std::function<double(double)>& f, double lo, double hi, int cells = 20000) {
    std::vector<double> out;
    const double step = (hi - lo) / cells;
    for (int i = 0; i < cells; ++i) {
        double a = lo + i * step, b = a + step;
        double fa = f(a), fb = f(b);
        if (fa == 0.0) {
            out.push_back(a);
            continue;
        }
        if ((fa < 0) == (fb < 0)) continue;
        for (int k = 0; k < 200 && b - a > 1e-15; ++k) {
            const double m = 0.5 * (a + b);
            const double fm = f(m);
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

inline Matrix random_unitary(int n, std::mt19937& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Matrix z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = cplx(N(rng), N(rng));
    Eigen::HouseholderQR<Matrix> qr(z);
    return qr.householderQ() * Matrix::Identity(n, n);
}

inline SceneObject straight(std::string id, int p, int q, double c, Matrix T = Matrix::Identity(1, 1)) {
    return {{std::move(id), q, p, c, {}}, {std::move(T)}};
}

inline SceneObject wiggle_scene(Matrix T = Matrix::Identity(1, 1)) {
    return {{"wiggle", 1, 1, 0.5, {{1, 0.0, 0.5}}}, {std::move(T)}};
}

inline SceneObject canonical() { return straight("canonical", 1, 1, 0.0); }

/// Random transversal object with a small wiggle and a unitary local system.
inline SceneObject random_object(std::mt19937& rng, int index) {
    std::uniform_int_distribution<int> P(-3, 3), Q(1, 3), N(1, 2), M(1, 3);
    std::uniform_real_distribution<double> U(0.0, 1.0), A(-0.25, 0.25);
    for (;;) {
        const int q = Q(rng);
        const int p = P(rng);
        if (p != 0 && std::gcd(p, q) != 1) continue;
        SceneObject obj = straight("r" + std::to_string(index), p, q, U(rng), random_unitary(N(rng), rng));
        const int terms = 1 + static_cast<int>(U(rng) * 2);
        for (int k = 0; k < terms; ++k) obj.graph.wiggle.push_back({M(rng), A(rng), A(rng)});
        try {
            obj.validate();
        } catch (const lagmirror::TransversalityError&) {
            continue;
        }
        return obj;
    }
}

/// Truncated lattice sum of exp(-pi (t+k)^2 (p/q)) e(t+k, x) for a straight
/// rank-one line with q = 1 and c = 0, summed over |k| <= K.
inline cplx theta_line(double t, double x, int K = 60) {
    cplx s = 0.0;
    for (int k = -K; k <= K; ++k) {
        const double v = t + k;
        s += std::exp(-pi * v * v) * std::exp(cplx(0.0, 2 * pi * x * v));
    }
    return s;
}

}  // namespace oracle
