#pragma once

// Singular values of a sparse banded complex matrix. The band is reduced to
// real bidiagonal form (zgbbrd); singular values are then either all computed
// (dbdsqr) or, for rank decisions, located by bisection on the Golub-Kahan
// tridiagonal (dstebz), which only resolves the ones below a threshold.

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

namespace lagmirror {

struct Triplet {
    long row = 0;
    long col = 0;
    std::complex<double> value;
};

namespace detail {

struct Bidiagonal {
    std::vector<double> d;
    std::vector<double> e;  // superdiagonal
};

inline Bidiagonal band_to_bidiagonal(long rows, long cols, const std::vector<Triplet>& entries) {
    if (rows < cols) {
        // Same singular values; zgbbrd is far slower on wide matrices.
        std::vector<Triplet> t(entries);
        for (auto& x : t) std::swap(x.row, x.col);
        return band_to_bidiagonal(cols, rows, t);
    }
    const long k = std::min(rows, cols);
    long kl = 0, ku = 0;
    for (const auto& t : entries) {
        kl = std::max(kl, t.row - t.col);
        ku = std::max(ku, t.col - t.row);
    }
    const long ldab = kl + ku + 1;
    std::vector<std::complex<double>> ab(static_cast<std::size_t>(ldab * cols));
    for (const auto& t : entries) ab[static_cast<std::size_t>(ku + t.row - t.col + t.col * ldab)] += t.value;

    Bidiagonal b{std::vector<double>(static_cast<std::size_t>(k)),
                 std::vector<double>(static_cast<std::size_t>(std::max(1L, k - 1)))};
    std::complex<double> dummy;
    const lapack_int info =
        LAPACKE_zgbbrd(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(rows), static_cast<lapack_int>(cols), 0,
                       static_cast<lapack_int>(kl), static_cast<lapack_int>(ku), ab.data(),
                       static_cast<lapack_int>(ldab), b.d.data(), b.e.data(), &dummy, 1, &dummy, 1, &dummy, 1);
    if (info != 0) throw std::runtime_error("zgbbrd failed: info " + std::to_string(info));
    return b;
}

}  // namespace detail

/// All singular values in descending order.
inline std::vector<double> banded_singular_values(long rows, long cols, const std::vector<Triplet>& entries) {
    const long k = std::min(rows, cols);
    if (k == 0) return {};
    auto b = detail::band_to_bidiagonal(rows, cols, entries);
    double dummy = 0.0;
    const lapack_int info = LAPACKE_dbdsqr(LAPACK_COL_MAJOR, 'U', static_cast<lapack_int>(k), 0, 0,
                                           0, b.d.data(), b.e.data(), &dummy, 1, &dummy, 1, &dummy, 1);
    if (info != 0) throw std::runtime_error("dbdsqr failed: info " + std::to_string(info));
    std::sort(b.d.begin(), b.d.end(), std::greater<>());
    return b.d;
}

struct RankProfile {
    long rank = 0;
    double sigma_max = 0.0;
    std::vector<double> small;  // singular values <= rank_tol * sigma_max
};

/// Numerical rank with the relative threshold rank_tol * sigma_max.
inline RankProfile banded_rank(long rows, long cols, const std::vector<Triplet>& entries, double rank_tol) {
    RankProfile out;
    const long k = std::min(rows, cols);
    if (k == 0) return out;
    const auto b = detail::band_to_bidiagonal(rows, cols, entries);

    // Golub-Kahan form: zero diagonal, off-diagonal d1, e1, d2, e2, ...;
    // its eigenvalues are the +- singular values.
    const long n = 2 * k;
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0), off(static_cast<std::size_t>(n - 1));
    for (long i = 0; i < k; ++i) {
        off[static_cast<std::size_t>(2 * i)] = b.d[static_cast<std::size_t>(i)];
        if (i + 1 < k) off[static_cast<std::size_t>(2 * i + 1)] = b.e[static_cast<std::size_t>(i)];
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> iblock(static_cast<std::size_t>(n)), isplit(static_cast<std::size_t>(n));
    lapack_int m = 0, nsplit = 0;
    auto stebz = [&](char range, double vl, double vu, lapack_int il, lapack_int iu) {
        const lapack_int info = LAPACKE_dstebz(range, 'E', static_cast<lapack_int>(n), vl, vu, il, iu, 0.0,
                                               diag.data(), off.data(), &m, &nsplit, w.data(), iblock.data(),
                                               isplit.data());
        if (info != 0) throw std::runtime_error("dstebz failed: info " + std::to_string(info));
    };
    stebz('I', 0.0, 0.0, static_cast<lapack_int>(n), static_cast<lapack_int>(n));
    out.sigma_max = m > 0 ? std::abs(w[0]) : 0.0;
    if (out.sigma_max == 0.0) {
        out.small.assign(static_cast<std::size_t>(k), 0.0);
        return out;
    }
    const double thr = rank_tol * out.sigma_max;
    stebz('V', -thr, thr, 0, 0);
    for (lapack_int i = 0; i < m; ++i)
        if (w[static_cast<std::size_t>(i)] >= 0.0) out.small.push_back(w[static_cast<std::size_t>(i)]);
    // A zero singular value contributes +0 and -0; count pairs, not signs.
    const long count = (m + 1) / 2;
    out.small.resize(static_cast<std::size_t>(count), 0.0);
    std::sort(out.small.begin(), out.small.end());
    out.rank = k - count;
    return out;
}

}  // namespace lagmirror
