#pragma once

// SVG picture of a scene on the fundamental domain and CSV output of theta
// samples.

#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include "fourier.hpp"
#include "scene.hpp"

namespace lagmirror {

inline std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline double wrap01(double v) { return v - std::floor(v); }

}  // namespace detail

/// Fundamental domain [0,1)^2 with t to the right and y upward. One path per
/// object (broken where the curve wraps), +/- markers at the zero crossings
/// and the zero section dashed.
inline void render_svg(const Scene& scene, std::ostream& out) {
    constexpr double size = 400.0, margin = 40.0;
    auto X = [&](double t) { return margin + t * size; };
    auto Y = [&](double y) { return margin + (1.0 - y) * size; };
    const double total = size + 2 * margin;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total << "\" height=\"" << total
        << "\" viewBox=\"0 0 " << total << ' ' << total << "\">\n";
    out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
        << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size << "\" height=\"" << size << "\"/>\n"
        << "</g>\n"
        << "<text x=\"" << margin + size / 2 << "\" y=\"" << total - 10 << "\" text-anchor=\"middle\">t</text>\n"
        << "<text x=\"12\" y=\"" << margin + size / 2 << "\" text-anchor=\"middle\">y</text>\n"
        << "<text x=\"" << margin << "\" y=\"" << total - 22 << "\" text-anchor=\"middle\">0</text>\n"
        << "<text x=\"" << margin + size << "\" y=\"" << total - 22 << "\" text-anchor=\"middle\">1</text>\n";
    if (scene.objects.empty()) {
        out << "</svg>\n";
        return;
    }
    out << "<line class=\"zero-section\" x1=\"" << X(0) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(1) << "\" y2=\"" << Y(0)
        << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::size_t color = 0;
    for (const auto& obj : scene.objects) {
        const auto& L = obj.graph;
        const int samples = 400 * L.q * (1 + L.max_harmonic()) + 400 * std::abs(L.p);
        std::string d;
        double pt = 0.0, py = 0.0;
        for (int i = 0; i <= samples; ++i) {
            const double t = static_cast<double>(L.q) * i / samples;
            const double tt = detail::wrap01(t), yy = detail::wrap01(L.lift(t));
            const bool jump = i == 0 || std::abs(tt - pt) > 0.5 || std::abs(yy - py) > 0.5;
            d += (jump ? "M" : "L") + detail::fmt_px(X(tt)) + ',' + detail::fmt_px(Y(yy)) + ' ';
            pt = tt;
            py = yy;
        }
        const char* stroke = palette[color++ % std::size(palette)];
        out << "<path class=\"curve\" data-id=\"" << L.id << "\" d=\"" << d << "\" stroke=\"" << stroke
            << "\" fill=\"none\"/>\n";
        for (const auto& comp : crossing_components(L)) {
            for (const auto& x : zero_crossings(comp)) {
                const double tx = X(detail::wrap01(x.t));
                out << "<text class=\"marker " << (x.positive() ? "positive" : "negative") << "\" x=\""
                    << detail::fmt_px(tx) << "\" y=\"" << detail::fmt_px(Y(0) - 6) << "\" fill=\"" << stroke
                    << "\" text-anchor=\"middle\">" << (x.positive() ? "+" : "-") << "</text>\n";
            }
        }
    }
    out << "</svg>\n";
}

struct ThetaSample {
    double t = 0.0;
    double xdual = 0.0;
    int branch = 0;  // j * n + a for branch j, fiber component a
    cplx value;
    double trunc_bound = 0.0;
};

/// Samples the canonical theta section on an A x B grid of the mirror torus.
/// Points are evaluated concurrently; output order is row-major in (t, x).
inline std::vector<ThetaSample> sample_theta(const ThetaSection& sec, int A, int B, int workers = 4) {
    if (A < 1 || B < 1) throw Error("sample grid must be at least 1x1");
    const long total = static_cast<long>(A) * B;
    std::vector<std::vector<ThetaSample>> per_point(static_cast<std::size_t>(total));
    auto work = [&](long begin, long end) {
        for (long k = begin; k < end; ++k) {
            const MirrorPoint P{static_cast<double>(k / B) / A, static_cast<double>(k % B) / B};
            const auto v = theta_eval(sec, P);
            auto& dst = per_point[static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < v.branches.size(); ++j)
                for (Eigen::Index a = 0; a < v.branches[j].size(); ++a)
                    dst.push_back({P.t, P.xdual, static_cast<int>(j * v.branches[j].size() + a), v.branches[j](a),
                                   v.truncation_bound});
        }
    };
    std::vector<std::future<void>> jobs;
    const long chunk = (total + workers - 1) / workers;
    for (long b = 0; b < total; b += chunk) jobs.push_back(std::async(std::launch::async, work, b, std::min(total, b + chunk)));
    for (auto& j : jobs) j.get();
    std::vector<ThetaSample> out;
    for (auto& v : per_point) out.insert(out.end(), v.begin(), v.end());
    return out;
}

inline void emit_csv(const std::vector<ThetaSample>& samples, std::ostream& out) {
    out << "t,xdual,branch,re,im,trunc_bound\n";
    for (const auto& s : samples)
        out << fmt17(s.t) << ',' << fmt17(s.xdual) << ',' << s.branch << ',' << fmt17(s.value.real()) << ','
            << fmt17(s.value.imag()) << ',' << fmt17(s.trunc_bound) << '\n';
}

}  // namespace lagmirror
