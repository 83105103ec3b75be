#pragma once

// Runs every cohomology pipeline on every object of a scene and cross-checks
// them.

#include <algorithm>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "derham.hpp"
#include "floer.hpp"
#include "fourier.hpp"
#include "scene.hpp"

namespace lagmirror {

struct ObjectReport {
    std::string id;
    std::string error;  // empty when every pipeline ran
    Dims floer;
    Dims analytic;
    Dims discretized;
    int d_rank = 0;
    double d_mismatch = 0.0;  // max |build_complex d - boundary transport d|
    int euler = 0;            // n p
    double dbar_max = 0.0;
    bool equal_direction_arcs = false;

    bool dims_agree = false;
    bool d_agree = false;
    bool euler_ok = false;
    bool dbar_ok = false;
    bool surjective = false;

    bool pass() const { return error.empty() && dims_agree && d_agree && euler_ok && dbar_ok && surjective; }
};

struct VerificationReport {
    std::vector<ObjectReport> objects;

    bool pass() const {
        return std::all_of(objects.begin(), objects.end(), [](const auto& o) { return o.pass(); });
    }
};

/// Max dbar residual of the canonical theta section over a fixed sample of
/// points away from the branch seams.
inline double sample_dbar(const SceneObject& obj, int K, int points = 16, double h = 1e-3, unsigned seed = 1) {
    const auto sec = canonical_theta_section(obj, K);
    if (sec.coefficients().empty()) return 0.0;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> t(0.05, 0.95), x(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        const double ti = t(rng);
        worst = std::max(worst, dbar_residual(sec, {ti, x(rng)}, h));
    }
    return worst;
}

inline ObjectReport verify_object(const SceneObject& obj, const SceneParams& params) {
    ObjectReport r;
    r.id = obj.id();
    r.euler = bundle_invariants(obj).euler;
    try {
        obj.validate();
        const auto fc = build_complex(obj);
        r.floer = cohomology_dims(fc, params.rank_tol);
        r.d_rank = numerical_rank(fc.d, params.rank_tol);
        r.equal_direction_arcs = fc.equal_direction_arcs;
        const Matrix bt = boundary_transport_differential(obj);
        r.d_mismatch = fc.d.size() == 0 ? 0.0 : (fc.d - bt).cwiseAbs().maxCoeff();
        r.d_agree = bt.rows() == fc.d.rows() && bt.cols() == fc.d.cols() && r.d_mismatch <= 1e-9;

        const auto an = analytic_dims(obj, params.rank_tol);
        r.analytic = an.dims;
        r.surjective = an.surjective;
        r.discretized = discretized_dims(obj, params.grid_h, params.window, params.rank_tol).dims;
        r.dims_agree = r.floer == r.analytic && r.floer == r.discretized;
        r.euler_ok = r.floer.h0 - r.floer.h1 == r.euler;

        r.dbar_max = sample_dbar(obj, params.K);
        r.dbar_ok = r.dbar_max <= params.dbar_tol;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

/// Objects run concurrently; the report keeps scene order.
inline VerificationReport run_verify(const Scene& scene, bool parallel = true) {
    VerificationReport report;
    std::vector<std::future<ObjectReport>> jobs;
    for (const auto& obj : scene.objects)
        jobs.push_back(std::async(parallel ? std::launch::async : std::launch::deferred,
                                  [&obj, &scene] { return verify_object(obj, scene.params); }));
    for (auto& j : jobs) report.objects.push_back(j.get());
    return report;
}

inline json to_json(const Dims& d) { return {{"h0", d.h0}, {"h1", d.h1}}; }

inline json to_json(const ObjectReport& r) {
    json j = {{"id", r.id},
              {"pass", r.pass()},
              {"floer", to_json(r.floer)},
              {"analytic", to_json(r.analytic)},
              {"discretized", to_json(r.discretized)},
              {"d_rank", r.d_rank},
              {"d_mismatch", r.d_mismatch},
              {"euler", r.euler},
              {"dbar_max", r.dbar_max},
              {"dims_agree", r.dims_agree},
              {"d_agree", r.d_agree},
              {"euler_ok", r.euler_ok},
              {"dbar_ok", r.dbar_ok},
              {"surjective", r.surjective},
              {"equal_direction_arcs", r.equal_direction_arcs}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

inline json to_json(const VerificationReport& rep) {
    json objs = json::array();
    for (const auto& o : rep.objects) objs.push_back(to_json(o));
    return {{"pass", rep.pass()}, {"objects", objs}};
}

}  // namespace lagmirror
