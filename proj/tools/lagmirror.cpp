// Command line front end: inspect, floer, derham, fourier sample, convolve,
// verify, plot. Exit codes: 0 success, 1 verification failure, 2 invalid input.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagmirror/lagmirror.hpp"

namespace lm = lagmirror;
using lm::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_invalid = 2;

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw lm::Error("cannot write '" + out + "'");
    f << j.dump(2) << "\n";
}

json point_json(const lm::IntersectionPoint& x) { return {{"shift", x.shift}, {"t", x.t}}; }

json matrix_json(const lm::Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json inspect(const lm::Scene& scene) {
    json objs = json::array();
    for (const auto& o : scene.objects) {
        const auto inv = lm::bundle_invariants(o);
        int pos = 0, neg = 0;
        for (const auto& comp : lm::crossing_components(o.graph))
            for (const auto& x : lm::zero_crossings(comp)) (x.positive() ? pos : neg)++;
        objs.push_back({{"id", o.id()},
                        {"q", o.graph.q},
                        {"p", o.graph.p},
                        {"c", o.graph.c},
                        {"harmonics", o.graph.wiggle.size()},
                        {"rank", o.rank()},
                        {"bundle", {{"rank", inv.rank}, {"degree", inv.degree}, {"euler", inv.euler}}},
                        {"crossings", {{"positive", pos}, {"negative", neg}}},
                        {"quasi_unitary", o.local_system.is_quasi_unitary()}});
    }
    return {{"objects", objs}, {"params", lm::to_json(scene.params)}};
}

json floer_report(const lm::SceneObject& o, double rank_tol) {
    const auto fc = lm::build_complex(o);
    const auto dims = lm::cohomology_dims(fc, rank_tol);
    json f0 = json::array(), f1 = json::array();
    for (const auto& x : fc.F0) f0.push_back(point_json(x));
    for (const auto& x : fc.F1) f1.push_back(point_json(x));
    return {{"id", o.id()},
            {"rank", fc.rank},
            {"F0", f0},
            {"F1", f1},
            {"d", matrix_json(fc.d)},
            {"h0", dims.h0},
            {"h1", dims.h1},
            {"euler", lm::bundle_invariants(o).euler},
            {"equal_direction_arcs", fc.equal_direction_arcs}};
}

json derham_report(const lm::SceneObject& o, double h, double T, double rank_tol) {
    const auto an = lm::analytic_dims(o, rank_tol);
    const auto disc = lm::discretized_dims(o, h, T, rank_tol);
    json cases = json::array();
    for (const auto& cc : an.cases) {
        json c = {{"shift", cc.component.shift},
                  {"case", lm::to_string(cc.tag)},
                  {"t_lo", finite_or_null(cc.t_lo)},
                  {"t_hi", finite_or_null(cc.t_hi)},
                  {"positive_points", cc.positives.size()},
                  {"a", cc.a},
                  {"b", cc.b}};
        if (cc.tag == lm::CaseTag::Case1) {
            c["eigenvalue_one"] = cc.eigenvalue_one;
            c["twisted_monodromy"] = matrix_json(cc.twisted_monodromy);
        }
        cases.push_back(c);
    }
    json blocks = json::array();
    for (const auto& b : disc.blocks)
        blocks.push_back({{"shift", b.component.shift},
                          {"kind", b.component.is_line() ? "line" : "circle"},
                          {"rows", b.rows},
                          {"cols", b.cols},
                          {"h0", b.dims.h0},
                          {"h1", b.dims.h1}});
    return {{"id", o.id()},
            {"analytic", lm::to_json(an.dims)},
            {"discretized", lm::to_json(disc.dims)},
            {"h0", an.dims.h0},
            {"h1", an.dims.h1},
            {"euler", lm::bundle_invariants(o).euler},
            {"piece_h0", an.piece_h0},
            {"surjective", an.surjective},
            {"grid_h", h},
            {"window", T},
            {"cases", cases},
            {"blocks", blocks}};
}

std::pair<int, int> parse_grid(const std::string& s) {
    static const std::regex re(R"((\d+)[xX](\d+))");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw lm::ParseError("--grid must look like AxB, got '" + s + "'");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mirror-symmetry toolkit for Lagrangian graphs on the 2-torus"};
    app.require_subcommand(1);
    std::string scene_path;
    app.add_option("--scene", scene_path, "Scene JSON file")->required();

    std::string object_id, out;
    auto* cmd_inspect = app.add_subcommand("inspect", "Summarize every object of the scene");
    cmd_inspect->add_option("--out", out, "Write the report here instead of stdout");

    auto* cmd_floer = app.add_subcommand("floer", "Floer complex and its cohomology");
    cmd_floer->add_option("--object", object_id, "Object id")->required();
    cmd_floer->add_option("--out", out, "Write the report here instead of stdout");

    int grid_n = 0;
    double window = 0.0;
    auto* cmd_derham = app.add_subcommand("derham", "De Rham cohomology, analytic and discretized");
    cmd_derham->add_option("--object", object_id, "Object id")->required();
    cmd_derham->add_option("--grid", grid_n, "Grid points per unit length (step 1/N)")->check(CLI::PositiveNumber);
    cmd_derham->add_option("--window", window, "Distance kept beyond the outer crossings")->check(CLI::PositiveNumber);
    cmd_derham->add_option("--out", out, "Write the report here instead of stdout");

    std::string grid_spec;
    auto* cmd_fourier = app.add_subcommand("fourier", "Mirror-side evaluations");
    cmd_fourier->require_subcommand(1);
    auto* cmd_sample = cmd_fourier->add_subcommand("sample", "Sample the theta section on a grid as CSV");
    cmd_sample->add_option("--object", object_id, "Object id")->required();
    cmd_sample->add_option("--grid", grid_spec, "Grid size AxB (t by xdual)")->required();
    cmd_sample->add_option("--out", out, "CSV file")->required();

    std::vector<std::string> pair;
    auto* cmd_convolve = app.add_subcommand("convolve", "Convolve two objects into a new scene");
    cmd_convolve->add_option("--objects", pair, "Two object ids, A,B")->required()->delimiter(',')->expected(2);
    cmd_convolve->add_option("--out", out, "Scene file to write")->required();

    auto* cmd_verify = app.add_subcommand("verify", "Run and cross-check all pipelines");
    cmd_verify->add_option("--out", out, "Write the report here instead of stdout");

    auto* cmd_plot = app.add_subcommand("plot", "Draw the scene as SVG");
    cmd_plot->add_option("--out", out, "SVG file")->required();

    for (auto* sub : {cmd_inspect, cmd_floer, cmd_derham, cmd_fourier, cmd_sample, cmd_convolve, cmd_verify, cmd_plot})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_invalid;
    }

    try {
        const auto scene = lm::load_scene(scene_path);
        const auto& params = scene.params;
        if (*cmd_inspect) {
            emit(inspect(scene), out);
        } else if (*cmd_floer) {
            emit(floer_report(scene.find(object_id), params.rank_tol), out);
        } else if (*cmd_derham) {
            const double h = grid_n > 0 ? 1.0 / grid_n : params.grid_h;
            const double T = window > 0 ? window : params.window;
            emit(derham_report(scene.find(object_id), h, T, params.rank_tol), out);
        } else if (*cmd_sample) {
            const auto [A, B] = parse_grid(grid_spec);
            const auto sec = lm::canonical_theta_section(scene.find(object_id), params.K);
            std::ofstream f(out);
            if (!f) throw lm::Error("cannot write '" + out + "'");
            lm::emit_csv(lm::sample_theta(sec, A, B), f);
        } else if (*cmd_convolve) {
            lm::Scene result;
            result.params = params;
            result.objects = lm::convolve(scene.find(pair.at(0)), scene.find(pair.at(1)));
            lm::save_scene(result, out);
            json ids = json::array();
            for (const auto& o : result.objects)
                ids.push_back({{"id", o.id()}, {"q", o.graph.q}, {"p", o.graph.p}, {"c", o.graph.c}, {"rank", o.rank()}});
            std::cout << json{{"objects", ids}, {"out", out}}.dump(2) << "\n";
        } else if (*cmd_verify) {
            const auto report = lm::run_verify(scene);
            emit(lm::to_json(report), out);
            return report.pass() ? exit_ok : exit_failed;
        } else if (*cmd_plot) {
            std::ofstream f(out);
            if (!f) throw lm::Error("cannot write '" + out + "'");
            lm::render_svg(scene, f);
        }
    } catch (const lm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invalid;
    }
    return exit_ok;
}
