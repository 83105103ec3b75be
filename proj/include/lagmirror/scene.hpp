#pragma once

// Scene files: a list of objects plus numeric defaults, stored as JSON.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "object.hpp"

namespace lagmirror {

using json = nlohmann::json;

struct SceneParams {
    int K = 25;
    double grid_h = 1.0 / 512;
    double window = 6.0;
    double rank_tol = 1e-9;
    double dbar_tol = 1e-6;

    friend bool operator==(const SceneParams&, const SceneParams&) = default;
};

struct Scene {
    std::vector<SceneObject> objects;
    SceneParams params;

    const SceneObject& find(const std::string& id) const {
        for (const auto& o : objects)
            if (o.id() == id) return o;
        throw ValidationError(id, "no object with this id in the scene");
    }
};

namespace detail {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(where + ": field '" + key + "' has the wrong type");
    }
}

template <class T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? field<T>(j, key, where) : fallback;
}

inline bool exact_int(const json& v) { return v.is_number_integer(); }

}  // namespace detail

inline SceneObject object_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("object entry must be a JSON object");
    SceneObject o;
    auto& L = o.graph;
    L.id = detail::field<std::string>(j, "id", "object");
    const std::string where = "object '" + L.id + "'";
    for (const char* k : {"q", "p"})
        if (j.contains(k) && !detail::exact_int(j.at(k))) throw ParseError(where + ": field '" + k + "' must be an integer");
    L.q = detail::field<int>(j, "q", where);
    L.p = detail::field<int>(j, "p", where);
    L.c = detail::field<double>(j, "c", where);
    if (j.contains("wiggle")) {
        if (!j.at("wiggle").is_array()) throw ParseError(where + ": wiggle must be an array");
        for (const auto& h : j.at("wiggle")) {
            if (!h.is_object() || !h.contains("m") || !detail::exact_int(h.at("m")))
                throw ParseError(where + ": wiggle term needs an integer 'm'");
            L.wiggle.push_back({h.at("m").get<int>(), detail::field_or<double>(h, "a", 0.0, where),
                                detail::field_or<double>(h, "b", 0.0, where)});
        }
    }
    if (j.contains("local_system")) {
        const auto& ls = j.at("local_system");
        const int rank = detail::field<int>(ls, "rank", where + " local_system");
        const auto rows = detail::field<json>(ls, "monodromy", where + " local_system");
        if (rank < 1) throw ValidationError(L.id, "local system rank must be >= 1");
        if (!rows.is_array() || static_cast<int>(rows.size()) != rank)
            throw ValidationError(L.id, "monodromy must have 'rank' rows");
        Matrix T(rank, rank);
        for (int r = 0; r < rank; ++r) {
            const auto& row = rows[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != rank)
                throw ValidationError(L.id, "monodromy must be a square rank x rank matrix");
            for (int c = 0; c < rank; ++c) {
                const auto& z = row[static_cast<std::size_t>(c)];
                if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
                    throw ParseError(where + ": monodromy entries must be [re, im] pairs");
                T(r, c) = cplx(z[0].get<double>(), z[1].get<double>());
            }
        }
        o.local_system.monodromy = T;
    }
    return o;
}

inline json to_json(const SceneObject& o) {
    json wiggle = json::array();
    for (const auto& h : o.graph.wiggle) wiggle.push_back({{"m", h.m}, {"a", h.a}, {"b", h.b}});
    json rows = json::array();
    const auto& T = o.local_system.monodromy;
    for (Eigen::Index r = 0; r < T.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < T.cols(); ++c) row.push_back({T(r, c).real(), T(r, c).imag()});
        rows.push_back(row);
    }
    return {{"id", o.graph.id},
            {"q", o.graph.q},
            {"p", o.graph.p},
            {"c", o.graph.c},
            {"wiggle", wiggle},
            {"local_system", {{"rank", o.rank()}, {"monodromy", rows}}}};
}

inline json to_json(const SceneParams& p) {
    return {{"K", p.K}, {"grid_h", p.grid_h}, {"window", p.window}, {"rank_tol", p.rank_tol}, {"dbar_tol", p.dbar_tol}};
}

inline json to_json(const Scene& s) {
    json objs = json::array();
    for (const auto& o : s.objects) objs.push_back(to_json(o));
    return {{"objects", objs}, {"params", to_json(s.params)}};
}

/// Builds a scene and checks every invariant, transversality included.
inline Scene parse_scene(const json& j, const RootOptions& opts = {}) {
    if (!j.is_object()) throw ParseError("scene must be a JSON object");
    Scene s;
    if (j.contains("params")) {
        const auto& p = j.at("params");
        if (!p.is_object()) throw ParseError("params must be an object");
        if (p.contains("K") && !detail::exact_int(p.at("K"))) throw ParseError("params: K must be an integer");
        s.params.K = detail::field_or<int>(p, "K", s.params.K, "params");
        s.params.grid_h = detail::field_or<double>(p, "grid_h", s.params.grid_h, "params");
        s.params.window = detail::field_or<double>(p, "window", s.params.window, "params");
        s.params.rank_tol = detail::field_or<double>(p, "rank_tol", s.params.rank_tol, "params");
        s.params.dbar_tol = detail::field_or<double>(p, "dbar_tol", s.params.dbar_tol, "params");
        if (s.params.K < 1) throw ParseError("params: K must be >= 1");
        if (!(s.params.grid_h > 0) || !(s.params.window > 0) || !(s.params.rank_tol > 0) || !(s.params.dbar_tol > 0))
            throw ParseError("params: grid_h, window and tolerances must be positive");
    }
    const auto objs = detail::field<json>(j, "objects", "scene");
    if (!objs.is_array()) throw ParseError("scene: objects must be an array");
    std::set<std::string> ids;
    for (const auto& oj : objs) {
        auto o = object_from_json(oj);
        if (!ids.insert(o.id()).second) throw ValidationError(o.id(), "duplicate object id");
        o.validate(opts);
        s.objects.push_back(std::move(o));
    }
    return s;
}

inline Scene parse_scene(const std::string& text, const RootOptions& opts = {}) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    return parse_scene(j, opts);
}

inline Scene load_scene(const std::string& path, const RootOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scene file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scene(buf.str(), opts);
}

inline void save_scene(const Scene& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << to_json(s).dump(2) << "\n";
    if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace lagmirror
