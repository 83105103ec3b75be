#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace lagmirror;

namespace {

const std::string scenes = LAGMIRROR_SCENES;

std::string object_json(const std::string& id, int q, int p, double c, const std::string& extra = "") {
    std::ostringstream s;
    s << R"({"id": ")" << id << R"(", "q": )" << q << R"(, "p": )" << p << R"(, "c": )" << c << extra << "}";
    return s.str();
}

std::string scene_json(const std::string& objects) { return R"({"objects": [)" + objects + "]}"; }

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("loading scenes", "[scene]") {
    SECTION("canonical file") {
        const auto s = load_scene(scenes + "/canonical.json");
        REQUIRE(s.objects.size() == 1);
        CHECK(s.objects[0].id() == "canonical");
        CHECK(s.params.K == 25);
    }
    SECTION("defaults") {
        const auto s = parse_scene(scene_json(object_json("a", 1, 1, 0.25)));
        CHECK(s.objects[0].rank() == 1);
        CHECK(s.params == SceneParams{});
    }
    SECTION("singular monodromy names the object") {
        const std::string ls = R"(, "local_system": {"rank": 2, "monodromy": [[[1,0],[2,0]],[[2,0],[4,0]]]})";
        try {
            parse_scene(scene_json(object_json("sing", 1, 1, 0.25, ls)));
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(e.object_id() == "sing");
        }
    }
    SECTION("gcd") {
        CHECK_THROWS_AS(parse_scene(scene_json(object_json("g", 2, 4, 0.25))), ValidationError);
    }
    SECTION("duplicate ids") {
        CHECK_THROWS_AS(parse_scene(scene_json(object_json("a", 1, 1, 0.25) + "," + object_json("a", 1, 2, 0.25))),
                        ValidationError);
    }
    SECTION("tangential object") {
        CHECK_THROWS_AS(load_scene(scenes + "/tangential.json"), TransversalityError);
    }
    SECTION("malformed input") {
        CHECK_THROWS_AS(parse_scene(std::string("{\"objects\": [")), ParseError);
        CHECK_THROWS_AS(parse_scene(std::string("{}")), ParseError);
        CHECK_THROWS_AS(parse_scene(scene_json(R"({"id": "x", "q": 1.5, "p": 1, "c": 0})")), ParseError);
        CHECK_THROWS_AS(parse_scene(scene_json(R"({"id": "x", "q": 1, "p": 1})")), ParseError);
        CHECK_THROWS_AS(load_scene(scenes + "/does-not-exist.json"), ParseError);
    }
    SECTION("rank mismatch") {
        const std::string ls = R"(, "local_system": {"rank": 2, "monodromy": [[[1,0]]]})";
        CHECK_THROWS_AS(parse_scene(scene_json(object_json("r", 1, 1, 0.25, ls))), ValidationError);
    }
}

TEST_CASE("scene round trip is bit exact", "[scene]") {
    std::mt19937 rng(81);
    Scene s;
    for (int i = 0; i < 6; ++i) s.objects.push_back(oracle::random_object(rng, i));
    s.params.grid_h = 1.0 / 3.0;
    s.params.dbar_tol = 1.234567890123456789e-7;
    const auto path = std::filesystem::temp_directory_path() / "lagmirror_roundtrip.json";
    save_scene(s, path.string());
    const auto back = load_scene(path.string());
    std::filesystem::remove(path);
    REQUIRE(back.objects.size() == s.objects.size());
    CHECK(back.params == s.params);
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        CHECK(back.objects[i].graph == s.objects[i].graph);
        CHECK(back.objects[i].local_system.monodromy == s.objects[i].local_system.monodromy);
    }
}

TEST_CASE("verification", "[scene][verify]") {
    SECTION("canonical") {
        const auto rep = run_verify(load_scene(scenes + "/canonical.json"));
        REQUIRE(rep.objects.size() == 1);
        const auto& o = rep.objects[0];
        CHECK(rep.pass());
        CHECK(o.floer == Dims{1, 0});
        CHECK(o.analytic == Dims{1, 0});
        CHECK(o.discretized == Dims{1, 0});
    }
    SECTION("wiggle") {
        const auto rep = run_verify(load_scene(scenes + "/wiggle.json"));
        CHECK(rep.pass());
        CHECK(rep.objects[0].floer == Dims{1, 0});
        CHECK(rep.objects[0].d_rank == 1);
    }
    SECTION("tangential object built in memory") {
        Scene s;
        s.objects.push_back({{"tan", 1, 1, -0.5, {{1, 0.0, 1.0 / (2 * oracle::pi)}}}, LocalSystem::trivial()});
        s.objects.push_back(oracle::canonical());
        const auto rep = run_verify(s);
        CHECK_FALSE(rep.pass());
        CHECK_FALSE(rep.objects[0].pass());
        CHECK(rep.objects[0].error.find("tangential") != std::string::npos);
        CHECK(rep.objects[1].pass());
    }
    SECTION("deterministic across schedules") {
        const auto s = load_scene(scenes + "/mixed.json");
        const auto a = to_json(run_verify(s, true)).dump();
        const auto b = to_json(run_verify(s, false)).dump();
        const auto c = to_json(run_verify(s, true)).dump();
        CHECK(a == b);
        CHECK(a == c);
    }
}

TEST_CASE("svg output", "[scene][render]") {
    SECTION("canonical") {
        std::ostringstream out;
        render_svg(load_scene(scenes + "/canonical.json"), out);
        const auto svg = out.str();
        CHECK(count(svg, "class=\"curve\"") == 1);
        CHECK(count(svg, "class=\"marker positive\"") == 1);
        CHECK(count(svg, "class=\"marker negative\"") == 0);
        CHECK(count(svg, "zero-section") == 1);
        // The marker sits above t = 0 on the zero section.
        CHECK(svg.find("x=\"40.00\"") != std::string::npos);
    }
    SECTION("p = 3 line") {
        Scene s;
        s.objects.push_back(oracle::straight("three", 3, 1, 0.25));
        std::ostringstream out;
        render_svg(s, out);
        CHECK(count(out.str(), "class=\"marker ") == 3);
    }
    SECTION("empty scene") {
        std::ostringstream out;
        render_svg(Scene{}, out);
        const auto svg = out.str();
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(count(svg, "<rect") == 1);
        CHECK(count(svg, "<path") == 0);
    }
}

TEST_CASE("theta samples", "[scene][render]") {
    const auto sec = canonical_theta_section(oracle::canonical(), 25);
    const auto serial = sample_theta(sec, 5, 4, 1);
    const auto parallel = sample_theta(sec, 5, 4, 4);
    REQUIRE(serial.size() == 20);
    REQUIRE(parallel.size() == 20);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].t == parallel[i].t);
        CHECK(serial[i].xdual == parallel[i].xdual);
        CHECK(serial[i].value == parallel[i].value);
    }
    CHECK(serial[5].t == 0.2);
    CHECK(serial[5].xdual == 0.25);
    std::ostringstream out;
    emit_csv(serial, out);
    std::istringstream in(out.str());
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "t,xdual,branch,re,im,trunc_bound");
    CHECK(first.rfind("0,0,0,1.0864348112133", 0) == 0);
    CHECK(count(out.str(), "\n") == 21);
}
