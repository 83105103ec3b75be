#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace lagmirror;
using Catch::Matchers::WithinAbs;
using oracle::cplx;

TEST_CASE("complexes of straight lines", "[floer]") {
    SECTION("increasing line") {
        const auto fc = build_complex(oracle::straight("a", 2, 1, 0.25));
        CHECK(fc.dim0() == 2);
        CHECK(fc.dim1() == 0);
        CHECK(fc.d.size() == 0);
        CHECK(cohomology_dims(fc) == Dims{2, 0});
        CHECK(boundary_transport_differential(oracle::straight("a", 2, 1, 0.25)).size() == 0);
    }
    SECTION("decreasing line") {
        const auto fc = build_complex(oracle::straight("a", -1, 1, 0.25));
        CHECK(fc.dim0() == 0);
        CHECK(fc.dim1() == 1);
        CHECK(cohomology_dims(fc) == Dims{0, 1});
    }
    SECTION("rank multiplies dimensions") {
        std::mt19937 rng(1);
        const auto fc = build_complex(oracle::straight("a", 3, 2, 0.7, oracle::random_unitary(2, rng)));
        CHECK(cohomology_dims(fc) == Dims{6, 0});
    }
}

TEST_CASE("wiggle complex", "[floer]") {
    const SceneObject obj = oracle::wiggle_scene();
    const auto& L = obj.graph;
    const auto fc = build_complex(obj);
    REQUIRE(fc.dim0() == 2);
    REQUIRE(fc.dim1() == 1);
    CHECK(fc.F0[0].t < fc.F0[1].t);

    // Oracle: bisection roots and Simpson areas, M = exp(2 pi A), sign by direction.
    const auto r = oracle::roots([&](double t) { return oracle::lift(L, t); }, -3.0, 3.0);
    REQUIRE(r.size() == 3);
    auto Y = [&](double t) { return oracle::lift(L, t); };
    const double left = -oracle::simpson(Y, r[0], r[1]);   // runs forward: direction +1
    const double right = -oracle::simpson(Y, r[2], r[1]);  // runs backward: direction -1
    CHECK(std::abs(fc.d(0, 0) - std::exp(2 * oracle::pi * left)) < 1e-12);
    CHECK(std::abs(fc.d(0, 1) + std::exp(2 * oracle::pi * right)) < 1e-12);
    CHECK(numerical_rank(fc.d) == 1);
    CHECK(cohomology_dims(fc) == Dims{1, 0});
    CHECK_FALSE(fc.equal_direction_arcs);
    CHECK((boundary_transport_differential(obj) - fc.d).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("rank-two local system on the wiggle", "[floer]") {
    Matrix T = Matrix::Identity(2, 2);
    T(1, 1) = -1.0;
    const SceneObject obj = oracle::wiggle_scene(T);
    const auto fc = build_complex(obj);
    REQUIRE(fc.d.rows() == 2);
    REQUIRE(fc.d.cols() == 4);
    const Matrix bt = boundary_transport_differential(obj);
    CHECK((bt - fc.d).cwiseAbs().maxCoeff() <= 1e-9);
    const auto scalar_d = build_complex(oracle::wiggle_scene()).d;
    for (int k = 0; k < 2; ++k) {
        // No seam between the crossings, so each block is a scalar times the identity.
        const Matrix block = fc.d.block(0, 2 * k, 2, 2);
        CHECK((block - scalar_d(0, k) * Matrix::Identity(2, 2)).norm() < 1e-12);
    }
    CHECK(cohomology_dims(fc) == Dims{2, 0});
}

TEST_CASE("circles crossing the zero section", "[floer]") {
    // Y = 0.5 cos(2 pi t): one circle with a negative crossing at 1/4 and a
    // positive one at 3/4. Both arcs join the same pair; the forward one
    // crosses the seam at t = 1.
    auto Y = [](double t) { return 0.5 * std::cos(2 * oracle::pi * t); };
    const double back = -oracle::simpson(Y, 0.75, 0.25);
    const double fwd = -oracle::simpson(Y, 0.75, 1.25);
    const LagrangianGraph L{"circ", 1, 0, 0.0, {{1, 0.5, 0.0}}};
    SECTION("monodromy -1: the two arcs add up") {
        const SceneObject obj{L, {Matrix::Constant(1, 1, -1.0)}};
        const auto fc = build_complex(obj);
        REQUIRE(fc.dim0() == 1);
        REQUIRE(fc.dim1() == 1);
        const cplx expected = -std::exp(2 * oracle::pi * fwd) - std::exp(2 * oracle::pi * back);
        CHECK(std::abs(fc.d(0, 0) - expected) < 1e-12);
        CHECK((boundary_transport_differential(obj) - fc.d).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(cohomology_dims(fc) == Dims{0, 0});
    }
    SECTION("trivial monodromy: the arcs cancel") {
        const SceneObject obj{L, LocalSystem::trivial()};
        const auto fc = build_complex(obj);
        CHECK(std::abs(fc.d(0, 0)) < 1e-12);
        CHECK(cohomology_dims(fc) == Dims{1, 1});
    }
}

TEST_CASE("differential double computation on random scenes", "[floer][property]") {
    std::mt19937 rng(101);
    for (int i = 0; i < 25; ++i) {
        const auto obj = oracle::random_object(rng, i);
        const auto fc = build_complex(obj);
        const Matrix bt = boundary_transport_differential(obj);
        REQUIRE(bt.rows() == fc.d.rows());
        REQUIRE(bt.cols() == fc.d.cols());
        if (bt.size()) CHECK((bt - fc.d).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("Euler characteristic and Hamiltonian invariance", "[floer][property]") {
    std::mt19937 rng(202);
    for (int i = 0; i < 25; ++i) {
        const auto obj = oracle::random_object(rng, i);
        const auto dims = cohomology_dims(build_complex(obj));
        CHECK(dims.h0 - dims.h1 == obj.rank() * obj.graph.p);
        SceneObject flat = obj;
        flat.graph.wiggle.clear();
        try {
            flat.validate();
        } catch (const TransversalityError&) {
            continue;
        }
        CHECK(cohomology_dims(build_complex(flat)) == dims);
    }
}

TEST_CASE("unitary scalar rescaling", "[floer][property]") {
    std::mt19937 rng(303);
    const auto obj = oracle::random_object(rng, 0);
    SceneObject scaled = obj;
    const cplx u = std::polar(1.0, 0.7);
    scaled.local_system.monodromy *= u;
    const auto a = build_complex(obj), b = build_complex(scaled);
    CHECK(cohomology_dims(a) == cohomology_dims(b));
    for (Eigen::Index i = 0; i < a.d.rows(); ++i)
        for (Eigen::Index j = 0; j < a.d.cols(); ++j) {
            const cplx x = a.d(i, j), y = b.d(i, j);
            // Each entry picks up u to the number of seams its arc crosses.
            if (std::abs(x) > 0) CHECK_THAT(std::abs(y), WithinAbs(std::abs(x), 1e-12 * std::abs(x)));
        }
}

TEST_CASE("quasi-unitarization leaves dimensions unchanged", "[floer]") {
    const LocalSystem T2{Matrix::Constant(1, 1, 2.0)};
    const auto qu = quasi_unitarize(T2);
    for (const auto& graph : {LagrangianGraph{"a", 1, 1, 0.25, {}}, LagrangianGraph{"w", 1, 1, 0.5, {{1, 0.0, 0.5}}},
                              LagrangianGraph{"n", 2, -1, 0.4, {}}, LagrangianGraph{"t", 1, 3, 0.1, {{2, 0.05, 0.0}}}}) {
        const SceneObject before{graph, T2};
        const SceneObject after{apply_twist(graph, qu.coefficient), qu.system};
        CHECK(cohomology_dims(build_complex(before)) == cohomology_dims(build_complex(after)));
    }
}

TEST_CASE("numerical rank", "[floer]") {
    Matrix m(2, 3);
    m << 1, 2, 3, 2, 4, 6.0000000000001;
    CHECK(numerical_rank(m, 1e-9) == 1);
    CHECK(numerical_rank(m, 1e-16) == 2);
    CHECK(numerical_rank(Matrix(0, 3)) == 0);
}
