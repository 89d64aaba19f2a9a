#include <doctest.h>

#include "curveflow/curve_io.hpp"
#include "fixtures.hpp"

using namespace curveflow;
namespace fx = curveflow::fixtures;

namespace {

Eigen::Matrix2d rotation(double angle) {
    Eigen::Matrix2d R;
    R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return R;
}

} // namespace

TEST_CASE("cache on a uniform straight segment") {
    DiscreteCurve c = fx::unit_line(4);
    GeometryCache g = build_cache(c);
    CHECK(g.total_length == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i <= 4; ++i) {
        CHECK(g.curvature.row(i).norm() == 0.0);
        CHECK(g.vertex_tangents(i, 0) == 1.0);
        CHECK(g.vertex_tangents(i, 1) == 0.0);
    }
}

TEST_CASE("cache on the N=64 semicircle") {
    GeometryCache g = build_cache(fx::semicircle(64));
    // analytic curvature magnitude is 1
    for (int i = 0; i <= 64; ++i)
        CHECK(std::abs(g.curvature.row(i).norm() - 1.0) <= 5e-3);
    CHECK(std::abs(g.total_length - fx::kPi) <= 1e-2);
}

TEST_CASE("two-edge corner curvature stencil") {
    Eigen::MatrixXd v(3, 2);
    v << 0, 0, 1, 0, 1, 1;
    GeometryCache g = build_cache(DiscreteCurve(v));
    CHECK(g.curvature(1, 0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(g.curvature(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cache errors") {
    Eigen::MatrixXd v(5, 2);
    v << 0, 0, 0.25, 0, 0.25, 0, 0.75, 0, 1, 0;
    CHECK_THROWS_AS(build_cache(DiscreteCurve(v)), DegenerateEdge);

    // closed loop: endpoints coincide
    Eigen::MatrixXd w(5, 2);
    w << 0, 0, 1, 0, 1, 1, 0, 1, 0, 0;
    CHECK_THROWS_AS(build_cache(DiscreteCurve(w)), CoincidentEndpoints);
}

TEST_CASE("cache invariants: weights sum to length, unit tangents") {
    for (int N : {16, 64}) {
        DiscreteCurve c = fx::random_curve(11 + N, N, 2);
        GeometryCache g = build_cache(c);
        const double eps = std::numeric_limits<double>::epsilon();
        CHECK(std::abs(g.vertex_weights.sum() - g.total_length) <= 16 * eps * N);
        for (int i = 0; i <= N; ++i)
            CHECK(std::abs(g.vertex_tangents.row(i).norm() - 1.0) <= 8 * eps);
        for (int i = 0; i < N; ++i)
            CHECK(std::abs(g.edge_tangents.row(i).norm() - 1.0) <= 8 * eps);
    }
}

TEST_CASE("normal_project basics and idempotence") {
    Eigen::RowVectorXd tau(2), v(2);
    tau << 1, 0;
    v << 1, 1;
    Eigen::RowVectorXd p = normal_project(v, tau);
    CHECK(p(0) == 0.0);
    CHECK(p(1) == 1.0);

    // parallel input projects to zero, orthogonal input is unchanged
    Eigen::RowVectorXd par = 3.0 * tau;
    CHECK(normal_project(par, tau).norm() == 0.0);
    Eigen::RowVectorXd ort(2);
    ort << 0, -2;
    CHECK((normal_project(ort, tau) - ort).norm() == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1, 1);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int t = 0; t < 100; ++t) {
        Eigen::RowVectorXd u(3), w(3);
        for (int k = 0; k < 3; ++k) {
            u(k) = d(rng);
            w(k) = d(rng);
        }
        u /= u.norm();
        Eigen::RowVectorXd once = normal_project(w, u);
        Eigen::RowVectorXd twice = normal_project(once, u);
        CHECK((twice - once).norm() <= 4 * eps * std::max(1.0, w.norm()));
    }
}

TEST_CASE("partial_s: constants, linear data, positions on the semicircle") {
    DiscreteCurve c = fx::unit_line(16);
    GeometryCache g = build_cache(c);

    VertexField constant = VertexField::Constant(17, 2, 3.5);
    CHECK(partial_s(constant, g).cwiseAbs().maxCoeff() <= 1e-14);

    // linear-in-arclength scalar field: exact at interior vertices
    VertexField lin(17, 1);
    for (int i = 0; i <= 16; ++i)
        lin(i, 0) = 2.0 * g.arclength(i) + 1.0;
    VertexField dlin = partial_s(lin, g);
    for (int i = 1; i < 16; ++i)
        CHECK(dlin(i, 0) == doctest::Approx(2.0).epsilon(1e-12));

    DiscreteCurve sc = fx::semicircle(64);
    GeometryCache gs = build_cache(sc);
    VertexField dpos = partial_s(sc.vertices, gs);
    for (int i = 1; i < 64; ++i)
        CHECK((dpos.row(i) - gs.vertex_tangents.row(i)).norm() <= 5e-3);
    // endpoint one-sided stencils compared against the analytic tangent
    Eigen::RowVectorXd t0(2), t1(2);
    t0 << 0, 1;
    t1 << 0, -1;
    CHECK((dpos.row(0) - t0).norm() <= 5e-3);
    CHECK((dpos.row(64) - t1).norm() <= 5e-3);

    CHECK_THROWS_AS(partial_s(VertexField::Zero(5, 2), gs), LengthMismatch);
}

TEST_CASE("nabla_s: zero field, straight line tangential part, circle arc") {
    DiscreteCurve c = fx::unit_line(16);
    GeometryCache g = build_cache(c);
    CHECK(nabla_s(VertexField::Zero(17, 2), g).cwiseAbs().maxCoeff() == 0.0);

    // on a straight line the output has no tangential component
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-1, 1);
    VertexField f(17, 2);
    for (int i = 0; i <= 16; ++i)
        for (int k = 0; k < 2; ++k)
            f(i, k) = d(rng);
    VertexField nf = nabla_s(f, g);
    VertexField pf = partial_s(f, g);
    for (int i = 0; i <= 16; ++i) {
        CHECK(std::abs(nf.row(i).dot(g.vertex_tangents.row(i))) <= 1e-14);
        Eigen::RowVectorXd expect =
            pf.row(i) - pf.row(i).dot(g.vertex_tangents.row(i)) * g.vertex_tangents.row(i);
        CHECK((nf.row(i) - expect).norm() <= 1e-14);
    }

    GeometryCache gc = build_cache(fx::semicircle(128));
    VertexField nk = nabla_s(gc.curvature, gc);
    for (int i = 1; i < 128; ++i)
        CHECK(nk.row(i).norm() <= 1e-2);
}

TEST_CASE("curvature derivative split residual shrinks by >= 3 under refinement") {
    auto residual = [](int N) {
        GeometryCache g = build_cache(fx::semicircle(N, 0.15));
        VertexField lhs = partial_s(g.curvature, g);
        VertexField rhs = nabla_s(g.curvature, g);
        double worst = 0.0;
        for (int i = 1; i < N; ++i) {
            Eigen::RowVectorXd expect = rhs.row(i) - g.curvature.row(i).squaredNorm() *
                                                         g.vertex_tangents.row(i);
            worst = std::max(worst, (lhs.row(i) - expect).norm());
        }
        return worst;
    };
    const double r64 = residual(64);
    const double r128 = residual(128);
    const double r256 = residual(256);
    CHECK(r64 / r128 >= 3.0);
    CHECK(r128 / r256 >= 3.0);
}

TEST_CASE("reparametrize_arclength") {
    DiscreteCurve l = fx::unit_line(8);
    DiscreteCurve r = reparametrize_arclength(l, 8);
    CHECK(r.vertices == l.vertices); // bitwise fixed point

    // nonuniform vertices on a segment move to equal spacing
    Eigen::MatrixXd v(4, 2);
    v << 0, 0, 0.1, 0, 0.9, 0, 1, 0;
    DiscreteCurve rr = reparametrize_arclength(DiscreteCurve(v), 4);
    for (int j = 0; j <= 4; ++j) {
        CHECK(rr.vertices(j, 0) == doctest::Approx(0.25 * j).epsilon(1e-14));
        CHECK(rr.vertices(j, 1) == 0.0);
    }
    CHECK(std::abs(build_cache(rr).total_length - 1.0) <= 1e-12);

    DiscreteCurve sc = fx::semicircle(64);
    DiscreteCurve sr = reparametrize_arclength(sc, 32);
    GeometryCache g = build_cache(sr);
    const double href = g.edge_lengths(0);
    for (int i = 0; i < 32; ++i)
        CHECK(std::abs(g.edge_lengths(i) - href) <= 1e-10 * href);
    CHECK(sr.vertices.row(0) == sc.vertices.row(0));
    CHECK(sr.vertices.row(32) == sc.vertices.row(64));
}

TEST_CASE("lp_norm") {
    GeometryCache g = build_cache(fx::semicircle(64));
    VertexField ones = VertexField::Zero(65, 2);
    ones.col(0).setOnes();
    CHECK(lp_norm(ones, g, 2.0) ==
          doctest::Approx(std::sqrt(g.total_length)).epsilon(1e-13));
    CHECK(lp_norm(VertexField::Zero(65, 2), g, 2.0) == 0.0);
    CHECK(std::abs(lp_norm(g.curvature, g, 2.0) - std::sqrt(fx::kPi)) <= 1e-2);
    CHECK(lp_norm(ones, g, std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("scale_invariant_norm") {
    CHECK(scale_invariant_norm(fx::unit_line(16), 2, 2.0) == 0.0);

    GeometryCache g = build_cache(fx::semicircle(64));
    CHECK(std::abs(scale_invariant_norm(g, 0, 2.0) - fx::kPi) <= 2e-2);

    DiscreteCurve c = fx::random_curve(23, 32, 2);
    const double base = scale_invariant_norm(c, 2, 2.0);
    for (double alpha : {0.5, 2.0, 10.0, 0.01, 100.0}) {
        DiscreteCurve scaled(Eigen::MatrixXd(alpha * c.vertices));
        const double v = scale_invariant_norm(scaled, 2, 2.0);
        CHECK(std::abs(v - base) <= 1e-10 * base);
    }

    CHECK_THROWS_AS(scale_invariant_norm(fx::unit_line(8), 5, 2.0), StencilExhausted);
}

TEST_CASE("euclidean equivariance of the cache") {
    DiscreteCurve c = fx::random_curve(31, 24, 2);
    Eigen::Matrix2d R = rotation(0.7);
    Eigen::RowVector2d shift(0.3, -1.2);
    DiscreteCurve moved = c;
    for (int i = 0; i < c.vertex_count(); ++i)
        moved.vertices.row(i) = (R * c.vertices.row(i).transpose()).transpose() + shift;
    GeometryCache g0 = build_cache(c);
    GeometryCache g1 = build_cache(moved);
    // curvature differences amplify coordinate roundoff by 1/h^2
    const double eps = std::numeric_limits<double>::epsilon();
    const double hmin = g0.min_edge();
    const double tol = 32 * eps / (hmin * hmin);
    for (int i = 0; i < c.vertex_count(); ++i) {
        Eigen::RowVectorXd rk = (R * g0.curvature.row(i).transpose()).transpose();
        CHECK((g1.curvature.row(i) - rk).norm() <= tol);
    }
}

TEST_CASE("hausdorff distance") {
    DiscreteCurve a = fx::unit_line(8);
    DiscreteCurve b = fx::perturbed_line(16, 0.05);
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(a, b) == doctest::Approx(0.05).epsilon(1e-2));
}

TEST_CASE("curve csv round trip is bitwise") {
    DiscreteCurve c = fx::random_curve(77, 16, 3);
    const auto path = std::filesystem::temp_directory_path() / "curveflow_roundtrip.csv";
    write_curve_csv(c, path);
    DiscreteCurve r = read_curve_csv(path);
    REQUIRE(r.vertex_count() == c.vertex_count());
    CHECK(r.vertices == c.vertices);
    std::filesystem::remove(path);
}
