#include <doctest.h>

#include "fixtures.hpp"

using namespace curveflow;
namespace fx = curveflow::fixtures;

TEST_CASE("energy of a straight segment") {
    Eigen::RowVectorXd a(2), b(2);
    a << 0, 0;
    b << 2, 0;
    EnergyBreakdown e = energy(fx::line(a, b, 8), fx::params2(0.5));
    CHECK(e.bending == 0.0);
    CHECK(e.coupling == 0.0);
    CHECK(e.length == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("energy of the unit semicircle") {
    DiscreteCurve c = fx::semicircle(64);
    FlowParams p = fx::params2(0.0, 0.0, 1.0); // zeta = (0, 1)
    EnergyBreakdown e = energy(c, p);
    CHECK(std::abs(e.bending - fx::kPi / 2) <= 1e-2);
    CHECK(std::abs(e.length - fx::kPi) <= 1e-2);
    // telescoped coupling equals the discrete endpoint-tangent difference,
    // which tends to <(0,-2), zeta> = -2
    GeometryCache g = build_cache(c);
    const double expected =
        (g.vertex_tangents.row(64) - g.vertex_tangents.row(0)).dot(p.zeta);
    CHECK(e.coupling == doctest::Approx(expected).epsilon(1e-15));
    CHECK(std::abs(e.coupling - (-2.0)) <= 1e-2);
    CHECK(std::abs(e.total - (fx::kPi / 2 + 2.0)) <= 1e-2);
}

TEST_CASE("segment aligned with zeta") {
    DiscreteCurve c = fx::unit_line(8);
    FlowParams p = fx::params2(0.25, 3.0, 0.0); // zeta parallel to the segment
    EnergyBreakdown e = energy(c, p);
    CHECK(e.coupling == 0.0);
    CHECK(e.bending == 0.0);
    CHECK(e.total == doctest::Approx(0.25 * e.length).epsilon(1e-15));
}

TEST_CASE("energy errors") {
    DiscreteCurve c = fx::unit_line(8);
    FlowParams p;
    p.lambda = 1.0;
    p.zeta = Eigen::RowVectorXd::Zero(3); // wrong dimension
    CHECK_THROWS_AS(energy(c, p), DimMismatch);
}

TEST_CASE("gradient vanishes on collinear uniform points") {
    Eigen::MatrixXd v(3, 2);
    v << 0, 0, 1, 0, 2, 0;
    GradientField g = gradient(DiscreteCurve(v), fx::params2(1.0));
    CHECK(g.row(1).norm() == 0.0);
}

TEST_CASE("gradient matches the finite-difference oracle") {
    std::uint64_t seed = 100;
    for (int N : {8, 16, 32}) {
        for (int dim : {2, 3}) {
            DiscreteCurve c = fx::random_curve(seed++, N, dim);
            FlowParams p = FlowParams::zero(dim, 0.7);
            p.zeta(0) = 0.4;
            p.zeta(1) = -0.3;
            GradientField ga = gradient(c, p);
            GradientField gf = fd_gradient(c, p, 1e-6);
            const double rel = (ga - gf).cwiseAbs().maxCoeff() /
                               std::max(1.0, ga.cwiseAbs().maxCoeff());
            CHECK(rel <= 1e-6);
        }
    }
}

TEST_CASE("gradient of a zeta-aligned segment is zero") {
    DiscreteCurve c = fx::unit_line(12);
    FlowParams p = fx::params2(0.8, 2.0, 0.0);
    GradientField g = gradient(c, p);
    CHECK(g.cwiseAbs().maxCoeff() <= 1e-12 * p.lambda);
    GradientField gf = fd_gradient(c, p, 1e-6);
    CHECK(gf.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("fd_gradient converges at second order in the step") {
    DiscreteCurve c = fx::random_curve(7, 16, 2);
    FlowParams p = fx::params2(0.5, 0.2, -0.1);
    GradientField exact = gradient(c, p);
    std::vector<double> steps = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
    std::vector<double> errs;
    for (double s : steps)
        errs.push_back((fd_gradient(c, p, s) - exact).cwiseAbs().maxCoeff());
    // least-squares slope of log(err) against log(step)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(steps.size());
    for (int i = 0; i < m; ++i) {
        const double x = std::log(steps[i]);
        const double y = std::log(errs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope >= 1.7);
    CHECK(slope <= 2.3);
}

TEST_CASE("natural bc residual") {
    DiscreteCurve c = fx::unit_line(8);
    auto r0 = natural_bc_residual(c, fx::params2(0.0, 5.0, 0.0));
    CHECK(r0[0] <= 1e-12);
    CHECK(r0[1] <= 1e-12);

    auto r1 = natural_bc_residual(c, fx::params2(0.0));
    CHECK(r1[0] == 0.0);
    CHECK(r1[1] == 0.0);

    auto r2 = natural_bc_residual(fx::semicircle(128), fx::params2(0.0));
    CHECK(std::abs(r2[0] - 1.0) <= 1e-2);
    CHECK(std::abs(r2[1] - 1.0) <= 1e-2);
}

TEST_CASE("stationarity residual") {
    auto [vline, nline] = stationarity_residual(fx::unit_line(16), fx::params2(0.3, 1.0, 2.0));
    CHECK(nline <= 1e-12);
    CHECK(vline.cwiseAbs().maxCoeff() <= 1e-12);

    // arc of radius R with lambda = 1/(2R^2) solves the Euler-Lagrange system
    const double R = 1.0;
    auto r128 = stationarity_residual(fx::circle_arc(128, R, 0.8 * fx::kPi),
                                      fx::params2(1.0 / (2 * R * R))).second;
    auto r256 = stationarity_residual(fx::circle_arc(256, R, 0.8 * fx::kPi),
                                      fx::params2(1.0 / (2 * R * R))).second;
    CHECK(r128 <= 1e-2);
    CHECK(r128 / r256 >= 2.0);

    CHECK_THROWS_AS(stationarity_residual(fx::unit_line(5), fx::params2(0.0)),
                    StencilExhausted);
}

TEST_CASE("translation invariance and rotation equivariance") {
    DiscreteCurve c = fx::random_curve(41, 24, 2);
    FlowParams p = fx::params2(0.6, 0.3, -0.2);
    const double w = energy(c, p).total;

    DiscreteCurve shifted = c;
    Eigen::RowVector2d b(0.5, -0.25);
    for (int i = 0; i < c.vertex_count(); ++i)
        shifted.vertices.row(i) += b;
    CHECK(std::abs(energy(shifted, p).total - w) <= 1e-12 * (1.0 + std::abs(w)));

    Eigen::Matrix2d R;
    const double th = 0.9;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    DiscreteCurve rotated = c;
    for (int i = 0; i < c.vertex_count(); ++i)
        rotated.vertices.row(i) = (R * c.vertices.row(i).transpose()).transpose();
    FlowParams pr = p;
    pr.zeta = (R * p.zeta.transpose()).transpose();
    CHECK(std::abs(energy(rotated, pr).total - w) <= 1e-12 * (1.0 + std::abs(w)));
}

TEST_CASE("zero gradient implies second-order stationarity") {
    // converged critical point: the aligned segment
    DiscreteCurve c = fx::unit_line(12);
    FlowParams p = fx::params2(0.8, 2.0, 0.0);
    const double w0 = energy(c, p).total;
    REQUIRE(gradient(c, p).cwiseAbs().maxCoeff() <= 1e-12);
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        DiscreteCurve probe = c;
        double scale = 1e-5;
        for (int i = 1; i < 12; ++i)
            for (int k = 0; k < 2; ++k)
                probe.vertices(i, k) += scale * d(rng);
        // no first-order decrease: W(probe) >= W - tol * |perturbation|
        CHECK(energy(probe, p).total >= w0 - 1e-12 * scale);
    }
}

TEST_CASE("telescoped coupling agrees with the quadrature route under refinement") {
    FlowParams p = fx::params2(0.0, 0.3, 1.0);
    auto gap = [&](int N) {
        GeometryCache g = build_cache(fx::semicircle(N, 0.15));
        double quad = 0.0;
        for (int i = 0; i <= N; ++i)
            quad += g.curvature.row(i).dot(p.zeta) * g.vertex_weights(i);
        return std::abs(energy(g, p).coupling - quad);
    };
    const double g64 = gap(64);
    const double g256 = gap(256);
    CHECK(g64 <= 1e-2);
    // the endpoint edge tangents make the telescoped form first-order
    CHECK(g64 / g256 >= 3.5);
}

TEST_CASE("tangential displacements change the energy at O(N^-2)") {
    auto directional = [](int N) {
        DiscreteCurve c = fx::semicircle(N, 0.15);
        GeometryCache g = build_cache(c);
        FlowParams p = fx::params2(0.4, 0.1, 0.3);
        GradientField grad = gradient(c, p);
        double acc = 0.0;
        for (int i = 1; i < N; ++i) {
            const double u = g.arclength(i) / g.total_length;
            Eigen::RowVectorXd t = std::sin(fx::kPi * u) * g.vertex_tangents.row(i);
            acc += grad.row(i).dot(t);
        }
        return std::abs(acc);
    };
    const double d64 = directional(64);
    const double d128 = directional(128);
    CHECK(d64 / d128 >= 2.0);
}
