#pragma once

#include <numbers>
#include <random>

#include "curveflow/diagnostics.hpp"

namespace curveflow::fixtures {

inline constexpr double kPi = std::numbers::pi;

/// Uniform straight segment from a to b with N edges.
inline DiscreteCurve line(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, int N) {
    Eigen::MatrixXd v(N + 1, a.size());
    for (int j = 0; j <= N; ++j)
        v.row(j) = a + (static_cast<double>(j) / N) * (b - a);
    return DiscreteCurve(std::move(v));
}

inline DiscreteCurve unit_line(int N) {
    Eigen::RowVectorXd a(2), b(2);
    a << 0, 0;
    b << 1, 0;
    return line(a, b, N);
}

/// Unit semicircle (cos th, sin th), th in [0, pi]. With grading != 0 the
/// parameter is th = pi (u + grading sin(pi u) / pi), which keeps the same
/// endpoints but makes the mesh genuinely nonuniform.
inline DiscreteCurve semicircle(int N, double grading = 0.0) {
    Eigen::MatrixXd v(N + 1, 2);
    for (int j = 0; j <= N; ++j) {
        const double u = static_cast<double>(j) / N;
        const double th = kPi * u + grading * std::sin(kPi * u);
        v(j, 0) = std::cos(th);
        v(j, 1) = std::sin(th);
    }
    return DiscreteCurve(std::move(v));
}

/// Circular arc of radius R spanning the angle range [0, span].
inline DiscreteCurve circle_arc(int N, double R, double span) {
    Eigen::MatrixXd v(N + 1, 2);
    for (int j = 0; j <= N; ++j) {
        const double th = span * static_cast<double>(j) / N;
        v(j, 0) = R * std::cos(th);
        v(j, 1) = R * std::sin(th);
    }
    return DiscreteCurve(std::move(v));
}

/// Unit chord plus a single sine mode of the given amplitude.
inline DiscreteCurve perturbed_line(int N, double amplitude, int mode = 1) {
    DiscreteCurve c = unit_line(N);
    for (int j = 1; j < N; ++j) {
        const double u = static_cast<double>(j) / N;
        c.vertices(j, 1) += amplitude * std::sin(mode * kPi * u);
    }
    return c;
}

/// Smooth random curve with extra vertexwise jitter; used for gradient
/// consistency sweeps. Jitter fades at the ends so the curve stays regular.
inline DiscreteCurve random_curve(std::uint64_t seed, int N, int dim) {
    auto recipes = make_curve_corpus(seed, 1, dim);
    DiscreteCurve c = recipes[0].sample(N);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    const double scale = 0.1 / N;
    for (int j = 1; j < N; ++j)
        for (int k = 0; k < dim; ++k)
            c.vertices(j, k) += scale * d(rng);
    return c;
}

inline FlowParams params2(double lambda, double z0 = 0.0, double z1 = 0.0) {
    FlowParams p;
    p.lambda = lambda;
    p.zeta = Eigen::RowVectorXd(2);
    p.zeta << z0, z1;
    return p;
}

} // namespace curveflow::fixtures
