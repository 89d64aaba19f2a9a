#include "curveflow/energy.hpp"

#include <cmath>

namespace curveflow {

EnergyBreakdown energy(const GeometryCache& cache, const FlowParams& params) {
    params.validate(cache.dim());
    EnergyBreakdown e;
    const int N = cache.segments();
    for (int i = 0; i <= N; ++i)
        e.bending += 0.5 * cache.curvature.row(i).squaredNorm() * cache.vertex_weights(i);
    e.coupling = (cache.edge_tangents.row(N - 1) - cache.edge_tangents.row(0)).dot(params.zeta);
    e.length = cache.total_length;
    e.total = e.bending - e.coupling + params.lambda * e.length;
    return e;
}

EnergyBreakdown energy(const DiscreteCurve& curve, const FlowParams& params) {
    return energy(build_cache(curve), params);
}

namespace {

// Adjoint accumulator for the discrete energy in edge variables (T_j, h_j).
// U_j collects dW/dT_j, a_j collects dW/dh_j.
struct EdgeAdjoints {
    Eigen::MatrixXd U;
    Eigen::VectorXd a;
};

// Chain an adjoint of the interior curvature kappa_m = 2 (T_m - T_{m-1}) / H_m
// into the edge adjoints.
void push_curvature_adjoint(const GeometryCache& c, int m, const Eigen::RowVectorXd& adj,
                            EdgeAdjoints& out) {
    const double H = c.edge_lengths(m - 1) + c.edge_lengths(m);
    out.U.row(m) += adj * (2.0 / H);
    out.U.row(m - 1) -= adj * (2.0 / H);
    const double s = adj.dot(c.curvature.row(m));
    out.a(m - 1) -= s / H;
    out.a(m) -= s / H;
}

// Lagrange-at-zero weights for nodes at distances (a, b, c) from the endpoint,
// together with their derivatives; used by both endpoint closures.
struct ExtrapWeights {
    double w[3];
    double dw[3][3]; // dw[m][r] = d w_m / d {a, b, c}
};

ExtrapWeights extrap_weights(double a, double b, double c) {
    ExtrapWeights e;
    e.w[0] = b * c / ((b - a) * (c - a));
    e.w[1] = -a * c / ((b - a) * (c - b));
    e.w[2] = a * b / ((c - a) * (c - b));
    e.dw[0][0] = e.w[0] * (1.0 / (b - a) + 1.0 / (c - a));
    e.dw[0][1] = e.w[0] * (1.0 / b - 1.0 / (b - a));
    e.dw[0][2] = e.w[0] * (1.0 / c - 1.0 / (c - a));
    e.dw[1][0] = e.w[1] * (1.0 / a + 1.0 / (b - a));
    e.dw[1][1] = e.w[1] * (-1.0 / (b - a) + 1.0 / (c - b));
    e.dw[1][2] = e.w[1] * (1.0 / c - 1.0 / (c - b));
    e.dw[2][0] = e.w[2] * (1.0 / a + 1.0 / (c - a));
    e.dw[2][1] = e.w[2] * (1.0 / b + 1.0 / (c - b));
    e.dw[2][2] = e.w[2] * (-1.0 / (c - a) - 1.0 / (c - b));
    return e;
}

// Endpoint closure 1/2 |kappa_end|^2 ds_end of the bending quadrature, with
// kappa_end the quadratic extrapolation of the three nearest interior
// curvatures. `left` selects the endpoint; indices mirror accordingly.
void push_closure_adjoint(const GeometryCache& c, bool left, EdgeAdjoints& out) {
    const int N = c.segments();
    const Eigen::VectorXd& h = c.edge_lengths;

    if (N == 2) {
        // both endpoint curvatures coincide with kappa_1
        if (!left)
            return;
        const Eigen::RowVectorXd k1 = c.curvature.row(1);
        push_curvature_adjoint(c, 1, Eigen::RowVectorXd(0.5 * (h(0) + h(1)) * k1), out);
        out.a(0) += 0.25 * k1.squaredNorm();
        out.a(1) += 0.25 * k1.squaredNorm();
        return;
    }

    const int end = left ? 0 : N;
    const double h_end = left ? h(0) : h(N - 1);
    const Eigen::RowVectorXd k_end = c.curvature.row(end);
    const Eigen::RowVectorXd q = 0.5 * h_end * k_end; // dE/dkappa_end
    const int a_end = left ? 0 : N - 1;               // edge carrying ds_end
    out.a(a_end) += 0.25 * k_end.squaredNorm();

    auto edge = [&](int offset) { return left ? offset : N - 1 - offset; };
    auto vertex = [&](int m) { return left ? m : N - m; };

    if (N == 3) {
        // linear extrapolation kappa_end = t kappa_near + (1 - t) kappa_far
        const double t = 1.0 + h(edge(0)) / h(edge(1));
        push_curvature_adjoint(c, vertex(1), Eigen::RowVectorXd(t * q), out);
        push_curvature_adjoint(c, vertex(2), Eigen::RowVectorXd((1.0 - t) * q), out);
        const double qk = q.dot(c.curvature.row(vertex(1)) - c.curvature.row(vertex(2)));
        out.a(edge(0)) += qk / h(edge(1));
        out.a(edge(1)) += qk * (-h(edge(0)) / (h(edge(1)) * h(edge(1))));
        return;
    }

    // node distances from the endpoint
    const double pa = h(edge(0));
    const double pb = pa + h(edge(1));
    const double pc = pb + h(edge(2));
    ExtrapWeights ew = extrap_weights(pa, pb, pc);

    double qk[3];
    for (int m = 0; m < 3; ++m) {
        qk[m] = q.dot(c.curvature.row(vertex(m + 1)));
        push_curvature_adjoint(c, vertex(m + 1), Eigen::RowVectorXd(ew.w[m] * q), out);
    }
    // node positions accumulate the first three edge lengths:
    // d pos_p / d h_r = 1 for r <= p
    for (int r = 0; r < 3; ++r) {
        double acc = 0.0;
        for (int p = r; p < 3; ++p)
            for (int m = 0; m < 3; ++m)
                acc += qk[m] * ew.dw[m][p];
        out.a(edge(r)) += acc;
    }
}

} // namespace

// The discrete energy in edge variables:
//   W = sum_{j=1..N-1} |T_j - T_{j-1}|^2 / H_j  +  E_left + E_right
//       - <T_{N-1} - T_0, zeta> + lambda sum h_j,
// where H_j = h_{j-1} + h_j and E_* are the endpoint closures of the bending
// quadrature. The gradient is accumulated through the adjoints of (T_j, h_j):
//   dW/de_j = (I - T_j T_j^T) U_j / h_j + a_j T_j,  e_j = x_{j+1} - x_j,
// and g_i = dW/de_{i-1} - dW/de_i on the free vertices.
GradientField gradient(const DiscreteCurve& curve, const FlowParams& params) {
    GeometryCache c = build_cache(curve);
    params.validate(curve.dim());
    const int N = c.segments();
    const int n = c.dim();
    const Eigen::VectorXd& h = c.edge_lengths;
    const Eigen::MatrixXd& T = c.edge_tangents;

    EdgeAdjoints adj;
    adj.U = Eigen::MatrixXd::Zero(N, n);
    adj.a = Eigen::VectorXd::Constant(N, params.lambda);

    for (int j = 1; j < N; ++j) {
        Eigen::RowVectorXd dT = T.row(j) - T.row(j - 1);
        const double H = h(j - 1) + h(j);
        adj.U.row(j) += 2.0 * dT / H;
        adj.U.row(j - 1) -= 2.0 * dT / H;
        const double q = dT.squaredNorm() / (H * H);
        adj.a(j - 1) -= q;
        adj.a(j) -= q;
    }
    push_closure_adjoint(c, true, adj);
    push_closure_adjoint(c, false, adj);

    adj.U.row(N - 1) -= params.zeta;
    adj.U.row(0) += params.zeta;

    Eigen::MatrixXd dWde(N, n);
    for (int j = 0; j < N; ++j) {
        Eigen::RowVectorXd Tj = T.row(j);
        dWde.row(j) = (adj.U.row(j) - adj.U.row(j).dot(Tj) * Tj) / h(j) + adj.a(j) * Tj;
    }

    GradientField g = GradientField::Zero(N + 1, n);
    for (int i = 1; i < N; ++i)
        g.row(i) = dWde.row(i - 1) - dWde.row(i);
    return g;
}

GradientField fd_gradient(const DiscreteCurve& curve, const FlowParams& params, double step) {
    if (step <= 0.0)
        throw ValidationError("fd_gradient needs step > 0");
    const int N = curve.segments();
    const int n = curve.dim();
    GradientField g = GradientField::Zero(N + 1, n);
    DiscreteCurve probe = curve;
    for (int i = 1; i < N; ++i) {
        for (int d = 0; d < n; ++d) {
            const double x = curve.vertices(i, d);
            const double sp = step * (1.0 + std::abs(x));
            probe.vertices(i, d) = x + sp;
            const double wp = energy(probe, params).total;
            probe.vertices(i, d) = x - sp;
            const double wm = energy(probe, params).total;
            probe.vertices(i, d) = x;
            g(i, d) = (wp - wm) / (2.0 * sp);
        }
    }
    return g;
}

std::array<double, 2> natural_bc_residual(const GeometryCache& cache, const FlowParams& params) {
    params.validate(cache.dim());
    std::array<double, 2> r{};
    const int idx[2] = {0, cache.vertex_count() - 1};
    for (int k = 0; k < 2; ++k) {
        Eigen::RowVectorXd tau = cache.vertex_tangents.row(idx[k]);
        Eigen::RowVectorXd target = params.zeta - params.zeta.dot(tau) * tau;
        r[k] = (cache.curvature.row(idx[k]) - target).norm();
    }
    return r;
}

std::array<double, 2> natural_bc_residual(const DiscreteCurve& curve, const FlowParams& params) {
    return natural_bc_residual(build_cache(curve), params);
}

std::pair<VertexField, double> stationarity_residual(const GeometryCache& cache,
                                                     const FlowParams& params) {
    params.validate(cache.dim());
    const int N = cache.segments();
    if (N < 6)
        throw StencilExhausted("stationarity residual needs N >= 6, got " + std::to_string(N));
    VertexField lap = iterated_nabla_s(cache.curvature, cache, 2);
    VertexField V = VertexField::Zero(N + 1, cache.dim());
    for (int i = 1; i < N; ++i) {
        Eigen::RowVectorXd kap = cache.curvature.row(i);
        V.row(i) = -lap.row(i) - 0.5 * kap.squaredNorm() * kap + params.lambda * kap;
    }
    double norm = lp_norm(V, cache, 2.0);
    return {std::move(V), norm};
}

std::pair<VertexField, double> stationarity_residual(const DiscreteCurve& curve,
                                                     const FlowParams& params) {
    return stationarity_residual(build_cache(curve), params);
}

} // namespace curveflow
