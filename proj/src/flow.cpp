#include "curveflow/flow.hpp"

#include <cmath>

namespace curveflow {

namespace {

// Symmetric positive-definite banded system, lower storage:
// band(i, k) holds A(i+k, i) for k = 0..bw. Solved by banded Cholesky.
class BandedSPD {
public:
    BandedSPD(int size, int bandwidth) : n_(size), bw_(bandwidth) {
        band_ = Eigen::MatrixXd::Zero(bw_ + 1, n_);
    }

    void add(int row, int col, double value) {
        if (row < col)
            std::swap(row, col);
        band_(row - col, col) += value;
    }

    // In-place Cholesky; throws SolverSingular on non-positive pivots.
    void factorize() {
        for (int j = 0; j < n_; ++j) {
            double d = band_(0, j);
            if (!(d > 0.0) || !std::isfinite(d))
                throw SolverSingular("pivot " + std::to_string(j));
            d = std::sqrt(d);
            band_(0, j) = d;
            const int m = std::min(bw_, n_ - 1 - j);
            for (int k = 1; k <= m; ++k)
                band_(k, j) /= d;
            for (int c = j + 1; c <= j + m; ++c) {
                const int kc = c - j;
                for (int r = c; r <= j + m; ++r)
                    band_(r - c, c) -= band_(r - j, j) * band_(kc, j);
            }
        }
    }

    Eigen::VectorXd solve(Eigen::VectorXd b) const {
        // forward substitution L y = b
        for (int j = 0; j < n_; ++j) {
            b(j) /= band_(0, j);
            const int m = std::min(bw_, n_ - 1 - j);
            for (int k = 1; k <= m; ++k)
                b(j + k) -= band_(k, j) * b(j);
        }
        // back substitution L^T x = y
        for (int j = n_ - 1; j >= 0; --j) {
            const int m = std::min(bw_, n_ - 1 - j);
            for (int k = 1; k <= m; ++k)
                b(j) -= band_(k, j) * b(j + k);
            b(j) /= band_(0, j);
        }
        return b;
    }

private:
    int n_;
    int bw_;
    Eigen::MatrixXd band_;
};

void check_step_result(const FlowState& next, const FlowConfig& config) {
    if (!next.curve.vertices.allFinite())
        throw NonFinite("curve coordinates after step " + std::to_string(next.step_index));
    const double guard =
        config.h_min_factor * next.cache.total_length / next.cache.segments();
    if (next.cache.min_edge() < guard)
        throw MeshCollapse("min edge " + std::to_string(next.cache.min_edge()) +
                           " below guard " + std::to_string(guard));
}

} // namespace

VelocityField compute_velocity(const FlowState& state, const FlowConfig& config) {
    GradientField g = gradient(state.curve, config.params);
    const int N = state.cache.segments();
    VelocityField v = VelocityField::Zero(N + 1, state.curve.dim());
    for (int i = 1; i < N; ++i) {
        Eigen::RowVectorXd raw = -g.row(i) / state.cache.vertex_weights(i);
        if (config.velocity_mode == VelocityMode::normal) {
            Eigen::RowVectorXd tau = state.cache.vertex_tangents.row(i);
            raw -= raw.dot(tau) * tau;
        }
        v.row(i) = raw;
    }
    return v;
}

FlowState explicit_step(const FlowState& state, const FlowConfig& config, double dt) {
    if (dt <= 0.0)
        throw ValidationError("explicit_step needs dt > 0");
    FlowState next;
    next.velocity = compute_velocity(state, config);
    next.curve = state.curve;
    const int N = state.cache.segments();
    for (int i = 1; i < N; ++i)
        next.curve.vertices.row(i) += dt * next.velocity.row(i);
    if (!next.curve.vertices.allFinite())
        throw NonFinite("curve coordinates after explicit step");
    next.cache = build_cache(next.curve);
    next.t = state.t + dt;
    next.step_index = state.step_index + 1;
    check_step_result(next, config);
    return next;
}

FlowState semi_implicit_step(const FlowState& state, const FlowConfig& config, double dt) {
    if (dt <= 0.0)
        throw ValidationError("semi_implicit_step needs dt > 0");
    const GeometryCache& c = state.cache;
    const int N = c.segments();
    const int n = c.dim();
    const Eigen::VectorXd& h = c.edge_lengths;

    // (M/dt + A) on the free vertices 1..N-1; A is the Hessian of the bending
    // term with edge lengths, weights, and extrapolation coefficients frozen,
    // scalar and identical for every coordinate. The interior stencils
    // D_j x = (x_{j+1}-x_j)/h_j - (x_j-x_{j-1})/h_{j-1} give the pentadiagonal
    // part 2 sum_j D_j^T D_j / H_j; the endpoint closures add two corner
    // blocks of bandwidth 4.
    BandedSPD sys(N - 1, std::min(4, N - 2));
    for (int i = 1; i < N; ++i)
        sys.add(i - 1, i - 1, c.vertex_weights(i) / dt);
    auto add_quadratic = [&](const double* row, int first_vertex, int width, double coeff) {
        for (int a = 0; a < width; ++a) {
            const int ia = first_vertex + a;
            if (ia < 1 || ia > N - 1)
                continue;
            for (int b = a; b < width; ++b) {
                const int ib = first_vertex + b;
                if (ib < 1 || ib > N - 1)
                    continue;
                sys.add(ib - 1, ia - 1, coeff * row[a] * row[b]);
            }
        }
    };
    for (int j = 1; j < N; ++j) {
        const double H = h(j - 1) + h(j);
        const double row[3] = {1.0 / h(j - 1), -1.0 / h(j - 1) - 1.0 / h(j), 1.0 / h(j)};
        add_quadratic(row, j - 1, 3, 2.0 / H);
    }
    if (N >= 4) {
        // frozen extrapolated endpoint curvature kappa_end = R x with R a
        // 5-vertex row; the closure 1/2 ds_end |kappa_end|^2 adds ds_end R^T R
        for (int side = 0; side < 2; ++side) {
            const bool left = side == 0;
            auto edge = [&](int o) { return left ? o : N - 1 - o; };
            const double pa = h(edge(0));
            const double pb = pa + h(edge(1));
            const double pc = pb + h(edge(2));
            const double w[3] = {pb * pc / ((pb - pa) * (pc - pa)),
                                 -pa * pc / ((pb - pa) * (pc - pb)),
                                 pa * pb / ((pc - pa) * (pc - pb))};
            double row[5] = {0, 0, 0, 0, 0};
            for (int m = 0; m < 3; ++m) {
                const int e0 = edge(m), e1 = edge(m + 1);
                const double cm = 2.0 * w[m] / (h(e0) + h(e1));
                row[m] += cm / h(e0);
                row[m + 1] -= cm * (1.0 / h(e0) + 1.0 / h(e1));
                row[m + 2] += cm / h(e1);
            }
            const double ds_end = 0.5 * (left ? h(0) : h(N - 1));
            if (left) {
                add_quadratic(row, 0, 5, ds_end);
            } else {
                double mirrored[5];
                for (int a = 0; a < 5; ++a)
                    mirrored[a] = row[4 - a];
                add_quadratic(mirrored, N - 4, 5, ds_end);
            }
        }
    }
    sys.factorize();

    GradientField g = gradient(state.curve, config.params);
    Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(N + 1, n);
    for (int d = 0; d < n; ++d) {
        Eigen::VectorXd rhs(N - 1);
        for (int i = 1; i < N; ++i)
            rhs(i - 1) = -g(i, d);
        Eigen::VectorXd sol = sys.solve(std::move(rhs));
        for (int i = 1; i < N; ++i)
            dx(i, d) = sol(i - 1);
    }

    FlowState next;
    next.velocity = VelocityField::Zero(N + 1, n);
    next.curve = state.curve;
    for (int i = 1; i < N; ++i) {
        Eigen::RowVectorXd delta = dx.row(i);
        if (config.velocity_mode == VelocityMode::normal) {
            Eigen::RowVectorXd tau = c.vertex_tangents.row(i);
            delta -= delta.dot(tau) * tau;
        }
        next.curve.vertices.row(i) += delta;
        next.velocity.row(i) = delta / dt;
    }
    if (!next.curve.vertices.allFinite())
        throw NonFinite("curve coordinates after semi-implicit step");
    next.cache = build_cache(next.curve);
    next.t = state.t + dt;
    next.step_index = state.step_index + 1;
    check_step_result(next, config);
    return next;
}

double select_dt(const FlowState& state, const FlowConfig& config) {
    const double hmin = state.cache.min_edge();
    if (config.integrator == Integrator::semi_implicit)
        return config.cfl_safety * hmin * hmin;
    double kmax2 = 0.0;
    for (int i = 0; i < state.cache.vertex_count(); ++i)
        kmax2 = std::max(kmax2, state.cache.curvature.row(i).squaredNorm());
    const double L = state.cache.total_length;
    return config.cfl_safety * hmin * hmin * hmin * hmin / (1.0 + kmax2 * L * L);
}

RunReport run(const DiscreteCurve& initial, const FlowConfig& config, const SnapshotSink& sink) {
    config.validate();
    initial.validate(6);
    config.params.validate(initial.dim());
    if (config.validate_bc0) {
        const auto bc = natural_bc_residual(initial, config.params);
        if (bc[0] > config.bc0_tol || bc[1] > config.bc0_tol)
            throw ValidationError("initial data violates the curvature boundary condition: "
                                  "residuals " + std::to_string(bc[0]) + ", " +
                                  std::to_string(bc[1]) + " exceed bc0_tol");
    }

    RunReport report;
    FlowState state = FlowState::make(initial);
    const EnergyBreakdown e0 = energy(state.cache, config.params);
    report.initial_energy = e0.total;
    report.chord = initial.chord();
    report.stationarity_tol = config.stationarity_tol > 0.0
                                  ? config.stationarity_tol
                                  : 1e-6 * (1.0 + e0.total);

    const int redistribute_every = config.resolved_redistribute_every();
    const Eigen::RowVectorXd f_minus = initial.front();
    const Eigen::RowVectorXd f_plus = initial.back();

    auto record = [&](const FlowState& s) -> double {
        const EnergyBreakdown e = energy(s.cache, config.params);
        const auto bc = natural_bc_residual(s.cache, config.params);
        const double v_l2 = stationarity_residual(s.cache, config.params).second;
        SeriesRow row;
        row.step = s.step_index;
        row.t = s.t;
        row.total = e.total;
        row.bending = e.bending;
        row.coupling = e.coupling;
        row.length = e.length;
        row.v_l2 = v_l2;
        row.bc0 = bc[0];
        row.bc1 = bc[1];
        row.min_h = s.cache.min_edge();
        report.series.rows.push_back(row);

        // in-loop bound monitors (recorded, never fatal)
        if (e.length < report.chord)
            report.violations.push_back(
                {s.step_index, "length_lower_bound", report.chord - e.length});
        if (config.params.lambda > 0.0) {
            const double cap = report.initial_energy / config.params.lambda + 1e-8;
            if (e.length > cap)
                report.violations.push_back({s.step_index, "length_upper_bound", e.length - cap});
        }
        const double curv_cap = 2.0 * (report.initial_energy + std::abs(e.coupling)) + 1e-6;
        if (2.0 * e.bending > curv_cap)
            report.violations.push_back(
                {s.step_index, "curvature_bound", 2.0 * e.bending - curv_cap});
        return v_l2;
    };

    while (true) {
        const double v_l2 = record(state);
        const bool want_snapshot =
            sink && config.snapshot_every > 0 && state.step_index % config.snapshot_every == 0;
        if (want_snapshot)
            sink(state);

        if (v_l2 <= report.stationarity_tol) {
            report.termination = Termination::stationary;
            break;
        }
        if (config.t_end > 0.0 && state.t >= config.t_end) {
            report.termination = Termination::t_end;
            break;
        }
        if (config.max_steps > 0 && state.step_index >= config.max_steps) {
            report.termination = Termination::max_steps;
            break;
        }

        double dt = config.dt_mode == DtMode::fixed ? config.dt : select_dt(state, config);
        if (config.t_end > 0.0 && state.t + dt > config.t_end)
            dt = config.t_end - state.t;

        try {
            state = config.integrator == Integrator::explicit_euler
                        ? explicit_step(state, config, dt)
                        : semi_implicit_step(state, config, dt);
            if (redistribute_every > 0 && state.step_index % redistribute_every == 0) {
                DiscreteCurve re = reparametrize_arclength(state.curve, state.curve.segments());
                re.vertices.row(0) = f_minus;
                re.vertices.row(re.vertices.rows() - 1) = f_plus;
                state.curve = std::move(re);
                state.cache = build_cache(state.curve);
                report.redistribution_steps.push_back(state.step_index);
            }
        } catch (const Error& err) {
            report.violations.push_back({state.step_index + 1, "step_error", 0.0});
            report.error_message = err.what();
            report.termination = Termination::error;
            break;
        }
    }

    if (sink)
        sink(state);
    report.final_curve = state.curve;
    return report;
}

std::string to_string(Termination t) {
    switch (t) {
    case Termination::stationary: return "stationary";
    case Termination::t_end: return "t_end";
    case Termination::max_steps: return "max_steps";
    case Termination::error: return "error";
    }
    return "error";
}

Termination termination_from_string(const std::string& s) {
    if (s == "stationary") return Termination::stationary;
    if (s == "t_end") return Termination::t_end;
    if (s == "max_steps") return Termination::max_steps;
    if (s == "error") return Termination::error;
    throw ParseError("unknown termination '" + s + "'");
}

} // namespace curveflow
