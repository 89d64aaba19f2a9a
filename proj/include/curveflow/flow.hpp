#pragma once

#include <functional>

#include "curveflow/energy.hpp"
#include "curveflow/report.hpp"

namespace curveflow {

enum class Integrator { explicit_euler, semi_implicit };
enum class VelocityMode { normal, gradient };
enum class DtMode { fixed, cfl };

struct FlowConfig {
    FlowParams params;
    Integrator integrator = Integrator::semi_implicit;
    VelocityMode velocity_mode = VelocityMode::normal;
    DtMode dt_mode = DtMode::cfl;
    double dt = 0.0;            // fixed mode step
    double cfl_safety = 0.1;    // in (0, 1]
    double t_end = 0.0;         // <= 0: no time limit
    long max_steps = 100000;
    double stationarity_tol = 0.0; // <= 0: resolved to 1e-6 * (1 + W0) at run start
    int redistribute_every = -1;   // < 0: 50 in normal mode, 0 in gradient mode
    double h_min_factor = 1e-3;    // mesh-collapse guard: h_min = factor * L / N
    int snapshot_every = 0;        // 0: final snapshot only
    bool validate_bc0 = false;     // reject initial data violating the curvature BC
    double bc0_tol = 1e-3;

    void validate() const {
        if (dt_mode == DtMode::fixed && dt <= 0.0)
            throw ValidationError("fixed dt_mode needs dt > 0");
        if (cfl_safety <= 0.0 || cfl_safety > 1.0)
            throw ValidationError("cfl_safety must be in (0, 1]");
        if (t_end <= 0.0 && max_steps <= 0)
            throw ValidationError("either t_end > 0 or max_steps > 0 is required");
        if (h_min_factor <= 0.0)
            throw ValidationError("h_min_factor must be > 0");
    }

    int resolved_redistribute_every() const {
        if (redistribute_every >= 0)
            return redistribute_every;
        return velocity_mode == VelocityMode::normal ? 50 : 0;
    }
};

/// Per-vertex descent velocity; zero at the endpoints. In normal mode the
/// interior rows are orthogonal to the vertex tangents.
using VelocityField = Eigen::MatrixXd;

struct FlowState {
    double t = 0.0;
    long step_index = 0;
    DiscreteCurve curve;
    GeometryCache cache;
    VelocityField velocity;

    static FlowState make(DiscreteCurve c) {
        FlowState s;
        s.cache = build_cache(c);
        s.curve = std::move(c);
        s.velocity = VelocityField::Zero(s.curve.vertex_count(), s.curve.dim());
        return s;
    }
};

/// Mass-lumped negative gradient, optionally projected off the tangent.
VelocityField compute_velocity(const FlowState& state, const FlowConfig& config);

/// Forward Euler step. Endpoints are untouched bitwise.
FlowState explicit_step(const FlowState& state, const FlowConfig& config, double dt);

/// Linearly implicit step: solves (M/dt + A) dx = -grad W with A the bending
/// Hessian at frozen edge geometry, then applies dx to the interior vertices
/// (normal-projected first in normal mode).
FlowState semi_implicit_step(const FlowState& state, const FlowConfig& config, double dt);

/// CFL-style step size: safety * min(h)^4 / (1 + max|kappa|^2 L^2) for the
/// explicit integrator, safety * min(h)^2 for the semi-implicit one.
double select_dt(const FlowState& state, const FlowConfig& config);

using SnapshotSink = std::function<void(const FlowState&)>;

/// Drive the flow to stationarity, t_end, or max_steps. Step errors terminate
/// the run with Termination::error and are recorded, not rethrown.
RunReport run(const DiscreteCurve& initial, const FlowConfig& config,
              const SnapshotSink& sink = {});

} // namespace curveflow
