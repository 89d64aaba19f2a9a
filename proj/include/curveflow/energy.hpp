#pragma once

#include <array>
#include <utility>

#include "curveflow/geometry.hpp"

namespace curveflow {

/// Parameters of the energy: length penalty lambda >= 0 and the
/// spontaneous-curvature vector zeta in R^n.
struct FlowParams {
    double lambda = 0.0;
    Eigen::RowVectorXd zeta;

    void validate(int dim) const {
        if (lambda < 0.0)
            throw ValidationError("lambda must be >= 0");
        if (zeta.size() != dim)
            throw DimMismatch("zeta has dimension " + std::to_string(zeta.size()) +
                              ", curve has " + std::to_string(dim));
    }

    static FlowParams zero(int dim, double lambda = 0.0) {
        FlowParams p;
        p.lambda = lambda;
        p.zeta = Eigen::RowVectorXd::Zero(dim);
        return p;
    }
};

struct EnergyBreakdown {
    double bending = 0.0;  // 1/2 integral |kappa|^2 ds
    double coupling = 0.0; // integral <kappa, zeta> ds, telescoped to <T_last - T_first, zeta>
    double length = 0.0;
    double total = 0.0;    // bending - coupling + lambda * length
};

/// Per-vertex energy gradient; endpoint rows are identically zero
/// (endpoints are Dirichlet-fixed).
using GradientField = Eigen::MatrixXd;

EnergyBreakdown energy(const GeometryCache& cache, const FlowParams& params);
EnergyBreakdown energy(const DiscreteCurve& curve, const FlowParams& params);

/// Exact derivative of the discrete energy with respect to the free vertices.
GradientField gradient(const DiscreteCurve& curve, const FlowParams& params);

/// Central-difference oracle for `gradient`. The actual step per coordinate
/// is step * (1 + |x|).
GradientField fd_gradient(const DiscreteCurve& curve, const FlowParams& params, double step);

/// Euclidean norm of kappa - (zeta - <zeta,tau> tau) at each endpoint,
/// using the extrapolated endpoint curvature.
std::array<double, 2> natural_bc_residual(const GeometryCache& cache, const FlowParams& params);
std::array<double, 2> natural_bc_residual(const DiscreteCurve& curve, const FlowParams& params);

/// Euler-Lagrange residual field V = -nabla_s^2 kappa - 1/2 |kappa|^2 kappa
/// + lambda kappa at interior vertices (zero at endpoints), and its L2 norm.
std::pair<VertexField, double> stationarity_residual(const GeometryCache& cache,
                                                     const FlowParams& params);
std::pair<VertexField, double> stationarity_residual(const DiscreteCurve& curve,
                                                     const FlowParams& params);

} // namespace curveflow
