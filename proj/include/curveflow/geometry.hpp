#pragma once

#include "curveflow/curve.hpp"

namespace curveflow {

/// Per-edge and per-vertex arc-length calculus for a polyline.
///
/// Edge quantities live on edges 0..N-1, vertex quantities on vertices 0..N.
/// Vertex weights are the mass-lumped trapezoidal weights, so
/// sum(vertex_weights) == total_length. Curvature at the endpoints is a
/// quadratic extrapolation of the interior stencil; it is a diagnostic value
/// only and never drives the flow.
struct GeometryCache {
    Eigen::VectorXd edge_lengths;    // h_i, size N
    Eigen::MatrixXd edge_tangents;   // T_i, N x n, unit rows
    Eigen::VectorXd vertex_weights;  // ds_i, size N+1
    Eigen::MatrixXd vertex_tangents; // tau_i, (N+1) x n, unit rows
    Eigen::MatrixXd curvature;       // kappa_i, (N+1) x n
    Eigen::VectorXd arclength;       // cumulative s_i, size N+1
    double total_length = 0.0;

    int segments() const { return static_cast<int>(edge_lengths.size()); }
    int vertex_count() const { return segments() + 1; }
    int dim() const { return static_cast<int>(edge_tangents.cols()); }
    double min_edge() const { return edge_lengths.minCoeff(); }
};

GeometryCache build_cache(const DiscreteCurve& curve);

/// v minus its component along the unit vector tau.
inline Eigen::RowVectorXd normal_project(const Eigen::RowVectorXd& v,
                                         const Eigen::RowVectorXd& tau) {
    return v - v.dot(tau) * tau;
}

/// Arc-length derivative: central differences at interior vertices,
/// one-sided second-order stencils at the endpoints.
VertexField partial_s(const VertexField& field, const GeometryCache& cache);

/// Normal component of partial_s, projected vertexwise against tau.
VertexField nabla_s(const VertexField& field, const GeometryCache& cache);

/// Iterated nabla_s with the endpoint values of every intermediate field
/// replaced by quadratic extrapolation of interior values. The one-sided
/// endpoint tangent tau_0 = T_0 is only first-order accurate, and projecting
/// with it leaves an O(h) boundary error that a second differentiation
/// amplifies; extrapolation keeps the composition second order.
VertexField iterated_nabla_s(const VertexField& field, const GeometryCache& cache, int order);

/// Iterated full arc-length derivative (partial_s applied `order` times),
/// with the same endpoint extrapolation policy as iterated_nabla_s.
VertexField iterated_partial_s(const VertexField& field, const GeometryCache& cache, int order);

/// Resample to M+1 vertices at equal arc-length spacing measured along the
/// input polyline. Endpoints are copied bitwise.
DiscreteCurve reparametrize_arclength(const DiscreteCurve& curve, int M);

/// Integral p-norm with the cache's vertex weights; p = infinity gives the
/// vertex maximum of |field_i|.
double lp_norm(const VertexField& field, const GeometryCache& cache, double p);

/// Single length-weighted term L^{i+1-1/p} ||nabla_s^i kappa||_{L^p}.
double scale_invariant_seminorm(const GeometryCache& cache, int i, double p);

/// Length-weighted curvature norm sum_{i=0..k} L^{i+1-1/p} ||nabla_s^i kappa||_{L^p},
/// invariant under uniform rescaling of the curve.
double scale_invariant_norm(const GeometryCache& cache, int k, double p);
double scale_invariant_norm(const DiscreteCurve& curve, int k, double p);

/// Symmetric Hausdorff distance between two polylines (as point sets).
double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b);

} // namespace curveflow
