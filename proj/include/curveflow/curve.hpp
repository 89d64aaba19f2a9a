#pragma once

#include <Eigen/Dense>

#include "curveflow/errors.hpp"

namespace curveflow {

/// Values attached to the vertices of a curve, one row per vertex.
/// Scalar fields use a single column.
using VertexField = Eigen::MatrixXd;

/// Open polyline in R^n with endpoints held fixed by the flow.
/// Vertices are stored row-wise: row i is x_i, i = 0..N.
struct DiscreteCurve {
    Eigen::MatrixXd vertices;

    DiscreteCurve() = default;
    explicit DiscreteCurve(Eigen::MatrixXd verts) : vertices(std::move(verts)) {}

    int dim() const { return static_cast<int>(vertices.cols()); }
    int vertex_count() const { return static_cast<int>(vertices.rows()); }
    int segments() const { return vertex_count() - 1; }

    Eigen::RowVectorXd front() const { return vertices.row(0); }
    Eigen::RowVectorXd back() const { return vertices.row(vertices.rows() - 1); }

    double chord() const { return (back() - front()).norm(); }

    // Structural checks. Fourth-order operators additionally need
    // min_segments >= 4 (flow drivers pass 6 so the stationarity residual
    // is computable).
    void validate(int min_segments = 2) const {
        if (dim() < 2)
            throw ValidationError("curve dimension must be >= 2");
        if (segments() < min_segments)
            throw ValidationError("curve needs at least " + std::to_string(min_segments) +
                                  " segments, got " + std::to_string(segments()));
        for (int i = 0; i + 1 < vertex_count(); ++i) {
            if ((vertices.row(i + 1) - vertices.row(i)).norm() <= 0.0)
                throw DegenerateEdge("vertices " + std::to_string(i) + " and " +
                                     std::to_string(i + 1) + " coincide");
        }
        if ((back() - front()).norm() <= 0.0)
            throw CoincidentEndpoints();
    }
};

} // namespace curveflow
