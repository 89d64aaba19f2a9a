#include "curveflow/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace curveflow {

namespace {

// Lagrange weights of the quadratic through (s[a], y[a]) evaluated at target.
struct QuadWeights {
    double w0, w1, w2;
};

QuadWeights quadratic_weights(double target, double s0, double s1, double s2) {
    QuadWeights q;
    q.w0 = (target - s1) * (target - s2) / ((s0 - s1) * (s0 - s2));
    q.w1 = (target - s0) * (target - s2) / ((s1 - s0) * (s1 - s2));
    q.w2 = (target - s0) * (target - s1) / ((s2 - s0) * (s2 - s1));
    return q;
}

// Replace the endpoint rows of a vertex field by quadratic extrapolation of
// the first/last three interior rows (linear/constant for tiny N).
void extrapolate_ends(VertexField& f, const Eigen::VectorXd& s) {
    const int N = static_cast<int>(f.rows()) - 1;
    if (N >= 4) {
        QuadWeights a = quadratic_weights(s(0), s(1), s(2), s(3));
        f.row(0) = a.w0 * f.row(1) + a.w1 * f.row(2) + a.w2 * f.row(3);
        QuadWeights b = quadratic_weights(s(N), s(N - 3), s(N - 2), s(N - 1));
        f.row(N) = b.w0 * f.row(N - 3) + b.w1 * f.row(N - 2) + b.w2 * f.row(N - 1);
    } else if (N == 3) {
        double t0 = (s(0) - s(2)) / (s(1) - s(2));
        f.row(0) = t0 * f.row(1) + (1.0 - t0) * f.row(2);
        double t1 = (s(3) - s(1)) / (s(2) - s(1));
        f.row(N) = t1 * f.row(2) + (1.0 - t1) * f.row(1);
    } else {
        f.row(0) = f.row(1);
        f.row(N) = f.row(N - 1);
    }
}

void check_field(const VertexField& field, const GeometryCache& cache) {
    if (field.rows() != cache.vertex_count())
        throw LengthMismatch("field has " + std::to_string(field.rows()) +
                             " rows, cache expects " + std::to_string(cache.vertex_count()));
}

} // namespace

GeometryCache build_cache(const DiscreteCurve& curve) {
    const int N = curve.segments();
    const int n = curve.dim();
    if (N < 2)
        throw ValidationError("cache needs at least 2 segments");

    GeometryCache c;
    c.edge_lengths.resize(N);
    c.edge_tangents.resize(N, n);
    for (int i = 0; i < N; ++i) {
        Eigen::RowVectorXd e = curve.vertices.row(i + 1) - curve.vertices.row(i);
        double h = e.norm();
        if (h <= 0.0)
            throw DegenerateEdge("edge " + std::to_string(i) + " has zero length");
        c.edge_lengths(i) = h;
        c.edge_tangents.row(i) = e / h;
    }
    if ((curve.back() - curve.front()).norm() <= 0.0)
        throw CoincidentEndpoints();

    c.arclength.resize(N + 1);
    c.arclength(0) = 0.0;
    for (int i = 0; i < N; ++i)
        c.arclength(i + 1) = c.arclength(i) + c.edge_lengths(i);
    c.total_length = c.arclength(N);

    c.vertex_weights.resize(N + 1);
    c.vertex_weights(0) = 0.5 * c.edge_lengths(0);
    c.vertex_weights(N) = 0.5 * c.edge_lengths(N - 1);
    for (int i = 1; i < N; ++i)
        c.vertex_weights(i) = 0.5 * (c.edge_lengths(i - 1) + c.edge_lengths(i));

    c.vertex_tangents.resize(N + 1, n);
    c.vertex_tangents.row(0) = c.edge_tangents.row(0);
    c.vertex_tangents.row(N) = c.edge_tangents.row(N - 1);
    for (int i = 1; i < N; ++i) {
        Eigen::RowVectorXd chord = curve.vertices.row(i + 1) - curve.vertices.row(i - 1);
        double len = chord.norm();
        if (len <= 0.0)
            throw DegenerateEdge("vertices " + std::to_string(i - 1) + " and " +
                                 std::to_string(i + 1) + " coincide");
        c.vertex_tangents.row(i) = chord / len;
    }

    c.curvature.resize(N + 1, n);
    for (int i = 1; i < N; ++i)
        c.curvature.row(i) = 2.0 * (c.edge_tangents.row(i) - c.edge_tangents.row(i - 1)) /
                             (c.edge_lengths(i - 1) + c.edge_lengths(i));
    extrapolate_ends(c.curvature, c.arclength);
    return c;
}

VertexField partial_s(const VertexField& field, const GeometryCache& cache) {
    check_field(field, cache);
    const int N = cache.segments();
    const Eigen::VectorXd& h = cache.edge_lengths;
    const Eigen::VectorXd& s = cache.arclength;

    VertexField out(field.rows(), field.cols());
    for (int i = 1; i < N; ++i)
        out.row(i) = (field.row(i + 1) - field.row(i - 1)) / (h(i - 1) + h(i));

    // One-sided 3-point first-derivative stencils on the nonuniform grid.
    {
        double a = s(1) - s(0), b = s(2) - s(0);
        out.row(0) = (-(a + b) / (a * b)) * field.row(0) +
                     (b / (a * (b - a))) * field.row(1) +
                     (-a / (b * (b - a))) * field.row(2);
    }
    {
        double a = s(N) - s(N - 1), b = s(N) - s(N - 2);
        out.row(N) = ((a + b) / (a * b)) * field.row(N) -
                     (b / (a * (b - a))) * field.row(N - 1) +
                     (a / (b * (b - a))) * field.row(N - 2);
    }
    return out;
}

VertexField nabla_s(const VertexField& field, const GeometryCache& cache) {
    VertexField d = partial_s(field, cache);
    for (int i = 0; i < d.rows(); ++i) {
        Eigen::RowVectorXd tau = cache.vertex_tangents.row(i);
        d.row(i) -= d.row(i).dot(tau) * tau;
    }
    return d;
}

VertexField iterated_nabla_s(const VertexField& field, const GeometryCache& cache, int order) {
    VertexField f = field;
    for (int k = 0; k < order; ++k) {
        f = nabla_s(f, cache);
        extrapolate_ends(f, cache.arclength);
    }
    return f;
}

VertexField iterated_partial_s(const VertexField& field, const GeometryCache& cache, int order) {
    VertexField f = field;
    for (int k = 0; k < order; ++k) {
        f = partial_s(f, cache);
        extrapolate_ends(f, cache.arclength);
    }
    return f;
}

DiscreteCurve reparametrize_arclength(const DiscreteCurve& curve, int M) {
    if (M < 4)
        throw ValidationError("reparametrize_arclength needs M >= 4");
    GeometryCache c = build_cache(curve); // throws DegenerateEdge on bad input
    const int N = curve.segments();
    const double L = c.total_length;

    Eigen::MatrixXd out(M + 1, curve.dim());
    out.row(0) = curve.vertices.row(0);
    out.row(M) = curve.vertices.row(N);
    int seg = 0;
    for (int j = 1; j < M; ++j) {
        double target = L * static_cast<double>(j) / static_cast<double>(M);
        while (seg + 1 < N && c.arclength(seg + 1) < target)
            ++seg;
        double w = (target - c.arclength(seg)) / c.edge_lengths(seg);
        w = std::clamp(w, 0.0, 1.0);
        out.row(j) = (1.0 - w) * curve.vertices.row(seg) + w * curve.vertices.row(seg + 1);
    }
    return DiscreteCurve(std::move(out));
}

double lp_norm(const VertexField& field, const GeometryCache& cache, double p) {
    check_field(field, cache);
    if (std::isinf(p))
        return field.rowwise().norm().maxCoeff();
    if (p < 1.0)
        throw ValidationError("lp_norm needs p >= 1");
    double acc = 0.0;
    for (int i = 0; i < field.rows(); ++i)
        acc += std::pow(field.row(i).norm(), p) * cache.vertex_weights(i);
    return std::pow(acc, 1.0 / p);
}

double scale_invariant_seminorm(const GeometryCache& cache, int i, double p) {
    if (i < 0)
        throw ValidationError("scale_invariant_seminorm needs i >= 0");
    if (p < 2.0)
        throw ValidationError("scale_invariant_seminorm needs p >= 2");
    if (i > cache.segments() - 4)
        throw StencilExhausted("derivative order " + std::to_string(i) + " with N = " +
                               std::to_string(cache.segments()));
    const double L = cache.total_length;
    VertexField f = iterated_nabla_s(cache.curvature, cache, i);
    double weight = std::isinf(p) ? std::pow(L, i + 1.0) : std::pow(L, i + 1.0 - 1.0 / p);
    return weight * lp_norm(f, cache, p);
}

double scale_invariant_norm(const GeometryCache& cache, int k, double p) {
    double total = 0.0;
    for (int i = 0; i <= k; ++i)
        total += scale_invariant_seminorm(cache, i, p);
    return total;
}

double scale_invariant_norm(const DiscreteCurve& curve, int k, double p) {
    return scale_invariant_norm(build_cache(curve), k, p);
}

namespace {

double point_segment_distance(const Eigen::RowVectorXd& p, const Eigen::RowVectorXd& a,
                              const Eigen::RowVectorXd& b) {
    Eigen::RowVectorXd ab = b - a;
    double denom = ab.squaredNorm();
    double t = denom > 0.0 ? std::clamp((p - a).dot(ab) / denom, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

double directed_hausdorff(const DiscreteCurve& a, const DiscreteCurve& b) {
    double worst = 0.0;
    for (int i = 0; i < a.vertex_count(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j + 1 < b.vertex_count(); ++j)
            best = std::min(best, point_segment_distance(a.vertices.row(i), b.vertices.row(j),
                                                         b.vertices.row(j + 1)));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double hausdorff_distance(const DiscreteCurve& a, const DiscreteCurve& b) {
    if (a.dim() != b.dim())
        throw DimMismatch("hausdorff_distance");
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

} // namespace curveflow
