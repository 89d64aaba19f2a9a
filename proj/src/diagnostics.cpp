#include "curveflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace curveflow {

namespace {

bool is_exempt(long step, const std::vector<long>& exempt) {
    return std::find(exempt.begin(), exempt.end(), step) != exempt.end();
}

} // namespace

DissipationReport dissipation_audit(const Series& series, double rel_tol,
                                    const std::vector<long>& exempt_steps) {
    if (series.size() < 2)
        throw InsufficientData("dissipation audit needs at least 2 series rows");
    DissipationReport r;
    r.rel_tol = rel_tol;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const SeriesRow& a = series[k];
        const SeriesRow& b = series[k + 1];
        if (is_exempt(b.step, exempt_steps))
            continue;
        const double dW = b.total - a.total;
        if (dW > rel_tol * std::abs(a.total))
            r.violations.push_back({b.step, "energy_increase", dW});
        const double dt = b.t - a.t;
        if (dt > 0.0) {
            const double res = std::abs(dW / dt + a.v_l2 * a.v_l2);
            r.max_identity_residual = std::max(r.max_identity_residual, res);
        }
    }
    r.pass = r.violations.empty();
    return r;
}

BoundsReport bounds_audit(const Series& series, const FlowParams& params, double W0,
                          double chord, double tol_len, double tol_curv) {
    if (series.empty())
        throw InsufficientData("bounds audit needs a non-empty series");
    BoundsReport r;
    for (const SeriesRow& row : series.rows) {
        r.max_length = std::max(r.max_length, row.length);
        const double curv_integral = 2.0 * row.bending;
        r.max_curvature_integral = std::max(r.max_curvature_integral, curv_integral);
        if (row.length < chord)
            r.violations.push_back({row.step, "length_lower_bound", chord - row.length});
        if (params.lambda > 0.0) {
            const double cap = W0 / params.lambda + tol_len;
            if (row.length > cap)
                r.violations.push_back({row.step, "length_upper_bound", row.length - cap});
        }
        const double curv_cap = 2.0 * (W0 + std::abs(row.coupling)) + tol_curv;
        if (curv_integral > curv_cap)
            r.violations.push_back({row.step, "curvature_bound", curv_integral - curv_cap});
    }
    r.pass = r.violations.empty();
    return r;
}

CurvatureNormSeries curvature_norm_series(
    const std::vector<std::pair<long, DiscreteCurve>>& snapshots, int l_max) {
    CurvatureNormSeries out;
    out.max_nabla_l2.assign(l_max + 1, 0.0);
    out.max_partial_l2.assign(l_max + 1, 0.0);
    out.max_partial_inf.assign(l_max + 1, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& [step, curve] : snapshots) {
        GeometryCache cache = build_cache(curve);
        if (l_max > cache.segments() - 4)
            throw StencilExhausted("curvature_norm_series l_max = " + std::to_string(l_max));
        CurvatureNormRow row;
        row.step = step;
        for (int l = 0; l <= l_max; ++l) {
            VertexField nf = iterated_nabla_s(cache.curvature, cache, l);
            VertexField pf = iterated_partial_s(cache.curvature, cache, l);
            row.nabla_l2.push_back(lp_norm(nf, cache, 2.0));
            row.partial_l2.push_back(lp_norm(pf, cache, 2.0));
            row.partial_inf.push_back(lp_norm(pf, cache, inf));
            out.max_nabla_l2[l] = std::max(out.max_nabla_l2[l], row.nabla_l2.back());
            out.max_partial_l2[l] = std::max(out.max_partial_l2[l], row.partial_l2.back());
            out.max_partial_inf[l] = std::max(out.max_partial_inf[l], row.partial_inf.back());
        }
        out.rows.push_back(std::move(row));
    }
    out.bounded = true;
    for (int l = 0; l <= l_max; ++l)
        if (!std::isfinite(out.max_nabla_l2[l]) || !std::isfinite(out.max_partial_l2[l]) ||
            !std::isfinite(out.max_partial_inf[l]))
            out.bounded = false;
    return out;
}

namespace {

double interpolation_ratio(const GeometryCache& cache, int k, int i, double p) {
    const double alpha = (i + 0.5 - 1.0 / p) / k;
    const double lhs = scale_invariant_seminorm(cache, i, p);
    const double base = scale_invariant_seminorm(cache, 0, 2.0);
    if (base <= 0.0)
        throw ZeroCurvature("interpolation ratio undefined for a straight curve");
    const double norm_k2 = scale_invariant_norm(cache, k, 2.0);
    return lhs / (std::pow(base, 1.0 - alpha) * std::pow(norm_k2, alpha));
}

} // namespace

AuditReport interpolation_audit(const std::vector<DiscreteCurve>& corpus, int k, int i, double p) {
    if (!(0 <= i && i < k))
        throw ValidationError("interpolation audit needs 0 <= i < k");
    if (p < 2.0)
        throw ValidationError("interpolation audit needs p >= 2");
    AuditReport r;
    r.inequality_id = "interpolation_k" + std::to_string(k) + "_i" + std::to_string(i);
    r.corpus_size = static_cast<int>(corpus.size());
    r.pass = r.corpus_size > 0;
    int idx = 0;
    for (const DiscreteCurve& curve : corpus) {
        GeometryCache cache = build_cache(curve);
        const double ratio = interpolation_ratio(cache, k, i, p);
        AuditDetail d;
        d.curve_id = "corpus[" + std::to_string(idx) + "]";
        d.ratio = ratio;
        r.details.push_back(d);
        if (!std::isfinite(ratio))
            r.pass = false;
        if (ratio > r.empirical_constant) {
            r.empirical_constant = ratio;
            r.worst_case = d.curve_id;
        }
        // exact scale invariance of the ratio
        for (double alpha : {0.5, 2.0}) {
            DiscreteCurve scaled(Eigen::MatrixXd(alpha * curve.vertices));
            const double rs = interpolation_ratio(build_cache(scaled), k, i, p);
            if (std::abs(rs - ratio) > 1e-8 * std::max(1.0, std::abs(ratio)))
                r.pass = false;
        }
        ++idx;
    }
    return r;
}

AuditReport sup_bound_audit(const std::vector<ScalarField>& corpus) {
    AuditReport r;
    r.inequality_id = "sup_bound";
    r.corpus_size = static_cast<int>(corpus.size());
    r.pass = r.corpus_size > 0;
    for (const ScalarField& f : corpus) {
        const int m = static_cast<int>(f.g.size());
        if (m < 2 || f.gx.size() != m)
            throw InsufficientData("scalar field needs matched g/gx samples");
        const double dx = f.interval_length / (m - 1);
        auto trapz_abs = [&](const Eigen::VectorXd& v) {
            double acc = 0.5 * (std::abs(v(0)) + std::abs(v(m - 1)));
            for (int j = 1; j + 1 < m; ++j)
                acc += std::abs(v(j));
            return acc * dx;
        };
        const double sup = f.g.cwiseAbs().maxCoeff();
        const double rhs = trapz_abs(f.gx) + trapz_abs(f.g) / f.interval_length;
        const double slack = 1e-3 * sup;
        AuditDetail d;
        d.curve_id = f.id;
        d.ratio = rhs > 0.0 ? sup / rhs : (sup > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        r.details.push_back(d);
        if (sup > rhs + slack) {
            r.pass = false;
        }
        if (d.ratio > r.empirical_constant) {
            r.empirical_constant = d.ratio;
            r.worst_case = f.id;
        }
    }
    return r;
}

double IdentityReport::max_residual() const {
    return std::max({res_ds, res_tau, res_kappa, res_kappa_split, res_edge_length});
}

IdentityReport identity_audit(const FlowState& before, const FlowState& after, double dt,
                              const FlowParams& params) {
    if (before.curve.vertex_count() != after.curve.vertex_count())
        throw LengthMismatch("identity audit needs states at the same vertex count");
    if (dt <= 0.0)
        throw ValidationError("identity audit needs dt > 0");
    params.validate(before.curve.dim());

    const GeometryCache& ca = before.cache;
    const GeometryCache& cb = after.cache;
    const VertexField& V = after.velocity; // velocity applied over [t, t+dt]
    const int N = ca.segments();
    if (N < 13)
        throw InsufficientData("identity audit needs N >= 13");

    double vmax = 0.0, xmax = 0.0, tangential = 0.0;
    for (int i = 1; i < N; ++i) {
        vmax = std::max(vmax, V.row(i).norm());
        xmax = std::max(xmax, before.curve.vertices.row(i).norm());
        tangential = std::max(tangential, std::abs(V.row(i).dot(ca.vertex_tangents.row(i))));
    }
    // Velocities reconstructed from position differences resolve tangential
    // components only down to the coordinate roundoff eps * |x| / dt, and a
    // chord velocity over a multi-step window picks up a second-order
    // tangential drift. Gradient-mode tangential fractions sit far above
    // either, so a coarse relative threshold separates the two cleanly.
    const double eps = std::numeric_limits<double>::epsilon();
    const double mode_tol = std::max(1e-4 * vmax, 64.0 * eps * xmax / dt);
    if (tangential > mode_tol)
        throw ModeMismatch("states carry a tangential velocity; identities assume normal flow");

    IdentityReport r;
    r.dt = dt;
    r.segments = N;

    VertexField nablaV = nabla_s(V, ca);
    VertexField nabla2V = iterated_nabla_s(V, ca, 2);
    VertexField dkap = partial_s(ca.curvature, ca);
    VertexField nkap = nabla_s(ca.curvature, ca);

    // The first and last few vertices carry the discrete enforcement of the
    // natural boundary conditions; the gradient velocity there does not
    // converge pointwise to the smooth normal velocity. The continuum
    // identities are therefore measured in the bulk, one stencil width past
    // that layer (two widths for nabla_s^2 V).
    const int lo = 4, hi = N - 4;
    for (int i = 1; i < N; ++i) {
        const Eigen::RowVectorXd kap = ca.curvature.row(i);
        const Eigen::RowVectorXd tau = ca.vertex_tangents.row(i);
        const double kv = kap.dot(V.row(i));

        Eigen::RowVectorXd q = dkap.row(i) - (nkap.row(i) - kap.squaredNorm() * tau);
        r.res_kappa_split = std::max(r.res_kappa_split, q.norm());

        if (i < lo || i > hi)
            continue;
        const double ds_rate = (cb.vertex_weights(i) - ca.vertex_weights(i)) / dt;
        r.res_ds = std::max(r.res_ds, std::abs(ds_rate + kv * ca.vertex_weights(i)));

        Eigen::RowVectorXd tau_rate = (cb.vertex_tangents.row(i) - tau) / dt;
        r.res_tau = std::max(r.res_tau, (tau_rate - nablaV.row(i)).norm());

        if (i >= lo + 2 && i <= hi - 2) {
            Eigen::RowVectorXd kap_rate = (cb.curvature.row(i) - kap) / dt;
            kap_rate -= kap_rate.dot(tau) * tau; // normal time derivative
            r.res_kappa =
                std::max(r.res_kappa, (kap_rate - nabla2V.row(i) - kv * kap).norm());
        }
    }
    for (int e = lo; e + 1 <= hi; ++e) {
        const double kv_avg = 0.5 * (ca.curvature.row(e).dot(V.row(e)) +
                                     ca.curvature.row(e + 1).dot(V.row(e + 1)));
        const double h_rate = (cb.edge_lengths(e) - ca.edge_lengths(e)) / dt;
        r.res_edge_length = std::max(r.res_edge_length, std::abs(h_rate + kv_avg * ca.edge_lengths(e)));
    }
    return r;
}

DiscreteCurve CurveRecipe::sample(int N) const {
    const int n = dim;
    Eigen::RowVectorXd mid = 0.5 * (f_minus + f_plus);
    Eigen::RowVectorXd u_dir = f_plus - f_minus;
    const double c = 0.5 * u_dir.norm();
    u_dir /= u_dir.norm();
    // in-plane normal: first coordinate axis not aligned with the chord
    Eigen::RowVectorXd nu = Eigen::RowVectorXd::Zero(n);
    int pick = 0;
    for (int d = 1; d < n; ++d)
        if (std::abs(u_dir(d)) < std::abs(u_dir(pick)))
            pick = d;
    nu(pick) = 1.0;
    nu -= nu.dot(u_dir) * u_dir;
    nu /= nu.norm();

    const double b = bulge;
    const double R = (c * c + b * b) / (2.0 * b);
    // circle center: midpoint shifted so the arc bulges along nu
    const double a0 = std::atan2(R - b, -c);
    const double a1 = std::atan2(R - b, c);

    Eigen::MatrixXd verts(N + 1, n);
    for (int j = 0; j <= N; ++j) {
        const double uj = static_cast<double>(j) / N;
        const double th = a0 + (a1 - a0) * uj;
        Eigen::RowVectorXd p =
            mid + (b - R) * nu + R * (std::cos(th) * u_dir + std::sin(th) * nu);
        for (std::size_t m = 0; m < mode_amplitudes.size(); ++m) {
            Eigen::RowVectorXd dir = nu;
            if (n > 2 && m % 2 == 1) {
                dir = Eigen::RowVectorXd::Zero(n);
                dir(2) = 1.0;
            }
            p += mode_amplitudes[m] * std::sin((m + 1) * std::numbers::pi * uj) * dir;
        }
        verts.row(j) = p;
    }
    verts.row(0) = f_minus;
    verts.row(N) = f_plus;
    return DiscreteCurve(std::move(verts));
}

std::vector<CurveRecipe> make_curve_corpus(std::uint64_t seed, int size, int dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> bulge_dist(0.3, 1.2);
    std::uniform_real_distribution<double> amp_dist(-0.06, 0.06);
    std::vector<CurveRecipe> out;
    out.reserve(size);
    for (int k = 0; k < size; ++k) {
        CurveRecipe r;
        r.id = "corpus[" + std::to_string(k) + "]";
        r.dim = dim;
        r.bulge = bulge_dist(rng);
        r.f_minus = Eigen::RowVectorXd::Zero(dim);
        r.f_minus(0) = -1.0;
        r.f_plus = Eigen::RowVectorXd::Zero(dim);
        r.f_plus(0) = 1.0;
        r.mode_amplitudes = {amp_dist(rng), amp_dist(rng), amp_dist(rng)};
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ScalarField> make_scalar_corpus(std::uint64_t seed, int size, int max_degree,
                                            int samples) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<ScalarField> out;
    out.reserve(size);
    for (int k = 0; k < size; ++k) {
        Eigen::VectorXd a(max_degree + 1), b(max_degree + 1);
        for (int m = 0; m <= max_degree; ++m) {
            a(m) = coeff(rng);
            b(m) = coeff(rng);
        }
        ScalarField f;
        f.id = "field[" + std::to_string(k) + "]";
        f.interval_length = 1.0;
        f.g.resize(samples);
        f.gx.resize(samples);
        for (int j = 0; j < samples; ++j) {
            const double x = static_cast<double>(j) / (samples - 1);
            double g = a(0), gx = 0.0;
            for (int m = 1; m <= max_degree; ++m) {
                const double w = 2.0 * std::numbers::pi * m;
                g += a(m) * std::cos(w * x) + b(m) * std::sin(w * x);
                gx += -a(m) * w * std::sin(w * x) + b(m) * w * std::cos(w * x);
            }
            f.g(j) = g;
            f.gx(j) = gx;
        }
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace curveflow
