#pragma once

#include <cstdint>
#include <optional>

#include "curveflow/flow.hpp"

namespace curveflow {

struct DissipationReport {
    std::vector<Violation> violations;   // steps where the energy increased
    double max_identity_residual = 0.0;  // max |dW/dt + v_l2^2| over the series
    double rel_tol = 0.0;
    bool pass = false;
};

/// Flag every step whose energy increase exceeds rel_tol * |W|; steps listed
/// in exempt_steps (redistribution events) are skipped. Also evaluates the
/// dissipation identity residual |(W_{k+1}-W_k)/dt + v_l2(k)^2|.
DissipationReport dissipation_audit(const Series& series, double rel_tol,
                                    const std::vector<long>& exempt_steps = {});

struct BoundsReport {
    std::vector<Violation> violations;
    double max_length = 0.0;
    double max_curvature_integral = 0.0;
    bool pass = false;
};

/// Per-step checks: L >= chord, L <= W0/lambda + tol_len (lambda > 0 only),
/// and integral |kappa|^2 ds <= 2 (W0 + |[<tau,zeta>]|) + tol_curv, with the
/// telescoped coupling of the same step standing in for [<tau,zeta>].
BoundsReport bounds_audit(const Series& series, const FlowParams& params, double W0,
                          double chord, double tol_len = 1e-8, double tol_curv = 1e-6);

struct CurvatureNormRow {
    long step = 0;
    std::vector<double> nabla_l2;    // ||nabla_s^l kappa||_L2, l = 0..l_max
    std::vector<double> partial_l2;  // ||partial_s^l kappa||_L2
    std::vector<double> partial_inf; // ||partial_s^l kappa||_Linf
};

struct CurvatureNormSeries {
    std::vector<CurvatureNormRow> rows;
    std::vector<double> max_nabla_l2;   // max over rows, per l
    std::vector<double> max_partial_l2;
    std::vector<double> max_partial_inf;
    bool bounded = false;
};

CurvatureNormSeries curvature_norm_series(const std::vector<std::pair<long, DiscreteCurve>>& snapshots,
                                          int l_max);

struct AuditDetail {
    std::string curve_id;
    double ratio = 0.0;
};

struct AuditReport {
    std::string inequality_id;
    int corpus_size = 0;
    double empirical_constant = 0.0;
    std::string worst_case;
    bool pass = false;
    std::vector<AuditDetail> details;
};

/// Empirical constant of ||nabla_s^i kappa||_p <= C ||kappa||_2^(1-a) ||kappa||_{k,2}^a
/// with a = (i + 1/2 - 1/p)/k, over a corpus, in the scale-invariant norms.
/// Also asserts invariance of each ratio under rescaling by 0.5 and 2.
AuditReport interpolation_audit(const std::vector<DiscreteCurve>& corpus, int k, int i, double p);

/// Scalar function samples on a uniform grid over an interval, with the
/// analytic derivative sampled alongside.
struct ScalarField {
    std::string id;
    double interval_length = 1.0;
    Eigen::VectorXd g;
    Eigen::VectorXd gx;
};

/// Sup-norm bound ||g||_inf <= ||g_x||_L1 + ||g||_L1 / |J| (scalar case,
/// constant 1), allowing a quadrature slack of 1e-3 * ||g||_inf.
AuditReport sup_bound_audit(const std::vector<ScalarField>& corpus);

struct IdentityReport {
    double dt = 0.0;
    int segments = 0;
    double res_ds = 0.0;     // d/dt(ds) + <kappa,V> ds
    double res_tau = 0.0;    // d/dt tau - nabla_s V
    double res_kappa = 0.0;  // normal d/dt kappa - (nabla_s^2 V + <kappa,V> kappa)
    double res_kappa_split = 0.0; // partial_s kappa - (nabla_s kappa - |kappa|^2 tau)
    double res_edge_length = 0.0;  // per-edge (h' + <kappa,V> h)
    double max_residual() const;
};

/// Residuals of the normal-flow evolution identities between two consecutive
/// states dt apart. Throws ModeMismatch when the stored velocity has a
/// tangential component (gradient-mode states).
IdentityReport identity_audit(const FlowState& before, const FlowState& after, double dt,
                              const FlowParams& params);

/// Smooth test-curve family: a circular arc through fixed endpoints plus
/// seeded sine perturbations. The recipe is resolution-independent, so the
/// same member can be sampled at several N for refinement studies.
struct CurveRecipe {
    std::string id;
    int dim = 2;
    double bulge = 0.5;
    Eigen::RowVectorXd f_minus, f_plus;
    std::vector<double> mode_amplitudes; // amplitude of sin((m+1) pi u) per mode
    DiscreteCurve sample(int N) const;
};

std::vector<CurveRecipe> make_curve_corpus(std::uint64_t seed, int size, int dim);
std::vector<ScalarField> make_scalar_corpus(std::uint64_t seed, int size, int max_degree,
                                            int samples);

} // namespace curveflow
