// Non-Riemannian invariants: distortion, S-function, chi-curvature, and
// their transformation laws under projective deformation.
#pragma once

#include "finsler/metric.hpp"

#include <string>
#include <vector>

namespace finsler {

/// Volume density sigma(x) for the distortion; defaults to the coordinate
/// volume sigma = 1. Must not depend on fibre coordinates.
struct VolumeSpec {
    Expr sigma = Expr::constant(1.0);
};

inline VolumeSpec make_volume(Expr sigma) {
    if (sigma.uses_fibre())
        throw DomainError("volume density must depend on base coordinates only");
    VolumeSpec v;
    v.sigma = sigma;
    return v;
}

/// tau, S and chi as expressions over one (metric, volume, spray) triple.
/// Building these walks five derivative levels of the energy, so callers
/// evaluating many points should build once and reuse.
struct InvariantFields {
    int dim = 0;
    Expr tau;
    std::vector<Expr> mean_cartan;  // I_k = d tau / dy^k
    Expr S;
    std::vector<Expr> S_dy;
    std::vector<Expr> chi;      // 1/2 (G(dS/dy^i) - dS/dx^i)
    std::vector<Expr> chi_alt;  // 1/2 (nabla(dS/dy^i) - delta S/delta x^i)
};

inline InvariantFields build_invariant_fields(const MetricSpec& m,
                                              const VolumeSpec& vol,
                                              const SpraySpec& s) {
    const int n = m.dim;
    InvariantFields f;
    f.dim = n;
    f.tau = 0.5 * (log(m.det_g) - log(vol.sigma));
    for (int k = 1; k <= n; ++k) f.mean_cartan.push_back(f.tau.dy(k));
    f.S = spray_derivative(s, f.tau);
    for (int i = 1; i <= n; ++i) f.S_dy.push_back(f.S.dy(i));
    for (int i = 1; i <= n; ++i)
        f.chi.push_back(0.5 * (spray_derivative(s, f.S_dy[i - 1]) - f.S.dx(i)));
    std::vector<Expr> nabla_Sdy = nabla_covector_coefficients(f.S_dy, s);
    std::vector<Expr> delta_S = delta_coefficients(s, f.S);
    for (int i = 0; i < n; ++i)
        f.chi_alt.push_back(0.5 * (nabla_Sdy[i] - delta_S[i]));
    return f;
}

inline void require_positive_determinant(const MetricSpec& m, const PhasePoint& p) {
    double det = m.det_g.eval(p);
    if (!(det > 0.0))
        throw SingularMetricError("metric '" + m.name +
                                  "': nonpositive determinant in distortion");
}

/// Distortion tau = 1/2 ln(det g / sigma) with the mean Cartan torsion
/// I_k = d tau / dy^k, cross-checked against 1/2 g^{ij} dg_ij/dy^k.
struct DistortionValue {
    double tau = 0.0;
    std::vector<double> mean_cartan;
    double cartan_cross_residual = 0.0;
};

inline DistortionValue distortion(const MetricSpec& m, const VolumeSpec& vol,
                                  const PhasePoint& p) {
    require_positive_determinant(m, p);
    const int n = m.dim;
    Expr tau = 0.5 * (log(m.det_g) - log(vol.sigma));
    DistortionValue out;
    out.tau = tau.eval(p);
    for (int k = 1; k <= n; ++k) out.mean_cartan.push_back(tau.dy(k).eval(p));

    MetricValue gv = metric_tensor(m, p);
    for (int k = 1; k <= n; ++k) {
        double trace = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                trace += gv.g_inv(i, j) * m.g_at(i, j).dy(k).eval(p);
        double alt = 0.5 * trace;
        out.cartan_cross_residual =
            std::max(out.cartan_cross_residual,
                     normalized_residual(out.mean_cartan[k - 1] - alt, alt));
    }
    if (out.cartan_cross_residual > 1e-6)
        throw Error("mean Cartan torsion routes disagree beyond 1e-6");
    return out;
}

inline void require_geodesic_spray(const MetricSpec& m, const SpraySpec& s,
                                   const PhasePoint& p) {
    if (s.source == m.name) return;
    if (defining_equation_residual(m, s, p) > 1e-6)
        throw PreconditionError("spray is not the geodesic spray of metric '" +
                                m.name + "'");
}

inline double s_function(const MetricSpec& m, const VolumeSpec& vol,
                         const SpraySpec& s, const PhasePoint& p) {
    require_geodesic_spray(m, s, p);
    require_positive_determinant(m, p);
    Expr tau = 0.5 * (log(m.det_g) - log(vol.sigma));
    return spray_derivative(s, tau).eval(p);
}

/// chi components by the direct route, with the covariant route evaluated as
/// an internal cross-check.
struct ChiValue {
    std::vector<double> chi;
    double route_residual = 0.0;
};

inline ChiValue chi_value(const InvariantFields& f, const PhasePoint& p) {
    const int n = f.dim;
    ChiValue out;
    std::vector<Expr> all;
    all.reserve(2 * n);
    for (const Expr& e : f.chi) all.push_back(e);
    for (const Expr& e : f.chi_alt) all.push_back(e);
    std::vector<double> v = eval_all(all, p);
    out.chi.assign(v.begin(), v.begin() + n);
    for (int i = 0; i < n; ++i)
        out.route_residual = std::max(
            out.route_residual, normalized_residual(v[i] - v[n + i], v[i]));
    return out;
}

inline ChiValue chi_curvature(const MetricSpec& m, const VolumeSpec& vol,
                              const SpraySpec& s, const PhasePoint& p) {
    require_geodesic_spray(m, s, p);
    require_positive_determinant(m, p);
    ChiValue out = chi_value(build_invariant_fields(m, vol, s), p);
    if (out.route_residual > 1e-6)
        throw Error("chi-curvature routes disagree beyond 1e-6");
    return out;
}

struct InvariantSample {
    PhasePoint p;
    double tau = 0.0;
    double S = 0.0;
    std::vector<double> chi;
};

struct InvariantReport {
    std::string fixture;
    std::vector<InvariantSample> base_samples;
    std::vector<InvariantSample> deformed_samples;
    std::vector<CheckResult> checks;

    bool all_passed() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Transformation laws for two projectively related metrics with declared
/// factor P:  S~ = S + (n+1) P  and  chi~ = chi + (n+1)/2 delta_G P, plus
/// recovery of P from the connection trace.
inline InvariantReport verify_projective_laws(
    const MetricSpec& m, const SpraySpec& s, const MetricSpec& mt,
    const SpraySpec& st, const Expr& P, const VolumeSpec& vol,
    std::span<const PhasePoint> points, double tol_s = 1e-6, double tol_chi = 1e-6,
    double tol_trace = 1e-8) {
    const int n = m.dim;
    InvariantReport report;
    report.fixture = m.name + " vs " + mt.name;

    // precondition: the sprays differ by exactly P y^i
    double rel = 0.0;
    for (const PhasePoint& p : points) {
        std::vector<double> g0 = eval_all(s.coeffs, p);
        std::vector<double> g1 = eval_all(st.coeffs, p);
        double Pv = P.eval(p);
        for (int i = 0; i < n; ++i)
            rel = std::max(rel, normalized_residual(g1[i] - g0[i] - Pv * p.y[i],
                                                    std::abs(Pv) * p.y_norm()));
    }
    if (rel > 1e-8)
        throw PreconditionError("sprays are not projectively related by the "
                                "declared factor (residual " +
                                std::to_string(rel) + ")");
    report.checks.push_back(make_check("projective-relation", "plumbing", rel, 1e-8,
                                       static_cast<int>(points.size())));

    InvariantFields base = build_invariant_fields(m, vol, s);
    InvariantFields def = build_invariant_fields(mt, vol, st);
    std::vector<Expr> delta_GP = euler_lagrange_coefficients(P, s);

    double s_res = 0.0, chi_res = 0.0, trace_res = 0.0, route_res = 0.0;
    for (const PhasePoint& p : points) {
        InvariantSample sb{p, base.tau.eval(p), base.S.eval(p), {}};
        InvariantSample sd{p, def.tau.eval(p), def.S.eval(p), {}};
        ChiValue cb = chi_value(base, p);
        ChiValue cd = chi_value(def, p);
        sb.chi = cb.chi;
        sd.chi = cd.chi;
        route_res = std::max(route_res,
                             std::max(cb.route_residual, cd.route_residual));
        double Pv = P.eval(p);

        double scale_s =
            std::max({std::abs(sd.S), std::abs(sb.S), (n + 1.0) * std::abs(Pv)});
        s_res = std::max(s_res, normalized_residual(
                                    sd.S - sb.S - (n + 1.0) * Pv, scale_s));

        std::vector<double> dgp = eval_all(delta_GP, p);
        for (int i = 0; i < n; ++i) {
            double law = sb.chi[i] + 0.5 * (n + 1.0) * dgp[i];
            double scale = std::max({std::abs(sd.chi[i]), std::abs(sb.chi[i]),
                                     0.5 * (n + 1.0) * std::abs(dgp[i])});
            chi_res = std::max(chi_res, normalized_residual(sd.chi[i] - law, scale));
        }

        double trace = 0.0;
        for (int i = 0; i < n; ++i)
            trace += st.N(i, i).eval(p) - s.N(i, i).eval(p);
        trace_res = std::max(trace_res,
                             normalized_residual(trace / (n + 1.0) - Pv, Pv));

        report.base_samples.push_back(std::move(sb));
        report.deformed_samples.push_back(std::move(sd));
    }

    const int np = static_cast<int>(points.size());
    report.checks.push_back(
        make_check("s-function-transform", "projective-s-law", s_res, tol_s, np));
    report.checks.push_back(
        make_check("chi-transform", "projective-chi-law", chi_res, tol_chi, np));
    report.checks.push_back(make_check("factor-trace-recovery",
                                       "connection-trace", trace_res, tol_trace, np));
    report.checks.push_back(make_check("chi-route-agreement", "chi-definition",
                                       route_res, 1e-8, np));
    for (const CheckResult& c : report.checks)
        if (!(c.max_residual >= 0.0) || !std::isfinite(c.max_residual))
            throw Error("invariant report recorded a non-finite residual");
    return report;
}

}  // namespace finsler
