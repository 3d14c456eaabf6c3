// Verification suites: each function implements one acceptance criterion
// with its tolerances pinned; run_suite groups them for the CLI.
#pragma once

#include "finsler/flows.hpp"
#include "finsler/oracle.hpp"
#include "finsler/presets.hpp"
#include "finsler/symmetry.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace finsler::suites {

struct Options {
    int dim = 2;
    std::uint64_t seed = 1;
    int samples = 100;
    double tol_scale = 1.0;
};

namespace detail {

inline void append(std::vector<CheckResult>& out, std::vector<CheckResult> more,
                   const std::string& prefix) {
    for (CheckResult& c : more) {
        c.name = prefix + "/" + c.name;
        out.push_back(std::move(c));
    }
}

/// Candidates a_i(x) y^i + c |y|: gradient drifts solve the flat
/// Euler-Lagrange equations, curled drifts do not.
inline Expr drift_candidate(int n, std::mt19937_64& rng, bool hamel) {
    std::uniform_real_distribution<double> coef(-0.5, 0.5);
    Expr phi;
    for (int t = 0; t < 3; ++t) {
        int a = 1 + int(rng() % n), b = 1 + int(rng() % n);
        phi = phi + Expr::constant(coef(rng)) * Expr::variable(x_var(a), n) *
                        Expr::variable(x_var(b), n);
        phi = phi + Expr::constant(coef(rng)) * Expr::variable(x_var(a), n);
    }
    Expr f;
    for (int i = 1; i <= n; ++i)
        f = f + phi.dx(i) * Expr::variable(y_var(i), n);
    if (!hamel) {
        // rotational part with nonzero curl
        double c = 0.2 + std::abs(coef(rng));
        f = f + Expr::constant(c) * Expr::variable(x_var(2), n) *
                    Expr::variable(y_var(1), n) -
            Expr::constant(c) * Expr::variable(x_var(1), n) *
                Expr::variable(y_var(2), n) * 2.0;
    }
    return f + (0.5 + std::abs(coef(rng))) * presets::y_norm(n);
}

}  // namespace detail

/// Criterion: euclidean preset has N = R = tau = S = chi = 0 within 1e-12.
inline std::vector<CheckResult> flat_sanity(const Options& o) {
    const double tol = 1e-12 * o.tol_scale;
    MetricSpec m = presets::euclidean(o.dim, o.seed, o.samples);
    SpraySpec s = geodesic_spray(m);
    InvariantFields inv = build_invariant_fields(m, VolumeSpec{}, s);
    CurvatureField R = curvature_field(s);
    auto pts = sample_points(m.domain, 100);

    double n_res = 0, r_res = 0, tau_res = 0, s_res = 0, chi_res = 0;
    for (const PhasePoint& p : pts) {
        n_res = std::max(n_res, nonlinear_connection(s, p).max_abs());
        r_res = std::max(r_res, curvature_value(R, p).max_abs());
        tau_res = std::max(tau_res, std::abs(inv.tau.eval(p)));
        s_res = std::max(s_res, std::abs(inv.S.eval(p)));
        for (double v : chi_value(inv, p).chi)
            chi_res = std::max(chi_res, std::abs(v));
    }
    return {make_check("connection-vanishes", "flat-spray", n_res, tol, 100),
            make_check("curvature-vanishes", "flat-spray", r_res, tol, 100),
            make_check("distortion-vanishes", "flat-spray", tau_res, tol, 100),
            make_check("s-function-vanishes", "flat-spray", s_res, tol, 100),
            make_check("chi-vanishes", "flat-spray", chi_res, tol, 100)};
}

/// Criterion: conformal sprays and curvatures match the Christoffel/Riemann
/// oracle at relative 1e-8. Runs both the linear factor (flat: the engine
/// must reproduce exact zeros) and a quadratic factor with genuinely
/// nonvanishing curvature.
inline std::vector<CheckResult> riemann_cross_check(const Options& o) {
    const double tol = 1e-8 * o.tol_scale;
    const int n = o.dim;
    std::vector<CheckResult> out;

    struct Case {
        const char* label;
        const char* phi;
        std::function<oracle::ConformalJet(const std::vector<double>&)> jet;
        bool curved;
    };
    std::vector<Case> cases = {
        {"linear-factor", "x1",
         [n](const std::vector<double>&) {
             oracle::ConformalJet jet;
             jet.grad.assign(n, 0.0);
             jet.grad[0] = 1.0;
             jet.hess = Mat(n);
             return jet;
         },
         false},
        {"quadratic-factor", "x1 + 0.25*x1^2",
         [n](const std::vector<double>& x) {
             oracle::ConformalJet jet;
             jet.grad.assign(n, 0.0);
             jet.grad[0] = 1.0 + 0.5 * x[0];
             jet.hess = Mat(n);
             jet.hess(0, 0) = 0.5;
             return jet;
         },
         true},
    };

    for (const Case& c : cases) {
        MetricSpec m = presets::conformal(n, c.phi, o.seed, o.samples);
        SpraySpec s = geodesic_spray(m);
        CurvatureField field = curvature_field(s);
        auto pts = sample_points(m.domain, 50);

        double spray_res = 0, curv_res = 0, oracle_magnitude = 0;
        for (const PhasePoint& p : pts) {
            oracle::ConformalJet jet = c.jet(p.x);
            std::vector<double> gamma = oracle::conformal_christoffel(jet, n);
            std::vector<double> expect = oracle::christoffel_spray(gamma, p);
            std::vector<double> got = eval_all(s.coeffs, p);
            for (int i = 0; i < n; ++i)
                spray_res = std::max(
                    spray_res, normalized_residual(got[i] - expect[i], expect[i]));
            CurvatureValue r = curvature_value(field, p);
            std::vector<double> rex = oracle::conformal_riemann_contraction(jet, p);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double e = rex[(static_cast<std::size_t>(i) * n + j) * n + k];
                        oracle_magnitude = std::max(oracle_magnitude, std::abs(e));
                        curv_res = std::max(
                            curv_res, normalized_residual(r.R(i, j, k) - e, e));
                    }
        }
        std::string prefix(c.label);
        out.push_back(make_check(prefix + "/spray-vs-christoffel", "riemann-oracle",
                                 spray_res, tol, 50));
        out.push_back(make_check(prefix + "/curvature-vs-riemann", "riemann-oracle",
                                 curv_res, tol, 50));
        if (c.curved)
            out.push_back(make_check(prefix + "/curvature-nonvacuous",
                                     "riemann-oracle",
                                     oracle_magnitude > 1e-3 ? 0.0 : 1.0, 0.0, 50,
                                     "oracle curvature must be nonzero"));
    }
    return out;
}

inline std::vector<std::pair<MetricSpec, SpraySpec>> all_preset_fixtures(
    const Options& o) {
    std::vector<std::pair<MetricSpec, SpraySpec>> out;
    MetricSpec euc = presets::euclidean(o.dim, o.seed, o.samples);
    out.emplace_back(euc, geodesic_spray(euc));
    MetricSpec rc = presets::randers_const(o.dim, {}, o.seed, o.samples);
    out.emplace_back(rc, geodesic_spray(rc));
    MetricSpec conf = presets::conformal(o.dim, "x1", o.seed, o.samples);
    out.emplace_back(conf, geodesic_spray(conf));
    MetricSpec fk = presets::funk(o.dim, o.seed, o.samples);
    out.emplace_back(fk, presets::funk_spray(fk));
    MetricSpec bw = presets::berwald(o.dim, o.seed, o.samples);
    out.emplace_back(bw, geodesic_spray(bw));
    MetricSpec pr = presets::perturbed_randers(o.dim, o.seed, o.samples);
    out.emplace_back(pr, geodesic_spray(pr));
    return out;
}

/// Criterion: i_G dd_J L + dL vanishes componentwise on every preset.
inline std::vector<CheckResult> defining_equation(const Options& o) {
    const double tol = 1e-9 * o.tol_scale;
    std::vector<CheckResult> out;
    for (auto& [m, s] : all_preset_fixtures(o)) {
        auto pts = sample_points(m.domain, 50);
        out.push_back(make_check(m.name, "spray-defining-equation",
                                 defining_equation_residual(m, s, pts), tol, 50));
    }
    return out;
}

/// Criterion: the Euler-Lagrange form of a 1-homogeneous function is
/// unchanged under projective deformation (factor Funk/2), 20 candidates.
inline std::vector<CheckResult> projective_invariance(const Options& o) {
    const double tol = 1e-9 * o.tol_scale;
    const int n = o.dim;
    SpraySpec flat = flat_spray(n, presets::default_domain(n, o.seed, o.samples));
    Expr P = 0.5 * presets::funk_F(n);
    auto pts = sample_points(flat.domain, 40);
    std::mt19937_64 rng(o.seed * 77 + 5);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        Expr f = detail::drift_candidate(n, rng, k % 2 == 0);
        worst = std::max(worst, projective_invariance_check(f, flat, P, pts));
    }
    return {make_check("euler-lagrange-projective-invariance",
                       "projective-invariance", worst, tol, 40, "20 candidates")};
}

/// Criterion: the Euler-Lagrange verdict equals the d_h d_J closure verdict
/// on the whole candidate family, including negative controls.
inline std::vector<CheckResult> hamel_equivalence(const Options& o) {
    const int n = o.dim;
    SpraySpec flat = flat_spray(n, presets::default_domain(n, o.seed, o.samples));
    auto pts = sample_points(flat.domain, 40);
    std::mt19937_64 rng(o.seed * 31 + 9);
    std::vector<Expr> family;
    for (int k = 0; k < 6; ++k)
        family.push_back(detail::drift_candidate(n, rng, k % 2 == 0));
    family.push_back(presets::funk_F(n));
    family.push_back(presets::flat_hamel_f(n));
    family.push_back(presets::non_hamel_f(n));

    int disagreements = 0;
    int negatives_caught = 0;
    for (const Expr& f : family) {
        Verdict a = is_hamel(f, flat, pts).verdict;
        Verdict b = dh_dJ_closure_test(f, flat, pts).verdict;
        if (a != b) ++disagreements;
        if (a == Verdict::Fail) ++negatives_caught;
    }
    std::vector<CheckResult> out;
    out.push_back(make_check("verdict-equivalence", "hamel-closure-lemma",
                             disagreements, 0.0, static_cast<int>(family.size())));
    out.push_back(make_check("negative-controls-fail", "hamel-closure-lemma",
                             negatives_caught >= 3 ? 0.0 : 1.0, 0.0,
                             static_cast<int>(family.size()),
                             "curled drifts and x1|y| must fail"));
    return out;
}

/// Criterion: the full strong-Hamel chain on the flat fixture.
inline std::vector<CheckResult> strong_hamel_chain(const Options& o) {
    const double tol = 1e-8 * o.tol_scale;
    MetricSpec euc = presets::euclidean(o.dim, o.seed, o.samples);
    auto pts = sample_points(euc.domain, 50);
    CandidatePair pair{presets::flat_hamel_f(o.dim),
                       presets::flat_hamel_witness(o.dim)};
    SymmetrySuiteReport rep = symmetry_suite(pair, euc, pts, tol);
    return rep.checks;
}

/// Criterion: the canonical vertical momentum vanishes identically and its
/// geodesic derivative vanishes along integrated geodesics.
inline std::vector<CheckResult> noether(const Options& o) {
    const double tol = 1e-10 * o.tol_scale;
    const int n = o.dim;
    SpraySpec flat = flat_spray(n, presets::default_domain(n, o.seed, o.samples));
    Expr fp = presets::flat_hamel_witness(n);
    Expr JXL = liouville_derivative(fp, n);
    Expr GJXL = spray_derivative(flat, JXL);

    double jxl_max = 0.0, drift_max = 0.0, gjxl_max = 0.0;
    auto starts = sample_points(flat.domain, 10);
    for (const PhasePoint& init : starts) {
        Trajectory traj =
            integrate(flat, init, 1e-3, 1.0, {{"JXL", JXL}, {"GJXL", GJXL}});
        for (double v : traj.monitors[0]) jxl_max = std::max(jxl_max, std::abs(v));
        for (double v : traj.monitors[1]) gjxl_max = std::max(gjxl_max, std::abs(v));
        drift_max = std::max(drift_max, drift_report(traj, "JXL").max_abs_drift);
    }
    return {make_check("vertical-momentum-identically-zero", "conserved-quantity",
                       jxl_max, tol, 10),
            make_check("vertical-momentum-drift", "conserved-quantity", drift_max,
                       tol, 10),
            make_check("geodesic-derivative-vanishes", "conserved-quantity",
                       gjxl_max, tol, 10)};
}

/// Criterion: S and chi transformation laws on the flat/funk pair for
/// n in {2, 3}, with factor recovery from the connection trace.
inline std::vector<CheckResult> projective_laws(const Options& o) {
    std::vector<CheckResult> out;
    for (int n : {2, 3}) {
        MetricSpec euc = presets::euclidean(n, o.seed, o.samples);
        SpraySpec es = geodesic_spray(euc);
        MetricSpec fk = presets::funk(n, o.seed, o.samples);
        SpraySpec fs = presets::funk_spray(fk);
        auto pts = sample_points(fk.domain, 50);
        InvariantReport rep = verify_projective_laws(
            euc, es, fk, fs, 0.5 * fk.F, VolumeSpec{}, pts, 1e-6 * o.tol_scale,
            1e-6 * o.tol_scale, 1e-8 * o.tol_scale);
        detail::append(out, rep.checks, "n" + std::to_string(n));
    }
    return out;
}

/// Criterion: the Funk preset passes the Funk hierarchy on the flat spray
/// and the decomposition biconditional holds on all candidates.
inline std::vector<CheckResult> funk_hierarchy(const Options& o) {
    const double tol = 1e-8 * o.tol_scale;
    const int n = o.dim;
    MetricSpec fk = presets::funk(n, o.seed, o.samples);
    SpraySpec flat = flat_spray(n, fk.domain);
    auto pts = sample_points(fk.domain, 100);

    Expr F = fk.F;
    VerdictResult vf = is_funk(F, flat, pts, tol);
    VerdictResult vw = is_weak_funk(F, flat, pts, tol);
    VerdictResult vh = is_hamel(F, flat, pts, tol);

    std::vector<CheckResult> out;
    out.push_back(
        make_check("funk-equation", "funk-pde", vf.residuals.max, tol, 100));
    out.push_back(make_check("weak-funk-equation", "weak-funk-pde",
                             vw.residuals.max, tol, 100));
    out.push_back(
        make_check("hamel-equation", "euler-lagrange", vh.residuals.max, tol, 100));

    std::mt19937_64 rng(o.seed * 13 + 3);
    std::vector<Expr> candidates = {F, presets::y_norm(n), presets::non_hamel_f(n),
                                    detail::drift_candidate(n, rng, true),
                                    detail::drift_candidate(n, rng, false)};
    int broken = 0;
    double comb = 0.0;
    for (const Expr& f : candidates) {
        FunkDecompositionReport rep = funk_decomposition_check(f, flat, pts, tol);
        if (!rep.biconditional_ok) ++broken;
        comb = std::max(comb, rep.combination_residual);
    }
    out.push_back(make_check("decomposition-biconditional", "funk-decomposition",
                             broken, 0.0, static_cast<int>(candidates.size())));
    out.push_back(make_check("decomposition-combination", "funk-decomposition",
                             comb, tol, static_cast<int>(candidates.size())));
    return out;
}

/// Criterion: chi = 0 fixtures pass the strong-Hamel test on (S, tau); the
/// perturbed fixture fails both coherently.
inline std::vector<CheckResult> chi_strong_hamel(const Options& o) {
    const int n = o.dim;
    VolumeSpec unit;
    std::vector<CheckResult> out;

    struct Fixture {
        MetricSpec m;
        SpraySpec s;
        VolumeSpec vol;
    };
    std::vector<Fixture> zero_chi;
    MetricSpec euc = presets::euclidean(n, o.seed, o.samples);
    zero_chi.push_back({euc, geodesic_spray(euc), unit});
    MetricSpec conf = presets::conformal(n, "x1", o.seed, o.samples);
    zero_chi.push_back(
        {conf, geodesic_spray(conf),
         make_volume(parse_expr("exp(" + std::to_string(2 * n) + "*x1)", n))});
    MetricSpec fk = presets::funk(n, o.seed, o.samples);
    zero_chi.push_back({fk, presets::funk_spray(fk), unit});

    int failures = 0;
    for (Fixture& fx : zero_chi) {
        InvariantFields inv = build_invariant_fields(fx.m, fx.vol, fx.s);
        auto pts = sample_points(fx.m.domain, 30);
        StrongHamelResult r =
            is_strong_hamel(CandidatePair{inv.S, inv.tau}, fx.s, pts, 1e-6);
        if (r.verdict != Verdict::Pass) ++failures;
    }
    out.push_back(make_check("chi-zero-fixtures-pass", "s-function-strong-hamel",
                             failures, 0.0, 3));

    MetricSpec pr = presets::perturbed_randers(n, o.seed, o.samples);
    SpraySpec ps = geodesic_spray(pr);
    InvariantFields pinv = build_invariant_fields(pr, unit, ps);
    auto pts = sample_points(pr.domain, 30);
    double chimax = 0.0;
    for (const PhasePoint& p : pts)
        for (double v : chi_value(pinv, p).chi) chimax = std::max(chimax, std::abs(v));
    StrongHamelResult neg =
        is_strong_hamel(CandidatePair{pinv.S, pinv.tau}, ps, pts, 1e-6);
    bool coherent = chimax > 1e-3 && neg.verdict == Verdict::Fail;
    out.push_back(make_check("negative-fixture-coherent",
                             "s-function-strong-hamel", coherent ? 0.0 : 1.0, 0.0,
                             30, "chi nonzero and strong-Hamel test fails"));
    return out;
}

/// Criterion: energy conservation, fourth-order convergence and projective
/// path agreement for the integrator.
inline std::vector<CheckResult> flows_suite(const Options& o) {
    std::vector<CheckResult> out;
    const int n = o.dim;

    std::vector<double> x0(n, 0.05), y0(n);
    for (int i = 0; i < n; ++i) {
        x0[i] = 0.05 - 0.02 * i;
        y0[i] = 0.45 - 0.1 * i;
    }
    PhasePoint init(x0, y0);
    double drift_worst = 0.0;
    for (auto& [m, s] : all_preset_fixtures(o)) {
        IntegrateOptions opts;
        opts.validity_radius = std::min(m.validity_radius, 5.0);
        Trajectory traj = integrate(s, init, 1e-3, 1.0, {{"L", m.L}}, opts);
        if (traj.stop != Trajectory::Stop::Completed)
            out.push_back(make_check("energy/" + m.name, "energy-conservation", 1.0,
                                     1e-6 * o.tol_scale, 1, traj.diagnostic));
        else
            drift_worst =
                std::max(drift_worst, drift_report(traj, "L").relative_drift);
    }
    out.push_back(make_check("energy-drift", "energy-conservation", drift_worst,
                             1e-6 * o.tol_scale, 1000));

    MetricSpec conf = presets::conformal(2, "x1", o.seed, o.samples);
    SpraySpec cs = geodesic_spray(conf);
    PhasePoint cinit({0.1, -0.1}, {0.9, 0.7});
    auto final_x = [&](double h) {
        return integrate(cs, cinit, h, 0.5, {}).x.back();
    };
    std::vector<double> ref = final_x(1e-4);
    auto err = [&](double h) {
        std::vector<double> xh = final_x(h);
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(xh[i] - ref[i]));
        return worst;
    };
    double ratio = err(0.02) / err(0.01);
    out.push_back(make_check("rk4-order", "integrator-order",
                             std::abs(std::log2(ratio) - 4.0), 1.0, 3,
                             "halving ratio " + std::to_string(ratio)));

    MetricSpec fk = presets::funk(2, o.seed, o.samples);
    SpraySpec fs = presets::funk_spray(fk);
    SpraySpec flat = flat_spray(2, fk.domain);
    PhasePoint pinit({0.05, 0.02}, {0.6, 0.45});
    IntegrateOptions popts;
    popts.validity_radius = fk.validity_radius;
    Trajectory a = integrate(flat, pinit, 1e-3, 1.0, {}, popts);
    Trajectory b = integrate(fs, pinit, 1e-3, 1.0, {}, popts);
    out.push_back(make_check("projective-path-agreement", "projective-paths",
                             unparameterized_path_distance(a, b),
                             1e-4 * o.tol_scale, 1000));
    return out;
}

/// Criterion: symbolic derivatives match central finite differences on 1000
/// random expressions; mixed partials commute.
inline std::vector<CheckResult> expr_oracle(const Options& o) {
    oracle::ExprGen gen(o.seed * 1000003 + 20240811, 2);
    std::mt19937_64 rng(o.seed * 7 + 1);
    auto coord = [&](double lo, double hi) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0, 1)(rng);
    };

    double fd_worst = 0.0;
    int accepted = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Expr e = gen.next(6);
        PhasePoint p({coord(-0.8, 0.8), coord(-0.8, 0.8)},
                     {coord(0.6, 1.4) * (rng() % 2 ? 1 : -1),
                      coord(0.6, 1.4) * (rng() % 2 ? 1 : -1)});
        Var v = rng() % 2 ? x_var(1 + int(rng() % 2)) : y_var(1 + int(rng() % 2));
        try {
            double sym = e.diff(v).eval(p);
            double fd = oracle::fd_derivative(e, p, v);
            double fd2 = oracle::fd_derivative(e, p, v, 5e-6);
            if (std::abs(fd - fd2) > 1e-7 * (1.0 + std::abs(fd))) continue;
            fd_worst = std::max(fd_worst,
                                std::abs(sym - fd) /
                                    (1.0 + std::max(std::abs(sym), std::abs(fd))));
            ++accepted;
        } catch (const DomainError&) {
            continue;
        }
    }

    double mixed_worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        Expr e = gen.next(5);
        Var a = rng() % 2 ? x_var(1 + int(rng() % 2)) : y_var(1 + int(rng() % 2));
        Var b = rng() % 2 ? x_var(1 + int(rng() % 2)) : y_var(1 + int(rng() % 2));
        PhasePoint p({coord(-0.8, 0.8), coord(-0.8, 0.8)},
                     {coord(0.6, 1.4), coord(0.6, 1.4)});
        try {
            double ab = e.diff(a).diff(b).eval(p);
            double ba = e.diff(b).diff(a).eval(p);
            mixed_worst =
                std::max(mixed_worst, std::abs(ab - ba) /
                                          (1.0 + std::max(std::abs(ab), std::abs(ba))));
        } catch (const DomainError&) {
            continue;
        }
    }
    return {make_check("derivative-vs-finite-difference", "derivative-oracle",
                       fd_worst, 1e-5 * o.tol_scale, accepted),
            make_check("sufficient-sample", "derivative-oracle",
                       accepted >= 600 ? 0.0 : 1.0, 0.0, accepted),
            make_check("mixed-partials-commute", "derivative-oracle", mixed_worst,
                       1e-10 * o.tol_scale, 200)};
}

struct Criterion {
    int number;
    const char* name;
    std::function<std::vector<CheckResult>(const Options&)> run;
};

inline const std::vector<Criterion>& all_criteria() {
    static const std::vector<Criterion> list = {
        {1, "flat-sanity", flat_sanity},
        {2, "riemann-cross-check", riemann_cross_check},
        {3, "spray-defining-equation", defining_equation},
        {4, "projective-invariance", projective_invariance},
        {5, "hamel-closure-equivalence", hamel_equivalence},
        {6, "strong-hamel-chain", strong_hamel_chain},
        {7, "conserved-quantities", noether},
        {8, "projective-s-chi-laws", projective_laws},
        {9, "funk-hierarchy", funk_hierarchy},
        {10, "chi-strong-hamel-consistency", chi_strong_hamel},
        {11, "geodesic-flows", flows_suite},
        {12, "derivative-oracle", expr_oracle},
    };
    return list;
}

inline std::vector<CheckResult> run_suite(const std::string& name,
                                          const Options& o) {
    std::vector<int> wanted;
    if (name == "projective")
        wanted = {4};
    else if (name == "shf")
        wanted = {5, 6, 7};
    else if (name == "schi")
        wanted = {8, 10};
    else if (name == "funk")
        wanted = {9};
    else if (name == "all")
        wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    else
        throw PreconditionError("unknown suite '" + name +
                                "' (expected projective, shf, schi, funk, all)");
    std::vector<CheckResult> out;
    for (const Criterion& c : all_criteria())
        if (std::find(wanted.begin(), wanted.end(), c.number) != wanted.end())
            detail::append(out, c.run(o), c.name);
    return out;
}

}  // namespace finsler::suites
