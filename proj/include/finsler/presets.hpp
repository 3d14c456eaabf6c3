// Built-in metric fixtures. All acceptance suites run on these presets, so
// they carry their own sample domains and validity bounds.
#pragma once

#include "finsler/metric.hpp"

#include <string>
#include <vector>

namespace finsler::presets {

inline Domain default_domain(int n, std::uint64_t seed = 1, int samples = 100) {
    return Domain::box(n, -0.3, 0.3, seed, samples);
}

inline Expr y_norm_sq(int n) {
    Expr acc;
    for (int i = 1; i <= n; ++i) acc = acc + pow(Expr::variable(y_var(i), n), 2.0);
    return acc;
}

inline Expr x_norm_sq(int n) {
    Expr acc;
    for (int i = 1; i <= n; ++i) acc = acc + pow(Expr::variable(x_var(i), n), 2.0);
    return acc;
}

inline Expr xy_inner(int n) {
    Expr acc;
    for (int i = 1; i <= n; ++i)
        acc = acc + Expr::variable(x_var(i), n) * Expr::variable(y_var(i), n);
    return acc;
}

inline Expr y_norm(int n) { return sqrt(y_norm_sq(n)); }

inline MetricSpec euclidean(int n, std::uint64_t seed = 1, int samples = 100) {
    // built from the polynomial energy so g, det g and the invariants fold
    // to literal constants
    MetricSpec m = make_metric_from_L("euclidean-" + std::to_string(n),
                                      0.5 * y_norm_sq(n),
                                      default_domain(n, seed, samples));
    m.F = y_norm(n);
    return m;
}

/// Flat-spray fixture pair: f = |y| solves the Euler-Lagrange equations with
/// witness f' = <x,y>/|y| (so f = G(f') for the flat spray).
inline Expr flat_hamel_f(int n) { return y_norm(n); }
inline Expr flat_hamel_witness(int n) { return xy_inner(n) / y_norm(n); }

/// Canonical non-solution: f = x1 |y|.
inline Expr non_hamel_f(int n) {
    return Expr::variable(x_var(1), n) * y_norm(n);
}

inline MetricSpec randers_const(int n, std::vector<double> b = {},
                                std::uint64_t seed = 1, int samples = 100) {
    if (b.empty()) {
        b.assign(n, 0.0);
        b[0] = 0.3;
    }
    Expr drift;
    for (int i = 1; i <= n; ++i)
        drift = drift + Expr::constant(b[i - 1]) * Expr::variable(y_var(i), n);
    return make_metric_from_F("randers-const-" + std::to_string(n),
                              y_norm(n) + drift, default_domain(n, seed, samples));
}

/// F^2 = e^{2 phi(x)} |y|^2, Riemannian; phi defaults to x1. The factor is
/// part of the name so differently parameterized fixtures never alias.
inline MetricSpec conformal(int n, const std::string& phi_text = "x1",
                            std::uint64_t seed = 1, int samples = 100) {
    Expr phi = parse_expr(phi_text, n);
    if (phi.uses_fibre())
        throw DomainError("conformal factor must depend on x only");
    Expr L = 0.5 * exp(2.0 * phi) * y_norm_sq(n);
    return make_metric_from_L("conformal-" + std::to_string(n) + "(" + phi_text + ")",
                              L, default_domain(n, seed, samples));
}

/// Funk metric of the unit ball:
/// F = (sqrt((1-|x|^2)|y|^2 + <x,y>^2) + <x,y>) / (1 - |x|^2).
inline Expr funk_F(int n) {
    Expr one_minus = 1.0 - x_norm_sq(n);
    Expr inner = xy_inner(n);
    return (sqrt(one_minus * y_norm_sq(n) + pow(inner, 2.0)) + inner) / one_minus;
}

inline MetricSpec funk(int n, std::uint64_t seed = 1, int samples = 100) {
    MetricSpec m = make_metric_from_F("funk-" + std::to_string(n), funk_F(n),
                                      default_domain(n, seed, samples));
    m.validity_radius = 0.98;
    return m;
}

/// Geodesic spray of the Funk preset in closed form: the flat spray deformed
/// by P = F/2. The defining-equation residual suite re-verifies this.
inline SpraySpec funk_spray(const MetricSpec& funk_metric) {
    SpraySpec s = projective_deform(flat_spray(funk_metric.dim, funk_metric.domain),
                                    0.5 * funk_metric.F);
    s.source = funk_metric.name;
    return s;
}

/// Berwald's projectively flat metric of the unit ball,
/// F = (A + <x,y>)^2 / ((1-|x|^2)^2 A) with A = sqrt((1-|x|^2)|y|^2+<x,y>^2).
/// Its projective factor relative to the flat spray is the full Funk
/// function, which is a weak Funk function; this is the fixture for the
/// strong-Hamel-from-weak-Funk construction with a nonconstant witness.
inline MetricSpec berwald(int n, std::uint64_t seed = 1, int samples = 100) {
    Expr m = 1.0 - x_norm_sq(n);
    Expr A = sqrt(m * y_norm_sq(n) + pow(xy_inner(n), 2.0));
    Expr F = pow(A + xy_inner(n), 2.0) / (pow(m, 2.0) * A);
    MetricSpec spec = make_metric_from_F("berwald-" + std::to_string(n), F,
                                         default_domain(n, seed, samples));
    spec.validity_radius = 0.98;
    return spec;
}

/// Randers metric with an x-dependent drift of nonzero curl; its
/// chi-curvature does not vanish, which the negative suites verify first.
inline MetricSpec perturbed_randers(int n, std::uint64_t seed = 1,
                                    int samples = 100) {
    Expr drift;
    for (int i = 1; i <= n; ++i) {
        int j = i % n + 1;       // cyclic neighbour
        int k = (i + 1) % n + 1;
        Expr bi = Expr::constant(i == 1 ? 0.15 : (i == 2 ? -0.1 : 0.1)) +
                  0.1 * Expr::variable(x_var(j), n) +
                  0.05 * pow(Expr::variable(x_var(k), n), 2.0);
        drift = drift + bi * Expr::variable(y_var(i), n);
    }
    return make_metric_from_F("perturbed-randers-" + std::to_string(n),
                              y_norm(n) + drift, default_domain(n, seed, samples));
}

inline MetricSpec by_name(const std::string& name, int n, std::uint64_t seed = 1,
                          int samples = 100) {
    if (name == "euclidean") return euclidean(n, seed, samples);
    if (name == "randers-constant") return randers_const(n, {}, seed, samples);
    if (name == "conformal") return conformal(n, "x1", seed, samples);
    if (name == "funk") return funk(n, seed, samples);
    if (name == "berwald") return berwald(n, seed, samples);
    if (name == "perturbed-randers") return perturbed_randers(n, seed, samples);
    throw PreconditionError(
        "unknown preset '" + name +
        "' (expected euclidean, randers-constant, conformal, funk, berwald, "
        "perturbed-randers)");
}

}  // namespace finsler::presets
