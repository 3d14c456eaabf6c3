// Spray-level geometry: nonlinear connection, horizontal derivative,
// curvature, dynamical covariant derivative, Euler-Lagrange form,
// homogeneity tests, projective deformation, Lie derivative, commutator.
#pragma once

#include "finsler/expr.hpp"
#include "finsler/linalg.hpp"
#include "finsler/sampling.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace finsler {

enum class SprayProvenance { DerivedFromMetric, UserSupplied, ProjectivelyDeformed };

/// Spray coefficients G^i plus the induced connection N^i_j = dG^i/dy^j.
/// Coefficients must be 2-homogeneous in y; make_spray checks this.
struct SpraySpec {
    int dim = 0;
    std::vector<Expr> coeffs;       // G^i
    std::vector<Expr> conn;         // N^i_j at [i*dim + j]
    SprayProvenance provenance = SprayProvenance::UserSupplied;
    std::optional<Expr> projective_factor;  // P, when projectively deformed
    std::string source;                     // name of the metric it derives from
    Domain domain;

    const Expr& G(int i) const { return coeffs[i]; }
    const Expr& N(int i, int j) const { return conn[static_cast<std::size_t>(i) * dim + j]; }
};

/// Pointwise 1-form with dx and dy components.
struct OneFormValue {
    std::vector<double> dx_part;
    std::vector<double> dy_part;
    PhasePoint base;
};

/// Curvature tensor R^i_jk at a point; antisymmetric in (j,k) by construction.
struct CurvatureValue {
    int dim = 0;
    std::vector<double> r;  // [i][j][k] row-major

    double R(int i, int j, int k) const {
        return r[(static_cast<std::size_t>(i) * dim + j) * dim + k];
    }
    double max_abs() const {
        double m = 0.0;
        for (double v : r) m = std::max(m, std::abs(v));
        return m;
    }
};

// ---- scalar-field helpers ----

/// C(f) = y^i df/dy^i (Liouville derivative).
inline Expr liouville_derivative(const Expr& f, int n) {
    Expr acc;
    for (int i = 1; i <= n; ++i)
        acc = acc + Expr::variable(y_var(i), n) * f.dy(i);
    return acc;
}

/// Largest normalized Liouville residual |C(f) - p f| / (1 + |f|) over points.
inline double homogeneity_residual(const Expr& f, double degree, int n,
                                   std::span<const PhasePoint> points) {
    Expr res = liouville_derivative(f, n) - Expr::constant(degree) * f;
    double worst = 0.0;
    for (const PhasePoint& p : points) {
        double fv = f.eval(p);
        worst = std::max(worst, std::abs(res.eval(p)) / (1.0 + std::abs(fv)));
    }
    return worst;
}

inline void require_homogeneous(const Expr& f, double degree, int n,
                                std::span<const PhasePoint> points,
                                const std::string& what, double tol = 1e-6) {
    double r = homogeneity_residual(f, degree, n, points);
    if (r > tol)
        throw HomogeneityError(what + ": Liouville residual " + std::to_string(r) +
                               " exceeds " + std::to_string(tol) + " for degree " +
                               std::to_string(degree));
}

/// G(f) = y^i df/dx^i - 2 G^i df/dy^i (the spray as a derivation).
inline Expr spray_derivative(const SpraySpec& s, const Expr& f) {
    const int n = s.dim;
    Expr acc;
    for (int i = 1; i <= n; ++i) {
        acc = acc + Expr::variable(y_var(i), n) * f.dx(i);
        acc = acc - 2.0 * s.G(i - 1) * f.dy(i);
    }
    return acc;
}

/// Horizontal derivatives (df/dx^i - N^j_i df/dy^j) for i = 1..n.
inline std::vector<Expr> delta_coefficients(const SpraySpec& s, const Expr& f) {
    const int n = s.dim;
    std::vector<Expr> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i) {
        Expr d = f.dx(i);
        for (int j = 1; j <= n; ++j) d = d - s.N(j - 1, i - 1) * f.dy(j);
        out.push_back(d);
    }
    return out;
}

inline std::vector<double> eval_all(std::span<const Expr> exprs, const PhasePoint& p) {
    return eval_block(exprs, p);
}

inline std::vector<double> eval_all(const std::vector<Expr>& exprs,
                                    const PhasePoint& p) {
    return eval_block(std::span<const Expr>(exprs.data(), exprs.size()), p);
}

inline SpraySpec make_spray(std::vector<Expr> coeffs, Domain domain,
                            SprayProvenance prov = SprayProvenance::UserSupplied,
                            bool validate = true, std::string source = {}) {
    SpraySpec s;
    s.dim = static_cast<int>(coeffs.size());
    if (s.dim < 2 || s.dim > kMaxDim)
        throw DomainError("spray: dimension must be in [2, " +
                          std::to_string(kMaxDim) + "]");
    s.coeffs = std::move(coeffs);
    s.domain = std::move(domain);
    s.provenance = prov;
    s.source = std::move(source);
    s.conn.reserve(static_cast<std::size_t>(s.dim) * s.dim);
    for (int i = 0; i < s.dim; ++i)
        for (int j = 1; j <= s.dim; ++j) s.conn.push_back(s.coeffs[i].dy(j));
    if (validate) {
        auto pts = sample_points(s.domain);
        for (int i = 0; i < s.dim; ++i)
            require_homogeneous(s.coeffs[i], 2.0, s.dim, pts,
                                "spray coefficient G" + std::to_string(i + 1), 1e-9);
    }
    return s;
}

/// The flat spray G^i = 0.
inline SpraySpec flat_spray(int n, Domain domain) {
    std::vector<Expr> zero(n, Expr::constant(0.0));
    return make_spray(std::move(zero), std::move(domain),
                      SprayProvenance::UserSupplied, false, "flat");
}

inline Mat nonlinear_connection(const SpraySpec& s, const PhasePoint& p) {
    Mat m(s.dim);
    std::vector<double> vals = eval_all(s.conn, p);
    for (int i = 0; i < s.dim; ++i)
        for (int j = 0; j < s.dim; ++j) m(i, j) = vals[static_cast<std::size_t>(i) * s.dim + j];
    return m;
}

inline std::vector<double> delta_derivative(const Expr& f, const SpraySpec& s,
                                            const PhasePoint& p) {
    return eval_all(delta_coefficients(s, f), p);
}

/// Component expressions R^i_jk = delta_j(N^i_k) - delta_k(N^i_j), j < k.
struct CurvatureField {
    int dim = 0;
    std::vector<Expr> upper;  // entries for i, then pairs (j,k) with j<k

    const Expr& entry(int i, int pair) const {
        const int npairs = dim * (dim - 1) / 2;
        return upper[static_cast<std::size_t>(i) * npairs + pair];
    }
};

inline CurvatureField curvature_field(const SpraySpec& s) {
    const int n = s.dim;
    CurvatureField f;
    f.dim = n;
    for (int i = 0; i < n; ++i) {
        // dN[j][k] = delta_j(N^i_k)
        std::vector<std::vector<Expr>> dN(n, std::vector<Expr>(n));
        for (int k = 0; k < n; ++k) {
            std::vector<Expr> cols = delta_coefficients(s, s.N(i, k));
            for (int j = 0; j < n; ++j) dN[j][k] = cols[j];
        }
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) f.upper.push_back(dN[j][k] - dN[k][j]);
    }
    return f;
}

inline CurvatureValue curvature_value(const CurvatureField& f, const PhasePoint& p) {
    const int n = f.dim;
    CurvatureValue v;
    v.dim = n;
    v.r.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    std::vector<double> vals = eval_all(f.upper, p);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                double r = vals[idx++];
                v.r[(static_cast<std::size_t>(i) * n + j) * n + k] = r;
                v.r[(static_cast<std::size_t>(i) * n + k) * n + j] =
                    r == 0.0 ? 0.0 : -r;
            }
    return v;
}

inline CurvatureValue curvature(const SpraySpec& s, const PhasePoint& p) {
    return curvature_value(curvature_field(s), p);
}

inline double nabla_scalar(const Expr& f, const SpraySpec& s, const PhasePoint& p) {
    return spray_derivative(s, f).eval(p);
}

/// (nabla omega)_i = G(omega_i) - N^j_i omega_j for semi-basic components.
inline std::vector<Expr> nabla_covector_coefficients(const std::vector<Expr>& omega,
                                                     const SpraySpec& s) {
    const int n = s.dim;
    std::vector<Expr> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Expr d = spray_derivative(s, omega[i]);
        for (int j = 0; j < n; ++j) d = d - s.N(j, i) * omega[j];
        out.push_back(d);
    }
    return out;
}

inline std::vector<double> nabla_covector(const std::vector<Expr>& omega,
                                          const SpraySpec& s, const PhasePoint& p) {
    return eval_all(nabla_covector_coefficients(omega, s), p);
}

/// Euler-Lagrange components (delta_G f)_i = G(df/dy^i) - df/dx^i.
inline std::vector<Expr> euler_lagrange_coefficients(const Expr& f,
                                                     const SpraySpec& s) {
    const int n = s.dim;
    std::vector<Expr> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i)
        out.push_back(spray_derivative(s, f.dy(i)) - f.dx(i));
    return out;
}

inline std::vector<double> euler_lagrange(const Expr& f, const SpraySpec& s,
                                          const PhasePoint& p) {
    return eval_all(euler_lagrange_coefficients(f, s), p);
}

/// Deformed spray G^i + P y^i. P must pass the degree-1 Liouville test.
inline SpraySpec projective_deform(const SpraySpec& s, const Expr& P) {
    auto pts = sample_points(s.domain);
    require_homogeneous(P, 1.0, s.dim, pts, "projective factor", 1e-9);
    std::vector<Expr> coeffs;
    coeffs.reserve(s.dim);
    for (int i = 1; i <= s.dim; ++i)
        coeffs.push_back(s.G(i - 1) + P * Expr::variable(y_var(i), s.dim));
    SpraySpec out = make_spray(std::move(coeffs), s.domain,
                               SprayProvenance::ProjectivelyDeformed, false, s.source);
    out.projective_factor = P;
    return out;
}

// ---- full phase-space vector fields (2n components: d/dx then d/dy) ----

inline std::vector<Expr> spray_vector_components(const SpraySpec& s) {
    const int n = s.dim;
    std::vector<Expr> out;
    out.reserve(2 * n);
    for (int i = 1; i <= n; ++i) out.push_back(Expr::variable(y_var(i), n));
    for (int i = 0; i < n; ++i) out.push_back(-2.0 * s.G(i));
    return out;
}

inline std::vector<Expr> liouville_vector_components(int n) {
    std::vector<Expr> out;
    out.reserve(2 * n);
    for (int i = 0; i < n; ++i) out.push_back(Expr::constant(0.0));
    for (int i = 1; i <= n; ++i) out.push_back(Expr::variable(y_var(i), n));
    return out;
}

inline Expr phase_partial(const Expr& f, int slot, int n) {
    return slot < n ? f.dx(slot + 1) : f.dy(slot - n + 1);
}

/// X(f) for a phase-space vector field X given by 2n component fields.
inline Expr vector_apply(const std::vector<Expr>& X, const Expr& f, int n) {
    Expr acc;
    for (int a = 0; a < 2 * n; ++a) acc = acc + X[a] * phase_partial(f, a, n);
    return acc;
}

/// Components of L_X alpha: (L_X alpha)_a = X(alpha_a) + alpha_b dX^b/dz^a.
inline std::vector<Expr> lie_derivative_one_form_coefficients(
    const std::vector<Expr>& X, const std::vector<Expr>& alpha, int n) {
    std::vector<Expr> out;
    out.reserve(2 * n);
    for (int a = 0; a < 2 * n; ++a) {
        Expr acc = vector_apply(X, alpha[a], n);
        for (int b = 0; b < 2 * n; ++b) acc = acc + alpha[b] * phase_partial(X[b], a, n);
        out.push_back(acc);
    }
    return out;
}

inline OneFormValue lie_derivative_one_form(const std::vector<Expr>& X,
                                            const std::vector<Expr>& alpha, int n,
                                            const PhasePoint& p) {
    std::vector<double> vals = eval_all(lie_derivative_one_form_coefficients(X, alpha, n), p);
    OneFormValue v;
    v.base = p;
    v.dx_part.assign(vals.begin(), vals.begin() + n);
    v.dy_part.assign(vals.begin() + n, vals.end());
    return v;
}

inline OneFormValue lie_derivative_one_form(const SpraySpec& s,
                                            const std::vector<Expr>& alpha,
                                            const PhasePoint& p) {
    return lie_derivative_one_form(spray_vector_components(s), alpha, s.dim, p);
}

/// [X, Y]^a = X(Y^a) - Y(X^a) over z = (x, y).
inline std::vector<Expr> commutator_coefficients(const std::vector<Expr>& X,
                                                 const std::vector<Expr>& Y, int n) {
    std::vector<Expr> out;
    out.reserve(2 * n);
    for (int a = 0; a < 2 * n; ++a)
        out.push_back(vector_apply(X, Y[a], n) - vector_apply(Y, X[a], n));
    return out;
}

inline std::vector<double> commutator(const std::vector<Expr>& X,
                                      const std::vector<Expr>& Y, int n,
                                      const PhasePoint& p) {
    return eval_all(commutator_coefficients(X, Y, n), p);
}

}  // namespace finsler
