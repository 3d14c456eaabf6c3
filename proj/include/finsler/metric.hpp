// Finsler metric specifications: metric tensor from the energy Hessian,
// symbolic inverse, geodesic spray, defining-equation residual, symplectic
// pairing.
#pragma once

#include "finsler/spray.hpp"

#include <limits>
#include <string>
#include <vector>

namespace finsler {

/// Finsler metric fixture. F is 1-homogeneous and positive on the slit
/// domain; L = F^2/2 is the energy. The metric tensor entries, determinant
/// and symbolic inverse are built eagerly so sprays and invariants can be
/// assembled as expressions.
struct MetricSpec {
    int dim = 0;
    std::string name;
    Expr F;
    Expr L;
    Domain domain;
    double validity_radius = std::numeric_limits<double>::infinity();

    std::vector<Expr> g;      // g_ij = d^2 L / dy^i dy^j, row-major
    Expr det_g;
    std::vector<Expr> g_inv;  // adjugate over determinant

    const Expr& g_at(int i, int j) const {
        return g[static_cast<std::size_t>(i) * dim + j];
    }
    const Expr& g_inv_at(int i, int j) const {
        return g_inv[static_cast<std::size_t>(i) * dim + j];
    }
};

namespace detail {

inline Expr sym_det(const std::vector<Expr>& m, const std::vector<int>& rows,
                    const std::vector<int>& cols, int n) {
    if (rows.size() == 1) return m[static_cast<std::size_t>(rows[0]) * n + cols[0]];
    Expr acc;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        std::vector<int> sub_rows(rows.begin() + 1, rows.end());
        std::vector<int> sub_cols;
        for (std::size_t cc = 0; cc < cols.size(); ++cc)
            if (cc != c) sub_cols.push_back(cols[cc]);
        Expr term = m[static_cast<std::size_t>(rows[0]) * n + cols[c]] *
                    sym_det(m, sub_rows, sub_cols, n);
        acc = (c % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

inline Expr sym_det(const std::vector<Expr>& m, int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    return sym_det(m, idx, idx, n);
}

inline Expr sym_minor(const std::vector<Expr>& m, int n, int drop_row, int drop_col) {
    std::vector<int> rows, cols;
    for (int i = 0; i < n; ++i) {
        if (i != drop_row) rows.push_back(i);
        if (i != drop_col) cols.push_back(i);
    }
    return sym_det(m, rows, cols, n);
}

}  // namespace detail

inline MetricSpec make_metric_from_L(std::string name, Expr L, Domain domain,
                                     bool validate = true) {
    MetricSpec m;
    m.dim = domain.dim();
    if (m.dim < 2 || m.dim > kMaxDim)
        throw DomainError("metric: dimension must be in [2, " +
                          std::to_string(kMaxDim) + "]");
    m.name = std::move(name);
    m.L = L;
    m.F = sqrt(2.0 * L);
    m.domain = std::move(domain);

    const int n = m.dim;
    m.g.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) m.g.push_back(m.L.dy(i).dy(j));
    m.det_g = detail::sym_det(m.g, n);
    if (n == 1) {
        m.g_inv = {Expr::constant(1.0) / m.g[0]};
    } else {
        m.g_inv.reserve(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Expr cof = detail::sym_minor(m.g, n, j, i);
                if ((i + j) % 2 != 0) cof = -cof;
                m.g_inv.push_back(cof / m.det_g);
            }
    }

    if (validate) {
        auto pts = sample_points(m.domain);
        require_homogeneous(m.L, 2.0, n, pts, "energy of metric '" + m.name + "'");
        for (const PhasePoint& p : pts) {
            double Lv = m.L.eval(p);
            if (!(Lv > 0.0))
                throw DomainError("metric '" + m.name +
                                  "': energy not positive at a sample point");
            double det = m.det_g.eval(p);
            double scale = 0.0;
            for (const Expr& e : m.g) scale = std::max(scale, std::abs(e.eval(p)));
            if (std::abs(det) < 1e-12 * std::pow(std::max(1.0, scale), n))
                throw SingularMetricError("metric '" + m.name +
                                          "': determinant vanishes at a sample point");
        }
    }
    return m;
}

inline MetricSpec make_metric_from_F(std::string name, Expr F, Domain domain,
                                     bool validate = true) {
    if (validate) {
        auto pts = sample_points(domain);
        require_homogeneous(F, 1.0, domain.dim(), pts,
                            "metric function '" + name + "'");
        for (const PhasePoint& p : pts)
            if (!(F.eval(p) > 0.0))
                throw DomainError("metric '" + name +
                                  "': F not positive at a sample point");
    }
    MetricSpec m = make_metric_from_L(std::move(name), 0.5 * pow(F, 2.0),
                                      std::move(domain), validate);
    m.F = F;  // keep the user's form instead of sqrt(2L)
    return m;
}

/// Metric tensor, inverse, determinant and condition estimate at a point.
struct MetricValue {
    Mat g;
    Mat g_inv;
    double det = 0.0;
    double cond = 0.0;
    double inverse_residual = 0.0;  // max-norm of g*g_inv - I
};

inline MetricValue metric_tensor(const MetricSpec& m, const PhasePoint& p) {
    const int n = m.dim;
    MetricValue v;
    v.g = Mat(n);
    std::vector<double> vals = eval_all(m.g, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v.g(i, j) = vals[static_cast<std::size_t>(i) * n + j];

    LuResult lu = lu_factor(v.g);
    v.det = lu.det;
    double scale = std::max(1.0, v.g.max_abs());
    if (lu.singular || std::abs(lu.det) < 1e-12 * std::pow(scale, n))
        throw SingularMetricError("metric '" + m.name +
                                  "': singular metric tensor (det = " +
                                  std::to_string(lu.det) + ")");
    v.g_inv = lu_inverse(lu);

    Mat prod = mat_mul(v.g, v.g_inv);
    for (int i = 0; i < n; ++i) prod(i, i) -= 1.0;
    v.inverse_residual = prod.max_abs();
    if (v.inverse_residual > 1e-13) {
        // one Newton refinement step: X <- X (2I - g X)
        Mat gx = mat_mul(v.g, v.g_inv);
        Mat two_minus(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                two_minus(i, j) = (i == j ? 2.0 : 0.0) - gx(i, j);
        v.g_inv = mat_mul(v.g_inv, two_minus);
        prod = mat_mul(v.g, v.g_inv);
        for (int i = 0; i < n; ++i) prod(i, i) -= 1.0;
        v.inverse_residual = prod.max_abs();
    }
    if (v.inverse_residual > 1e-10)
        throw SingularMetricError("metric '" + m.name +
                                  "': inverse residual above 1e-10");
    v.cond = v.g.inf_norm() * v.g_inv.inf_norm();
    return v;
}

/// Geodesic spray coefficients in solved form,
///   G^i = 1/2 g^{il} (y^k d^2L/dx^k dy^l - dL/dx^l);
/// the defining-equation residual below is the acceptance contract.
inline SpraySpec geodesic_spray(const MetricSpec& m, bool validate = true) {
    const int n = m.dim;
    std::vector<Expr> rhs;  // y^k d^2L/dx^k dy^l - dL/dx^l
    rhs.reserve(n);
    for (int l = 1; l <= n; ++l) {
        Expr acc;
        for (int k = 1; k <= n; ++k)
            acc = acc + Expr::variable(y_var(k), n) * m.L.dy(l).dx(k);
        rhs.push_back(acc - m.L.dx(l));
    }
    std::vector<Expr> coeffs;
    coeffs.reserve(n);
    for (int i = 0; i < n; ++i) {
        Expr acc;
        for (int l = 0; l < n; ++l) acc = acc + m.g_inv_at(i, l) * rhs[l];
        coeffs.push_back(0.5 * acc);
    }
    return make_spray(std::move(coeffs), m.domain, SprayProvenance::DerivedFromMetric,
                      validate, m.name);
}

/// Componentwise residual of i_G dd_J L + dL at one point, normalized by the
/// largest term entering each component. Zero exactly when G is the geodesic
/// spray of L.
inline double defining_equation_residual(const MetricSpec& m, const SpraySpec& s,
                                         const PhasePoint& p) {
    const int n = m.dim;
    std::vector<Expr> items;
    //   dx_i : y^j d2L/dx^j dy^i - y^j d2L/dx^i dy^j - 2 g_ij G^j + dL/dx^i
    //   dy_i : dL/dy^i - g_ij y^j
    for (int i = 1; i <= n; ++i) {
        Expr t1, t2, t3;
        for (int j = 1; j <= n; ++j) {
            t1 = t1 + Expr::variable(y_var(j), n) * m.L.dy(i).dx(j);
            t2 = t2 + Expr::variable(y_var(j), n) * m.L.dy(j).dx(i);
            t3 = t3 + m.g_at(i - 1, j - 1) * s.G(j - 1);
        }
        items.push_back(t1);
        items.push_back(t2);
        items.push_back(2.0 * t3);
        items.push_back(m.L.dx(i));
        Expr t4;
        for (int j = 1; j <= n; ++j)
            t4 = t4 + m.g_at(i - 1, j - 1) * Expr::variable(y_var(j), n);
        items.push_back(m.L.dy(i));
        items.push_back(t4);
    }
    std::vector<double> v = eval_all(items, p);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* row = v.data() + static_cast<std::size_t>(i) * 6;
        double rx = row[0] - row[1] - row[2] + row[3];
        double sx = std::max(std::max(std::abs(row[0]), std::abs(row[1])),
                             std::max(std::abs(row[2]), std::abs(row[3])));
        worst = std::max(worst, normalized_residual(rx, sx));
        double ry = row[4] - row[5];
        double sy = std::max(std::abs(row[4]), std::abs(row[5]));
        worst = std::max(worst, normalized_residual(ry, sy));
    }
    return worst;
}

inline double defining_equation_residual(const MetricSpec& m, const SpraySpec& s,
                                         std::span<const PhasePoint> points) {
    double worst = 0.0;
    for (const PhasePoint& p : points)
        worst = std::max(worst, defining_equation_residual(m, s, p));
    return worst;
}

/// omega_L(X, Y) with omega_L = g_ij delta-y^i wedge dx^j for phase-space
/// vectors X, Y given in the natural frame (2n components each).
inline double symplectic_value(const MetricSpec& m, const SpraySpec& s,
                               const std::vector<double>& X,
                               const std::vector<double>& Y, const PhasePoint& p) {
    const int n = m.dim;
    MetricValue gv = metric_tensor(m, p);
    Mat N = nonlinear_connection(s, p);
    std::vector<double> dyX(n), dyY(n);
    for (int i = 0; i < n; ++i) {
        dyX[i] = X[n + i];
        dyY[i] = Y[n + i];
        for (int j = 0; j < n; ++j) {
            dyX[i] += N(i, j) * X[j];
            dyY[i] += N(i, j) * Y[j];
        }
    }
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            acc += gv.g(i, j) * (dyX[i] * Y[j] - dyY[i] * X[j]);
    return acc;
}

/// nabla g residual: G(g_ij) - g_im N^m_j - g_mj N^m_i, largest normalized
/// entry over the given points. Vanishes for geodesic sprays.
inline double metric_compatibility_residual(const MetricSpec& m, const SpraySpec& s,
                                            std::span<const PhasePoint> points) {
    const int n = m.dim;
    std::vector<Expr> residuals, scales;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expr r = spray_derivative(s, m.g_at(i, j));
            scales.push_back(r);
            for (int k = 0; k < n; ++k)
                r = r - m.g_at(i, k) * s.N(k, j) - m.g_at(k, j) * s.N(k, i);
            residuals.push_back(r);
        }
    double worst = 0.0;
    for (const PhasePoint& p : points) {
        std::vector<double> rv = eval_all(residuals, p);
        std::vector<double> sv = eval_all(scales, p);
        for (std::size_t k = 0; k < rv.size(); ++k)
            worst = std::max(worst, normalized_residual(rv[k], sv[k]));
    }
    return worst;
}

}  // namespace finsler
