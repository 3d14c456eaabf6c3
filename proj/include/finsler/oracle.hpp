// Independent numeric oracles used by the verification suites and tests:
// central finite differences on expression values, a seeded random
// expression generator, and a Christoffel/Riemann pipeline built from raw
// metric coefficients. None of these reuse the symbolic derivative path.
#pragma once

#include "finsler/expr.hpp"
#include "finsler/linalg.hpp"

#include <functional>
#include <random>
#include <vector>

namespace finsler::oracle {

inline PhasePoint shifted(const PhasePoint& p, Var v, double h) {
    PhasePoint q = p;
    if (v.kind == VarKind::Base)
        q.x[v.index - 1] += h;
    else
        q.y[v.index - 1] += h;
    return q;
}

/// Central difference d f / d v at p.
inline double fd_derivative(const Expr& f, const PhasePoint& p, Var v,
                            double h = 1e-5) {
    return (f.eval(shifted(p, v, h)) - f.eval(shifted(p, v, -h))) / (2.0 * h);
}

/// Central second difference d^2 f / (d a d b) at p.
inline double fd_partial2(const Expr& f, const PhasePoint& p, Var a, Var b,
                          double h = 1e-4) {
    if (a.kind == b.kind && a.index == b.index) {
        double c = f.eval(p);
        return (f.eval(shifted(p, a, h)) - 2.0 * c + f.eval(shifted(p, a, -h))) /
               (h * h);
    }
    PhasePoint pp = shifted(shifted(p, a, h), b, h);
    PhasePoint pm = shifted(shifted(p, a, h), b, -h);
    PhasePoint mp = shifted(shifted(p, a, -h), b, h);
    PhasePoint mm = shifted(shifted(p, a, -h), b, -h);
    return (f.eval(pp) - f.eval(pm) - f.eval(mp) + f.eval(mm)) / (4.0 * h * h);
}

/// Random expression trees that stay smooth near the sampled points:
/// log/sqrt arguments are kept strictly positive by construction.
class ExprGen {
public:
    ExprGen(std::uint64_t seed, int dim) : rng_(seed), dim_(dim) {}

    Expr next(int max_depth = 6) { return gen(max_depth); }

private:
    Expr gen(int depth) {
        int pick = depth <= 0 ? int(rng_() % 3) : int(rng_() % 12);
        switch (pick) {
            case 0: return Expr::constant(uniform(-2.0, 2.0));
            case 1: return Expr::variable(x_var(1 + int(rng_() % dim_)), dim_);
            case 2: return Expr::variable(y_var(1 + int(rng_() % dim_)), dim_);
            case 3: return gen(depth - 1) + gen(depth - 1);
            case 4: return gen(depth - 1) - gen(depth - 1);
            case 5: return gen(depth - 1) * gen(depth - 1);
            case 6:
                // keep denominators away from zero
                return gen(depth - 1) / (positive(depth - 1) + 0.5);
            case 7: return -gen(depth - 1);
            case 8: return pow(gen(depth - 1), double(1 + int(rng_() % 3)));
            case 9: return sqrt(positive(depth - 1) + 0.1);
            case 10: return log(positive(depth - 1) + 0.5);
            case 11: return rng_() % 2 ? sin(gen(depth - 1)) : cos(gen(depth - 1));
            default: return Expr::constant(1.0);
        }
    }

    Expr positive(int depth) { return pow(gen(depth), 2.0); }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0, 1)(rng_);
    }

    std::mt19937_64 rng_;
    int dim_;
};

/// Metric-coefficient callback: fills an n-by-n matrix a(x).
using MetricCoefficients = std::function<Mat(const std::vector<double>&)>;

/// Christoffel symbols of a Riemannian metric from finite differences of its
/// coefficients: Gamma^i_jk = 1/2 a^{il} (d_j a_lk + d_k a_lj - d_l a_jk).
inline std::vector<double> christoffel(const MetricCoefficients& a,
                                       const std::vector<double>& x,
                                       double h = 1e-6) {
    const int n = static_cast<int>(x.size());
    Mat a0 = a(x);
    LuResult lu = lu_factor(a0);
    Mat ainv = lu_inverse(lu);
    // da[l][j][k] = d a_jk / d x^l
    std::vector<double> da(static_cast<std::size_t>(n) * n * n);
    for (int l = 0; l < n; ++l) {
        std::vector<double> xp = x, xm = x;
        xp[l] += h;
        xm[l] -= h;
        Mat ap = a(xp), am = a(xm);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                da[(static_cast<std::size_t>(l) * n + j) * n + k] =
                    (ap(j, k) - am(j, k)) / (2.0 * h);
    }
    auto d = [&](int l, int j, int k) {
        return da[(static_cast<std::size_t>(l) * n + j) * n + k];
    };
    std::vector<double> gamma(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int l = 0; l < n; ++l)
                    acc += ainv(i, l) * (d(j, l, k) + d(k, l, j) - d(l, j, k));
                gamma[(static_cast<std::size_t>(i) * n + j) * n + k] = 0.5 * acc;
            }
    return gamma;
}

/// Spray coefficients of the Riemannian geodesic equation,
/// G^i = 1/2 Gamma^i_jk y^j y^k.
inline std::vector<double> riemannian_spray(const MetricCoefficients& a,
                                            const PhasePoint& p) {
    const int n = p.dim();
    std::vector<double> gamma = christoffel(a, p.x);
    std::vector<double> G(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                G[i] += 0.5 * gamma[(static_cast<std::size_t>(i) * n + j) * n + k] *
                        p.y[j] * p.y[k];
    return G;
}

/// First and second derivatives of a conformal factor phi at a base point;
/// the caller supplies them in closed form so the oracle stays exact.
struct ConformalJet {
    std::vector<double> grad;  // d phi / dx^i
    Mat hess;                  // d^2 phi / dx^i dx^j
};

/// Christoffel symbols of e^{2 phi(x)} delta_ij:
/// Gamma^i_jk = delta^i_j phi_k + delta^i_k phi_j - delta_jk phi_i.
inline std::vector<double> conformal_christoffel(const ConformalJet& jet, int n) {
    std::vector<double> gamma(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = 0.0;
                if (i == j) v += jet.grad[k];
                if (i == k) v += jet.grad[j];
                if (j == k) v -= jet.grad[i];
                gamma[(static_cast<std::size_t>(i) * n + j) * n + k] = v;
            }
    return gamma;
}

/// d Gamma^i_jk / dx^l for the conformal metric, exact from the Hessian.
inline std::vector<double> conformal_christoffel_derivative(const ConformalJet& jet,
                                                            int n) {
    std::vector<double> d(static_cast<std::size_t>(n) * n * n * n, 0.0);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    if (i == j) v += jet.hess(k, l);
                    if (i == k) v += jet.hess(j, l);
                    if (j == k) v -= jet.hess(i, l);
                    d[((static_cast<std::size_t>(l) * n + i) * n + j) * n + k] = v;
                }
    return d;
}

/// y^a R^i_ajk of the conformal metric, assembled from the exact Christoffel
/// symbols and their exact derivatives (no finite differences anywhere).
inline std::vector<double> conformal_riemann_contraction(const ConformalJet& jet,
                                                         const PhasePoint& p) {
    const int n = p.dim();
    std::vector<double> g0 = conformal_christoffel(jet, n);
    std::vector<double> dg = conformal_christoffel_derivative(jet, n);
    auto at = [&](int i, int j, int k) {
        return g0[(static_cast<std::size_t>(i) * n + j) * n + k];
    };
    auto dat = [&](int l, int i, int j, int k) {
        return dg[((static_cast<std::size_t>(l) * n + i) * n + j) * n + k];
    };
    std::vector<double> out(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int a = 0; a < n; ++a) {
                    double term = dat(j, i, k, a) - dat(k, i, j, a);
                    for (int m = 0; m < n; ++m)
                        term += at(i, j, m) * at(m, k, a) - at(i, k, m) * at(m, j, a);
                    acc += term * p.y[a];
                }
                out[(static_cast<std::size_t>(i) * n + j) * n + k] = acc;
            }
    return out;
}

/// Christoffel symbols of the conformal metric e^{2 x1} delta_ij, which are
/// constant. Exact, so downstream comparisons hold at machine precision.
inline std::vector<double> conformal_x1_christoffel(int n) {
    ConformalJet jet;
    jet.grad.assign(n, 0.0);
    jet.grad[0] = 1.0;
    jet.hess = Mat(n);
    return conformal_christoffel(jet, n);
}

/// G^i = 1/2 Gamma^i_jk y^j y^k for an explicit Christoffel tensor.
inline std::vector<double> christoffel_spray(const std::vector<double>& gamma,
                                             const PhasePoint& p) {
    const int n = p.dim();
    std::vector<double> G(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                G[i] += 0.5 * gamma[(static_cast<std::size_t>(i) * n + j) * n + k] *
                        p.y[j] * p.y[k];
    return G;
}

/// y^a R^i_ajk for CONSTANT Christoffel symbols, where the Riemann tensor
/// reduces to the quadratic terms Gamma^i_jm Gamma^m_ka - Gamma^i_km
/// Gamma^m_ja. Exact arithmetic, no finite differences.
inline std::vector<double> constant_christoffel_curvature(
    const std::vector<double>& gamma, const PhasePoint& p) {
    const int n = p.dim();
    auto at = [&](int i, int j, int k) {
        return gamma[(static_cast<std::size_t>(i) * n + j) * n + k];
    };
    std::vector<double> out(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int a = 0; a < n; ++a) {
                    double term = 0.0;
                    for (int m = 0; m < n; ++m)
                        term += at(i, j, m) * at(m, k, a) - at(i, k, m) * at(m, j, a);
                    acc += term * p.y[a];
                }
                out[(static_cast<std::size_t>(i) * n + j) * n + k] = acc;
            }
    return out;
}

/// Curvature contraction y^a R^i_ajk of the Riemann tensor
/// R^i_ajk = d_j Gamma^i_ka - d_k Gamma^i_ja + Gamma^i_jm Gamma^m_ka
///         - Gamma^i_km Gamma^m_ja, all from finite differences.
inline std::vector<double> riemann_contraction(const MetricCoefficients& a,
                                               const PhasePoint& p,
                                               double h = 1e-5) {
    const int n = p.dim();
    auto at = [&](const std::vector<double>& g, int i, int j, int k) {
        return g[(static_cast<std::size_t>(i) * n + j) * n + k];
    };
    std::vector<double> g0 = christoffel(a, p.x);
    // dgamma[l][i][j][k] = d Gamma^i_jk / d x^l
    std::vector<std::vector<double>> dgamma(n);
    for (int l = 0; l < n; ++l) {
        std::vector<double> xp = p.x, xm = p.x;
        xp[l] += h;
        xm[l] -= h;
        std::vector<double> gp = christoffel(a, xp);
        std::vector<double> gm = christoffel(a, xm);
        dgamma[l].resize(gp.size());
        for (std::size_t t = 0; t < gp.size(); ++t)
            dgamma[l][t] = (gp[t] - gm[t]) / (2.0 * h);
    }
    std::vector<double> out(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double acc = 0.0;
                for (int ax = 0; ax < n; ++ax) {
                    double term = at(dgamma[j], i, k, ax) - at(dgamma[k], i, j, ax);
                    for (int m = 0; m < n; ++m)
                        term += at(g0, i, j, m) * at(g0, m, k, ax) -
                                at(g0, i, k, m) * at(g0, m, j, ax);
                    acc += term * p.y[ax];
                }
                out[(static_cast<std::size_t>(i) * n + j) * n + k] = acc;
            }
    return out;
}

}  // namespace finsler::oracle
