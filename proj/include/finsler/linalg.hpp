// Dense n-by-n helpers for the small metric matrices (n <= 8):
// LU factorization with partial pivoting, inverse, determinant.
#pragma once

#include "finsler/core.hpp"

#include <vector>

namespace finsler {

struct Mat {
    int n = 0;
    std::vector<double> a;  // row-major

    Mat() = default;
    explicit Mat(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i) * n + j];
    }

    static Mat identity(int size) {
        Mat m(size);
        for (int i = 0; i < size; ++i) m(i, i) = 1.0;
        return m;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }

    double inf_norm() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j) row += std::abs((*this)(i, j));
            m = std::max(m, row);
        }
        return m;
    }
};

inline Mat mat_mul(const Mat& a, const Mat& b) {
    Mat c(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            double v = a(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < a.n; ++j) c(i, j) += v * b(k, j);
        }
    return c;
}

struct LuResult {
    Mat lu;
    std::vector<int> perm;
    double det = 0.0;
    bool singular = false;
};

inline LuResult lu_factor(Mat m) {
    const int n = m.n;
    LuResult r;
    r.perm.resize(n);
    for (int i = 0; i < n; ++i) r.perm[i] = i;
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(m(col, col));
        for (int row = col + 1; row < n; ++row)
            if (std::abs(m(row, col)) > best) {
                best = std::abs(m(row, col));
                piv = row;
            }
        if (best == 0.0) {
            r.singular = true;
            r.det = 0.0;
            r.lu = std::move(m);
            return r;
        }
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
            std::swap(r.perm[col], r.perm[piv]);
            det = -det;
        }
        det *= m(col, col);
        for (int row = col + 1; row < n; ++row) {
            double f = m(row, col) / m(col, col);
            m(row, col) = f;
            for (int j = col + 1; j < n; ++j) m(row, j) -= f * m(col, j);
        }
    }
    r.det = det;
    r.lu = std::move(m);
    return r;
}

inline std::vector<double> lu_solve(const LuResult& f, const std::vector<double>& rhs) {
    const int n = f.lu.n;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
        x[i] /= f.lu(i, i);
    }
    return x;
}

inline Mat lu_inverse(const LuResult& f) {
    const int n = f.lu.n;
    Mat inv(n);
    std::vector<double> e(n, 0.0);
    for (int col = 0; col < n; ++col) {
        e.assign(n, 0.0);
        e[col] = 1.0;
        std::vector<double> x = lu_solve(f, e);
        for (int row = 0; row < n; ++row) inv(row, col) = x[row];
    }
    return inv;
}

}  // namespace finsler
