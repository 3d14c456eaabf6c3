// Deterministic low-discrepancy sample sets on the slit bundle:
// Halton points in an x-box, fibre directions on the sphere scaled to [0.5, 2].
#pragma once

#include "finsler/core.hpp"

#include <cstdint>
#include <vector>

namespace finsler {

/// Sampling window: a box in base coordinates plus a reproducibility seed.
struct Domain {
    std::vector<double> x_lo;
    std::vector<double> x_hi;
    std::uint64_t seed = 1;
    int samples = 100;

    int dim() const { return static_cast<int>(x_lo.size()); }

    static Domain box(int n, double lo, double hi, std::uint64_t seed = 1,
                      int samples = 100) {
        Domain d;
        d.x_lo.assign(n, lo);
        d.x_hi.assign(n, hi);
        d.seed = seed;
        d.samples = samples;
        return d;
    }
};

namespace detail {

inline constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                  29, 31, 37, 41, 43, 47, 53, 59, 61};

inline double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

// Acklam's rational approximation of the inverse normal CDF; accuracy here
// only shapes the direction distribution, never a verdict.
inline double inv_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    if (p <= 0.0) p = 1e-12;
    if (p >= 1.0) p = 1.0 - 1e-12;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

}  // namespace detail

/// The i-th quasi-random slit point of the domain. Same (domain, seed, i)
/// always yields the same point.
inline PhasePoint sample_point(const Domain& d, int i) {
    const int n = d.dim();
    std::uint64_t index = d.seed * 7919 + static_cast<std::uint64_t>(i) + 1;
    std::vector<double> x(n), y(n);
    for (int j = 0; j < n; ++j)
        x[j] = d.x_lo[j] + detail::halton(index, detail::kPrimes[j]) *
                               (d.x_hi[j] - d.x_lo[j]);
    double norm = 0.0;
    for (int j = 0; j < n; ++j) {
        y[j] = detail::inv_normal_cdf(detail::halton(index, detail::kPrimes[n + j]));
        norm += y[j] * y[j];
    }
    norm = std::sqrt(norm);
    if (norm < kSlitEps) {
        y.assign(n, 0.0);
        y[0] = 1.0;
        norm = 1.0;
    }
    double lambda = 0.5 + 1.5 * detail::halton(index, detail::kPrimes[2 * n]);
    for (int j = 0; j < n; ++j) y[j] *= lambda / norm;
    return PhasePoint(std::move(x), std::move(y));
}

inline std::vector<PhasePoint> sample_points(const Domain& d, int count = -1) {
    if (count < 0) count = d.samples;
    std::vector<PhasePoint> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(sample_point(d, i));
    return out;
}

}  // namespace finsler
