// Geodesic integration: fixed-step RK4 on the first-order system
// x' = y, y' = -2 G(x, y), with monitor logging and drift reports.
#pragma once

#include "finsler/spray.hpp"

#include <charconv>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace finsler {

struct Trajectory {
    int dim = 0;
    std::vector<double> t;
    std::vector<std::vector<double>> x;  // per step
    std::vector<std::vector<double>> y;
    std::vector<std::string> monitor_names;
    std::vector<std::vector<double>> monitors;  // [monitor][step]

    enum class Stop { Completed, DomainExit, SlitViolation } stop = Stop::Completed;
    std::string diagnostic;

    std::size_t steps() const { return t.size(); }
};

struct IntegrateOptions {
    double validity_radius = std::numeric_limits<double>::infinity();
    // relative jump of the first monitor between consecutive steps beyond
    // which the step size is rejected as too large
    double energy_jump_tol = 1e-2;
    bool guard_first_monitor = false;
};

inline Trajectory integrate(const SpraySpec& s, const PhasePoint& init, double h,
                            double T,
                            const std::vector<std::pair<std::string, Expr>>& monitors,
                            const IntegrateOptions& opts = {}) {
    if (h <= 0.0 || T <= 0.0) throw PreconditionError("integrate: h and T must be positive");
    const int n = s.dim;
    if (init.dim() != n) throw DomainError("integrate: dimension mismatch");

    Trajectory traj;
    traj.dim = n;
    for (const auto& [name, expr] : monitors) {
        traj.monitor_names.push_back(name);
        (void)expr;
    }
    traj.monitors.resize(monitors.size());

    std::vector<double> x = init.x, y = init.y;
    const auto steps = static_cast<std::size_t>(std::llround(T / h));

    auto radius = [&](const std::vector<double>& v) {
        double acc = 0.0;
        for (double c : v) acc += c * c;
        return std::sqrt(acc);
    };

    // stage derivative: (y, -2G); throws DomainError off the slit bundle
    auto deriv = [&](const std::vector<double>& xs, const std::vector<double>& ys,
                     std::vector<double>& dx, std::vector<double>& dy) {
        PhasePoint p(xs, ys);
        std::vector<double> g = eval_all(s.coeffs, p);
        dx = ys;
        for (int i = 0; i < n; ++i) dy[i] = -2.0 * g[i];
    };

    std::vector<double> k1x(n), k1y(n), k2x(n), k2y(n), k3x(n), k3y(n), k4x(n),
        k4y(n), tx(n), ty(n);

    auto record = [&](double time) {
        traj.t.push_back(time);
        traj.x.push_back(x);
        traj.y.push_back(y);
        PhasePoint p(x, y);
        for (std::size_t m = 0; m < monitors.size(); ++m)
            traj.monitors[m].push_back(monitors[m].second.eval(p));
    };

    record(0.0);
    for (std::size_t step = 0; step < steps; ++step) {
        if (radius(x) > opts.validity_radius) {
            traj.stop = Trajectory::Stop::DomainExit;
            traj.diagnostic = "trajectory left the declared base domain";
            return traj;
        }
        try {
            deriv(x, y, k1x, k1y);
            for (int i = 0; i < n; ++i) {
                tx[i] = x[i] + 0.5 * h * k1x[i];
                ty[i] = y[i] + 0.5 * h * k1y[i];
            }
            deriv(tx, ty, k2x, k2y);
            for (int i = 0; i < n; ++i) {
                tx[i] = x[i] + 0.5 * h * k2x[i];
                ty[i] = y[i] + 0.5 * h * k2y[i];
            }
            deriv(tx, ty, k3x, k3y);
            for (int i = 0; i < n; ++i) {
                tx[i] = x[i] + h * k3x[i];
                ty[i] = y[i] + h * k3y[i];
            }
            deriv(tx, ty, k4x, k4y);
        } catch (const DomainError& err) {
            traj.stop = Trajectory::Stop::DomainExit;
            traj.diagnostic = std::string("stage evaluation failed: ") + err.what();
            return traj;
        }
        for (int i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            y[i] += h / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]);
        }
        // a slit-violating state is never stored
        if (radius(y) < kSlitEps) {
            traj.stop = Trajectory::Stop::SlitViolation;
            traj.diagnostic = "fibre vector fell below the slit threshold";
            return traj;
        }
        record(h * static_cast<double>(step + 1));

        if (opts.guard_first_monitor && !traj.monitors.empty()) {
            const std::vector<double>& e = traj.monitors[0];
            double prev = e[e.size() - 2], cur = e.back();
            if (std::abs(cur - prev) > opts.energy_jump_tol * (1.0 + std::abs(prev)))
                throw Error("integrate: step size too large (monitor '" +
                            traj.monitor_names[0] + "' jumped by " +
                            std::to_string(std::abs(cur - prev)) + " in one step)");
        }
    }
    return traj;
}

struct DriftReport {
    double max_abs_drift = 0.0;
    double relative_drift = 0.0;
    double first_exceed_time = std::numeric_limits<double>::quiet_NaN();
};

/// Drift of a monitored scalar relative to its initial value; the
/// first-exceed time reports when the relative drift first crossed `tol`.
inline DriftReport drift_report(const Trajectory& traj, const std::string& name,
                                double tol = 1e-6) {
    for (std::size_t m = 0; m < traj.monitor_names.size(); ++m) {
        if (traj.monitor_names[m] != name) continue;
        const std::vector<double>& v = traj.monitors[m];
        DriftReport rep;
        if (v.empty()) return rep;
        double v0 = v.front();
        for (std::size_t k = 0; k < v.size(); ++k) {
            double drift = std::abs(v[k] - v0);
            rep.max_abs_drift = std::max(rep.max_abs_drift, drift);
            double rel = drift / (1.0 + std::abs(v0));
            if (rel > tol && std::isnan(rep.first_exceed_time))
                rep.first_exceed_time = traj.t[k];
        }
        rep.relative_drift = rep.max_abs_drift / (1.0 + std::abs(v0));
        return rep;
    }
    throw PreconditionError("drift_report: monitor '" + name + "' was not logged");
}

/// CSV columns: t, x1..xn, y1..yn, then one column per monitor.
inline void write_csv(const Trajectory& traj, std::ostream& os) {
    os << "t";
    for (int i = 1; i <= traj.dim; ++i) os << ",x" << i;
    for (int i = 1; i <= traj.dim; ++i) os << ",y" << i;
    for (const std::string& name : traj.monitor_names) os << "," << name;
    os << "\n";
    char buf[32];
    auto emit = [&](double v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        os.write(buf, res.ptr - buf);
    };
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        emit(traj.t[k]);
        for (int i = 0; i < traj.dim; ++i) {
            os.put(',');
            emit(traj.x[k][i]);
        }
        for (int i = 0; i < traj.dim; ++i) {
            os.put(',');
            emit(traj.y[k][i]);
        }
        for (const std::vector<double>& mon : traj.monitors) {
            os.put(',');
            emit(mon[k]);
        }
        os.put('\n');
    }
}

// ---- unparameterized path comparison ----

/// Projects a trajectory to base space and reparameterizes by arc length
/// (cubic Hermite in the step index). Used to compare projectively related
/// geodesics, which share unparameterized paths.
class ArcLengthPath {
public:
    explicit ArcLengthPath(const Trajectory& traj) : dim_(traj.dim) {
        const std::size_t m = traj.steps();
        s_.resize(m, 0.0);
        x_ = traj.x;
        for (std::size_t k = 1; k < m; ++k) {
            double seg = 0.0;
            for (int i = 0; i < dim_; ++i) {
                double d = x_[k][i] - x_[k - 1][i];
                seg += d * d;
            }
            s_[k] = s_[k - 1] + std::sqrt(seg);
        }
    }

    double length() const { return s_.back(); }

    /// Position at arc length a (clamped), cubic Hermite interpolation with
    /// centered-difference tangents.
    std::vector<double> at(double a) const {
        const std::size_t m = s_.size();
        if (a <= s_.front()) return x_.front();
        if (a >= s_.back()) return x_.back();
        std::size_t hi = 1;
        while (s_[hi] < a) ++hi;
        std::size_t lo = hi - 1;
        double span = s_[hi] - s_[lo];
        if (span <= 0.0) return x_[lo];
        double u = (a - s_[lo]) / span;

        auto tangent = [&](std::size_t k) {
            std::size_t a0 = k == 0 ? 0 : k - 1;
            std::size_t b0 = k + 1 >= m ? m - 1 : k + 1;
            double ds = s_[b0] - s_[a0];
            std::vector<double> t(dim_, 0.0);
            if (ds <= 0.0) return t;
            for (int i = 0; i < dim_; ++i) t[i] = (x_[b0][i] - x_[a0][i]) / ds;
            return t;
        };
        std::vector<double> t0 = tangent(lo), t1 = tangent(hi);
        double u2 = u * u, u3 = u2 * u;
        double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
        double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
        std::vector<double> out(dim_);
        for (int i = 0; i < dim_; ++i)
            out[i] = h00 * x_[lo][i] + h10 * span * t0[i] + h01 * x_[hi][i] +
                     h11 * span * t1[i];
        return out;
    }

private:
    int dim_;
    std::vector<double> s_;
    std::vector<std::vector<double>> x_;
};

/// Largest pointwise distance between the two base paths over the common
/// arc-length range.
inline double unparameterized_path_distance(const Trajectory& a,
                                            const Trajectory& b,
                                            int probes = 200) {
    ArcLengthPath pa(a), pb(b);
    double common = std::min(pa.length(), pb.length());
    double worst = 0.0;
    for (int k = 0; k <= probes; ++k) {
        double s = common * k / probes;
        std::vector<double> xa = pa.at(s), xb = pb.at(s);
        double d = 0.0;
        for (std::size_t i = 0; i < xa.size(); ++i)
            d += (xa[i] - xb[i]) * (xa[i] - xb[i]);
        worst = std::max(worst, std::sqrt(d));
    }
    return worst;
}

}  // namespace finsler
