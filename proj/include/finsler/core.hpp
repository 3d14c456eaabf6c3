// Shared base types: errors, variable descriptors, phase-space points.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace finsler {

inline constexpr int kMaxDim = 8;
inline constexpr double kSlitEps = 1e-8;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation outside the mathematical domain (log of a negative number,
/// division by zero, point off the slit bundle, dimension mismatch).
class DomainError : public Error {
public:
    using Error::Error;
};

class SingularMetricError : public Error {
public:
    using Error::Error;
};

/// A declared homogeneity degree failed the Liouville residual test.
class HomogeneityError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class PathDependenceError : public Error {
public:
    using Error::Error;
};

enum class VarKind : std::uint8_t { Base, Fibre };

/// Identifies one coordinate variable: x^i (Base) or y^i (Fibre), index 1-based.
struct Var {
    VarKind kind;
    int index;
};

inline Var x_var(int i) { return {VarKind::Base, i}; }
inline Var y_var(int i) { return {VarKind::Fibre, i}; }

inline std::string var_name(Var v) {
    return (v.kind == VarKind::Base ? "x" : "y") + std::to_string(v.index);
}

/// A point (x, y) of the slit tangent bundle: y must stay away from zero.
struct PhasePoint {
    std::vector<double> x;
    std::vector<double> y;

    PhasePoint() = default;
    PhasePoint(std::vector<double> bx, std::vector<double> fy)
        : x(std::move(bx)), y(std::move(fy)) {
        if (x.size() != y.size())
            throw DomainError("phase point: base and fibre dimensions differ");
        if (x.size() < 2 || x.size() > static_cast<std::size_t>(kMaxDim))
            throw DomainError("phase point: dimension must be in [2, " +
                              std::to_string(kMaxDim) + "]");
        if (y_norm() < kSlitEps)
            throw DomainError("phase point: fibre vector below slit threshold");
    }

    int dim() const { return static_cast<int>(x.size()); }

    double y_norm() const {
        double s = 0.0;
        for (double v : y) s += v * v;
        return std::sqrt(s);
    }
};

/// |r| / (1 + |scale|); scale is the largest term entering the identity.
inline double normalized_residual(double r, double scale) {
    return std::abs(r) / (1.0 + std::abs(scale));
}

/// One verified identity: name, mathematical anchor, verdict and residual.
/// Checks that only exercise plumbing use the anchor "plumbing".
struct CheckResult {
    std::string name;
    std::string anchor;
    bool pass = false;
    double max_residual = 0.0;
    double tolerance = 0.0;
    int points = 0;
    std::string note;
};

inline CheckResult make_check(std::string name, std::string anchor, double residual,
                              double tolerance, int points, std::string note = {}) {
    CheckResult c;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    c.max_residual = residual;
    c.tolerance = tolerance;
    c.pass = residual <= tolerance;
    c.points = points;
    c.note = std::move(note);
    return c;
}

}  // namespace finsler
