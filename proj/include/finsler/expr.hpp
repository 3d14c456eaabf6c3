// Expression DSL: hash-consed arithmetic DAG over x1..xn, y1..yn with
// parsing, printing, evaluation and exact symbolic differentiation.
#pragma once

#include "finsler/core.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace finsler {

enum class ExprOp : std::uint8_t {
    Constant,
    BaseVar,
    FibreVar,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // constant exponent, stored in value
    Neg,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos
};

/// Rejected input: byte offset, what was expected, and a source excerpt.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::string expected, std::string excerpt)
        : Error("parse error at offset " + std::to_string(offset) + ": expected " +
                expected + " near \"" + excerpt + "\""),
          offset_(offset),
          expected_(std::move(expected)),
          excerpt_(std::move(excerpt)) {}

    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }
    const std::string& excerpt() const { return excerpt_; }

private:
    std::size_t offset_;
    std::string expected_;
    std::string excerpt_;
};

namespace detail {

struct ExprNode {
    ExprOp op;
    std::uint8_t var;  // variable index (1-based) for BaseVar/FibreVar
    std::uint32_t a;   // first child
    std::uint32_t b;   // second child (binary ops only)
    double value;      // Constant value, or Pow exponent
};

struct NodeKey {
    std::uint8_t op;
    std::uint8_t var;
    std::uint32_t a;
    std::uint32_t b;
    std::uint64_t vbits;
    bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
        std::uint64_t h = k.vbits * 0x9E3779B97F4A7C15ull;
        h ^= (std::uint64_t(k.a) << 32) | k.b;
        h *= 0xBF58476D1CE4E5B9ull;
        h ^= (std::uint64_t(k.op) << 8) | k.var;
        h ^= h >> 29;
        h *= 0x94D049BB133111EBull;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

// Process-wide intern table. Construction is serialized behind a mutex;
// evaluation only reads and must not run concurrently with construction.
class ExprPool {
public:
    static ExprPool& instance() {
        static ExprPool pool;
        return pool;
    }

    std::uint32_t intern(ExprOp op, std::uint8_t var, std::uint32_t a, std::uint32_t b,
                         double value) {
        NodeKey key{static_cast<std::uint8_t>(op), var, a, b,
                    std::bit_cast<std::uint64_t>(value)};
        std::lock_guard<std::mutex> lock(mu_);
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(ExprNode{op, var, a, b, value});
        table_.emplace(key, id);
        return id;
    }

    const ExprNode& node(std::uint32_t id) const { return nodes_[id]; }

    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return nodes_.size();
    }

    bool diff_lookup(std::uint64_t key, std::uint32_t& out) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = dmemo_.find(key);
        if (it == dmemo_.end()) return false;
        out = it->second;
        return true;
    }

    void diff_store(std::uint64_t key, std::uint32_t value) {
        std::lock_guard<std::mutex> lock(mu_);
        dmemo_.emplace(key, value);
    }

    std::uint32_t zero_id() const { return zero_; }
    std::uint32_t one_id() const { return one_; }

private:
    ExprPool() {
        nodes_.reserve(1u << 16);
        zero_ = intern(ExprOp::Constant, 0, 0, 0, 0.0);
        one_ = intern(ExprOp::Constant, 0, 0, 0, 1.0);
    }

    std::vector<ExprNode> nodes_;
    std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> table_;
    std::unordered_map<std::uint64_t, std::uint32_t> dmemo_;
    std::uint32_t zero_ = 0;
    std::uint32_t one_ = 0;
    mutable std::mutex mu_;
};

inline bool is_integral(double v) { return std::floor(v) == v && std::isfinite(v); }

// ---- smart constructors: constant folding plus 0/1 identities only ----

inline std::uint32_t make_const(double v) {
    if (v == 0.0) v = 0.0;  // collapse -0.0 with +0.0
    return ExprPool::instance().intern(ExprOp::Constant, 0, 0, 0, v);
}

inline bool const_value(std::uint32_t id, double& out) {
    const ExprNode& n = ExprPool::instance().node(id);
    if (n.op != ExprOp::Constant) return false;
    out = n.value;
    return true;
}

inline bool is_zero_node(std::uint32_t id) {
    double v;
    return const_value(id, v) && v == 0.0;
}

inline bool is_one_node(std::uint32_t id) {
    double v;
    return const_value(id, v) && v == 1.0;
}

inline std::uint32_t make_add(std::uint32_t a, std::uint32_t b) {
    double ca, cb;
    if (is_zero_node(a)) return b;
    if (is_zero_node(b)) return a;
    if (const_value(a, ca) && const_value(b, cb) && std::isfinite(ca + cb))
        return make_const(ca + cb);
    return ExprPool::instance().intern(ExprOp::Add, 0, a, b, 0.0);
}

inline std::uint32_t make_neg(std::uint32_t a) {
    double ca;
    if (const_value(a, ca)) return make_const(-ca);
    const ExprNode& n = ExprPool::instance().node(a);
    if (n.op == ExprOp::Neg) return n.a;
    return ExprPool::instance().intern(ExprOp::Neg, 0, a, 0, 0.0);
}

inline std::uint32_t make_sub(std::uint32_t a, std::uint32_t b) {
    double ca, cb;
    if (is_zero_node(b)) return a;
    if (is_zero_node(a)) return make_neg(b);
    if (a == b) return ExprPool::instance().zero_id();
    if (const_value(a, ca) && const_value(b, cb) && std::isfinite(ca - cb))
        return make_const(ca - cb);
    return ExprPool::instance().intern(ExprOp::Sub, 0, a, b, 0.0);
}

inline std::uint32_t make_mul(std::uint32_t a, std::uint32_t b) {
    double ca, cb;
    if (is_zero_node(a) || is_zero_node(b)) return ExprPool::instance().zero_id();
    if (is_one_node(a)) return b;
    if (is_one_node(b)) return a;
    if (const_value(a, ca) && const_value(b, cb) && std::isfinite(ca * cb))
        return make_const(ca * cb);
    return ExprPool::instance().intern(ExprOp::Mul, 0, a, b, 0.0);
}

inline std::uint32_t make_div(std::uint32_t a, std::uint32_t b) {
    double ca, cb;
    if (is_zero_node(a)) return ExprPool::instance().zero_id();
    if (is_one_node(b)) return a;
    if (const_value(a, ca) && const_value(b, cb) && cb != 0.0 && std::isfinite(ca / cb))
        return make_const(ca / cb);
    return ExprPool::instance().intern(ExprOp::Div, 0, a, b, 0.0);
}

inline std::uint32_t make_pow(std::uint32_t a, double expo) {
    double ca;
    if (expo == 0.0) return ExprPool::instance().one_id();
    if (expo == 1.0) return a;
    if (const_value(a, ca)) {
        double r = std::pow(ca, expo);
        if (std::isfinite(r)) return make_const(r);
    }
    return ExprPool::instance().intern(ExprOp::Pow, 0, a, 0, expo);
}

inline std::uint32_t make_unary(ExprOp op, std::uint32_t a) {
    double ca;
    if (const_value(a, ca)) {
        double r = 0.0;
        switch (op) {
            case ExprOp::Sqrt: r = std::sqrt(ca); break;
            case ExprOp::Exp: r = std::exp(ca); break;
            case ExprOp::Log: r = std::log(ca); break;
            case ExprOp::Sin: r = std::sin(ca); break;
            case ExprOp::Cos: r = std::cos(ca); break;
            default: r = std::numeric_limits<double>::quiet_NaN(); break;
        }
        if (std::isfinite(r)) return make_const(r);
    }
    return ExprPool::instance().intern(op, 0, a, 0, 0.0);
}

inline std::string print_node(std::uint32_t id, int parent_prec, int depth);

}  // namespace detail

/// Immutable expression handle. Copy is cheap; all algebra goes through the
/// shared intern pool, so structurally equal expressions share one node.
class Expr {
public:
    Expr() : id_(detail::ExprPool::instance().zero_id()), dim_(0) {}

    static Expr constant(double v) { return Expr(detail::make_const(v), 0); }

    static Expr variable(Var v, int dim) {
        if (dim < 1 || dim > kMaxDim)
            throw DomainError("variable: dimension out of range");
        if (v.index < 1 || v.index > dim)
            throw DomainError("variable: index " + std::to_string(v.index) +
                              " out of range 1.." + std::to_string(dim));
        ExprOp op = v.kind == VarKind::Base ? ExprOp::BaseVar : ExprOp::FibreVar;
        auto id = detail::ExprPool::instance().intern(
            op, static_cast<std::uint8_t>(v.index), 0, 0, 0.0);
        return Expr(id, static_cast<std::uint8_t>(dim));
    }

    std::uint32_t id() const { return id_; }
    int dim() const { return dim_; }

    bool is_constant(double* out = nullptr) const {
        double v;
        if (!detail::const_value(id_, v)) return false;
        if (out) *out = v;
        return true;
    }
    bool is_zero() const { return detail::is_zero_node(id_); }

    double eval(const PhasePoint& p) const;
    Expr diff(Var v) const;
    Expr dx(int i) const { return diff(x_var(i)); }
    Expr dy(int i) const { return diff(y_var(i)); }
    std::string str() const { return detail::print_node(id_, 0, 0); }

    /// True when any node of the DAG references a fibre variable y^i.
    bool uses_fibre() const;

    friend Expr operator+(const Expr& a, const Expr& b) {
        return Expr(detail::make_add(a.id_, b.id_), std::max(a.dim_, b.dim_));
    }
    friend Expr operator-(const Expr& a, const Expr& b) {
        return Expr(detail::make_sub(a.id_, b.id_), std::max(a.dim_, b.dim_));
    }
    friend Expr operator*(const Expr& a, const Expr& b) {
        return Expr(detail::make_mul(a.id_, b.id_), std::max(a.dim_, b.dim_));
    }
    friend Expr operator/(const Expr& a, const Expr& b) {
        return Expr(detail::make_div(a.id_, b.id_), std::max(a.dim_, b.dim_));
    }
    Expr operator-() const { return Expr(detail::make_neg(id_), dim_); }

    friend Expr operator+(const Expr& a, double c) { return a + Expr::constant(c); }
    friend Expr operator+(double c, const Expr& a) { return Expr::constant(c) + a; }
    friend Expr operator-(const Expr& a, double c) { return a - Expr::constant(c); }
    friend Expr operator-(double c, const Expr& a) { return Expr::constant(c) - a; }
    friend Expr operator*(const Expr& a, double c) { return a * Expr::constant(c); }
    friend Expr operator*(double c, const Expr& a) { return Expr::constant(c) * a; }
    friend Expr operator/(const Expr& a, double c) { return a / Expr::constant(c); }
    friend Expr operator/(double c, const Expr& a) { return Expr::constant(c) / a; }

    friend Expr pow(const Expr& a, double expo) {
        return Expr(detail::make_pow(a.id_, expo), a.dim_);
    }
    friend Expr sqrt(const Expr& a) {
        return Expr(detail::make_unary(ExprOp::Sqrt, a.id_), a.dim_);
    }
    friend Expr exp(const Expr& a) {
        return Expr(detail::make_unary(ExprOp::Exp, a.id_), a.dim_);
    }
    friend Expr log(const Expr& a) {
        return Expr(detail::make_unary(ExprOp::Log, a.id_), a.dim_);
    }
    friend Expr sin(const Expr& a) {
        return Expr(detail::make_unary(ExprOp::Sin, a.id_), a.dim_);
    }
    friend Expr cos(const Expr& a) {
        return Expr(detail::make_unary(ExprOp::Cos, a.id_), a.dim_);
    }

private:
    Expr(std::uint32_t id, std::uint8_t dim) : id_(id), dim_(dim) {}
    friend Expr parse_expr(std::string_view, int);
    friend std::vector<double> eval_block(std::span<const Expr>, const PhasePoint&);
    friend class ExprDiffer;

    std::uint32_t id_;
    std::uint8_t dim_;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline int node_prec(const ExprNode& n) {
    switch (n.op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Pow: return 4;
        case ExprOp::Constant: return n.value < 0.0 ? 3 : 5;
        default: return 5;
    }
}

// Right children print one level tighter than the parent so that reparsing
// reproduces the exact tree shape (floating-point sums are not associative).
inline std::string print_node(std::uint32_t id, int parent_prec, int depth) {
    const ExprPool& pool = ExprPool::instance();
    const ExprNode& n = pool.node(id);
    if (depth > 200) return "...";
    int prec = node_prec(n);
    std::string body;
    switch (n.op) {
        case ExprOp::Constant: body = format_double(n.value); break;
        case ExprOp::BaseVar: body = "x" + std::to_string(n.var); break;
        case ExprOp::FibreVar: body = "y" + std::to_string(n.var); break;
        case ExprOp::Add:
            body = print_node(n.a, prec, depth + 1) + " + " +
                   print_node(n.b, prec + 1, depth + 1);
            break;
        case ExprOp::Sub:
            body = print_node(n.a, prec, depth + 1) + " - " +
                   print_node(n.b, prec + 1, depth + 1);
            break;
        case ExprOp::Mul:
            body = print_node(n.a, prec, depth + 1) + " * " +
                   print_node(n.b, prec + 1, depth + 1);
            break;
        case ExprOp::Div:
            body = print_node(n.a, prec, depth + 1) + " / " +
                   print_node(n.b, prec + 1, depth + 1);
            break;
        case ExprOp::Pow:
            body = print_node(n.a, prec + 1, depth + 1) + "^" + format_double(n.value);
            break;
        case ExprOp::Neg: body = "-" + print_node(n.a, prec, depth + 1); break;
        case ExprOp::Sqrt: body = "sqrt(" + print_node(n.a, 0, depth + 1) + ")"; break;
        case ExprOp::Exp: body = "exp(" + print_node(n.a, 0, depth + 1) + ")"; break;
        case ExprOp::Log: body = "log(" + print_node(n.a, 0, depth + 1) + ")"; break;
        case ExprOp::Sin: body = "sin(" + print_node(n.a, 0, depth + 1) + ")"; break;
        case ExprOp::Cos: body = "cos(" + print_node(n.a, 0, depth + 1) + ")"; break;
    }
    if (prec < parent_prec) return "(" + body + ")";
    return body;
}

inline std::string short_excerpt(std::uint32_t id) {
    std::string s = print_node(id, 0, 0);
    if (s.size() > 120) s = s.substr(0, 117) + "...";
    return s;
}

struct EvalScratch {
    std::vector<double> val;
    std::vector<std::uint32_t> mark;
    std::uint32_t epoch = 0;

    void begin(std::size_t n) {
        if (val.size() < n) {
            val.resize(n);
            mark.resize(n, 0);
        }
        if (++epoch == 0) {
            std::fill(mark.begin(), mark.end(), 0);
            epoch = 1;
        }
    }
};

inline EvalScratch& eval_scratch() {
    thread_local EvalScratch scratch;
    return scratch;
}

[[noreturn]] inline void eval_fail(std::uint32_t id, const std::string& reason) {
    throw DomainError("evaluation error: " + reason + " in \"" + short_excerpt(id) +
                      "\"");
}

// Iterative post-order evaluation with a per-point memo shared across roots.
inline double eval_node(std::uint32_t root, const PhasePoint& p, EvalScratch& s) {
    const ExprPool& pool = ExprPool::instance();
    if (s.mark[root] == s.epoch) return s.val[root];

    thread_local std::vector<std::uint32_t> stack;
    stack.clear();
    stack.push_back(root);
    while (!stack.empty()) {
        std::uint32_t id = stack.back();
        if (s.mark[id] == s.epoch) {
            stack.pop_back();
            continue;
        }
        const ExprNode& n = pool.node(id);
        double r = 0.0;
        switch (n.op) {
            case ExprOp::Constant: r = n.value; break;
            case ExprOp::BaseVar:
                if (n.var > p.x.size()) eval_fail(id, "dimension mismatch");
                r = p.x[n.var - 1];
                break;
            case ExprOp::FibreVar:
                if (n.var > p.y.size()) eval_fail(id, "dimension mismatch");
                r = p.y[n.var - 1];
                break;
            default: {
                if (s.mark[n.a] != s.epoch) {
                    stack.push_back(n.a);
                    continue;
                }
                double a = s.val[n.a];
                bool binary = n.op == ExprOp::Add || n.op == ExprOp::Sub ||
                              n.op == ExprOp::Mul || n.op == ExprOp::Div;
                double b = 0.0;
                if (binary) {
                    if (s.mark[n.b] != s.epoch) {
                        stack.push_back(n.b);
                        continue;
                    }
                    b = s.val[n.b];
                }
                switch (n.op) {
                    case ExprOp::Add: r = a + b; break;
                    case ExprOp::Sub: r = a - b; break;
                    case ExprOp::Mul: r = a * b; break;
                    case ExprOp::Div:
                        if (b == 0.0) eval_fail(id, "division by zero");
                        r = a / b;
                        break;
                    case ExprOp::Pow:
                        if (a < 0.0 && !is_integral(n.value))
                            eval_fail(id, "fractional power of negative base");
                        if (a == 0.0 && n.value < 0.0)
                            eval_fail(id, "negative power of zero");
                        r = std::pow(a, n.value);
                        break;
                    case ExprOp::Neg: r = -a; break;
                    case ExprOp::Sqrt:
                        if (a < 0.0) eval_fail(id, "square root of negative value");
                        r = std::sqrt(a);
                        break;
                    case ExprOp::Exp: r = std::exp(a); break;
                    case ExprOp::Log:
                        if (a <= 0.0) eval_fail(id, "log of non-positive value");
                        r = std::log(a);
                        break;
                    case ExprOp::Sin: r = std::sin(a); break;
                    case ExprOp::Cos: r = std::cos(a); break;
                    default: break;
                }
                if (!std::isfinite(r)) eval_fail(id, "non-finite value");
                break;
            }
        }
        s.val[id] = r;
        s.mark[id] = s.epoch;
        stack.pop_back();
    }
    return s.val[root];
}

inline std::uint32_t diff_node(std::uint32_t id, Var v) {
    ExprPool& pool = ExprPool::instance();
    std::uint64_t key = (std::uint64_t(id) << 5) |
                        (std::uint64_t(v.kind == VarKind::Fibre ? 1 : 0) << 4) |
                        std::uint64_t(v.index);
    std::uint32_t memo;
    if (pool.diff_lookup(key, memo)) return memo;

    const ExprNode n = pool.node(id);
    std::uint32_t r = pool.zero_id();
    switch (n.op) {
        case ExprOp::Constant: break;
        case ExprOp::BaseVar:
            r = (v.kind == VarKind::Base && n.var == v.index) ? pool.one_id()
                                                              : pool.zero_id();
            break;
        case ExprOp::FibreVar:
            r = (v.kind == VarKind::Fibre && n.var == v.index) ? pool.one_id()
                                                               : pool.zero_id();
            break;
        case ExprOp::Add: r = make_add(diff_node(n.a, v), diff_node(n.b, v)); break;
        case ExprOp::Sub: r = make_sub(diff_node(n.a, v), diff_node(n.b, v)); break;
        case ExprOp::Mul:
            r = make_add(make_mul(diff_node(n.a, v), n.b),
                         make_mul(n.a, diff_node(n.b, v)));
            break;
        case ExprOp::Div:
            r = make_div(make_sub(make_mul(diff_node(n.a, v), n.b),
                                  make_mul(n.a, diff_node(n.b, v))),
                         make_mul(n.b, n.b));
            break;
        case ExprOp::Pow:
            r = make_mul(make_mul(make_const(n.value), make_pow(n.a, n.value - 1.0)),
                         diff_node(n.a, v));
            break;
        case ExprOp::Neg: r = make_neg(diff_node(n.a, v)); break;
        case ExprOp::Sqrt:
            r = make_div(diff_node(n.a, v),
                         make_mul(make_const(2.0), make_unary(ExprOp::Sqrt, n.a)));
            break;
        case ExprOp::Exp: r = make_mul(diff_node(n.a, v), id); break;
        case ExprOp::Log: r = make_div(diff_node(n.a, v), n.a); break;
        case ExprOp::Sin:
            r = make_mul(diff_node(n.a, v), make_unary(ExprOp::Cos, n.a));
            break;
        case ExprOp::Cos:
            r = make_neg(make_mul(diff_node(n.a, v), make_unary(ExprOp::Sin, n.a)));
            break;
    }
    pool.diff_store(key, r);
    return r;
}

}  // namespace detail

inline double Expr::eval(const PhasePoint& p) const {
    if (dim_ > p.dim())
        throw DomainError("eval: expression needs dimension " + std::to_string(dim_) +
                          ", point has " + std::to_string(p.dim()));
    detail::EvalScratch& s = detail::eval_scratch();
    s.begin(detail::ExprPool::instance().size());
    return detail::eval_node(id_, p, s);
}

inline Expr Expr::diff(Var v) const {
    if (v.index < 1 || v.index > kMaxDim) throw DomainError("diff: bad variable index");
    return Expr(detail::diff_node(id_, v), dim_);
}

inline bool Expr::uses_fibre() const {
    const detail::ExprPool& pool = detail::ExprPool::instance();
    std::vector<std::uint32_t> stack{id_};
    std::vector<bool> seen;
    while (!stack.empty()) {
        std::uint32_t id = stack.back();
        stack.pop_back();
        if (seen.size() <= id) seen.resize(id + 1, false);
        if (seen[id]) continue;
        seen[id] = true;
        const detail::ExprNode& n = pool.node(id);
        switch (n.op) {
            case ExprOp::FibreVar: return true;
            case ExprOp::Constant:
            case ExprOp::BaseVar: break;
            case ExprOp::Add:
            case ExprOp::Sub:
            case ExprOp::Mul:
            case ExprOp::Div:
                stack.push_back(n.a);
                stack.push_back(n.b);
                break;
            default: stack.push_back(n.a); break;
        }
    }
    return false;
}

/// Evaluates several expressions at one point, sharing the subtree memo.
inline std::vector<double> eval_block(std::span<const Expr> exprs,
                                      const PhasePoint& p) {
    detail::EvalScratch& s = detail::eval_scratch();
    s.begin(detail::ExprPool::instance().size());
    std::vector<double> out;
    out.reserve(exprs.size());
    for (const Expr& e : exprs) {
        if (e.dim() > p.dim()) throw DomainError("eval_block: dimension mismatch");
        out.push_back(detail::eval_node(e.id_, p, s));
    }
    return out;
}

inline double eval(const Expr& e, const PhasePoint& p) { return e.eval(p); }

namespace detail {

class Parser {
public:
    Parser(std::string_view src, int dim) : src_(src), dim_(dim) {}

    Expr run() {
        if (src_.empty()) fail(0, "non-empty expression");
        if (src_.size() > (1u << 16)) fail(0, "expression shorter than 64 KiB");
        Expr e = sum();
        skip_ws();
        if (pos_ != src_.size()) fail(pos_, "end of input or operator");
        return e;
    }

private:
    [[noreturn]] void fail(std::size_t at, std::string expected) {
        std::size_t lo = at >= 15 ? at - 15 : 0;
        std::size_t len = std::min<std::size_t>(30, src_.size() - lo);
        throw ParseError(at, std::move(expected), std::string(src_.substr(lo, len)));
    }

    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r' ||
                src_[pos_] == '\n'))
            ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    bool eat(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    Expr sum() {
        Expr e = term();
        for (;;) {
            if (eat('+'))
                e = e + term();
            else if (eat('-'))
                e = e - term();
            else
                return e;
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (eat('*'))
                e = e * unary();
            else if (eat('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary() {
        if (eat('-')) return -unary();
        eat('+');
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!eat('^')) return base;
        std::size_t at = pos_;
        Expr e = unary();
        double c;
        if (!e.is_constant(&c)) fail(at, "constant exponent");
        return pow(base, c);
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail(pos_, "number, variable or '('");
        if (++depth_ > 256) fail(pos_, "shallower nesting");
        Expr result = Expr::constant(0.0);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            result = sum();
            if (!eat(')')) fail(pos_, "')'");
        } else if ((c >= '0' && c <= '9') || c == '.') {
            result = Expr::constant(number());
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_'))
                ++pos_;
            std::string_view ident = src_.substr(start, pos_ - start);
            if (peek('(')) {
                ++pos_;
                Expr arg = sum();
                if (!eat(')')) fail(pos_, "')'");
                if (ident == "sqrt")
                    result = sqrt(arg);
                else if (ident == "exp")
                    result = exp(arg);
                else if (ident == "log")
                    result = log(arg);
                else if (ident == "sin")
                    result = sin(arg);
                else if (ident == "cos")
                    result = cos(arg);
                else
                    fail(start, "one of sqrt, exp, log, sin, cos");
            } else {
                result = variable_ref(ident, start);
            }
        } else {
            fail(pos_, "number, variable or '('");
        }
        --depth_;
        return result;
    }

    Expr variable_ref(std::string_view ident, std::size_t at) {
        if (ident.size() < 2 || (ident[0] != 'x' && ident[0] != 'y'))
            fail(at, "variable x1..x" + std::to_string(dim_) + " or y1..y" +
                         std::to_string(dim_));
        int index = 0;
        auto res =
            std::from_chars(ident.data() + 1, ident.data() + ident.size(), index);
        if (res.ec != std::errc() || res.ptr != ident.data() + ident.size())
            fail(at, "numeric variable index");
        if (index < 1 || index > dim_)
            fail(at, "variable index in 1.." + std::to_string(dim_));
        VarKind kind = ident[0] == 'x' ? VarKind::Base : VarKind::Fibre;
        return Expr::variable({kind, index}, dim_);
    }

    double number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               ((src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            bool any = false;
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
                ++pos_;
                any = true;
            }
            if (!any) pos_ = mark;
        }
        double value = 0.0;
        auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
            fail(start, "number");
        return value;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int dim_;
    int depth_ = 0;
};

}  // namespace detail

/// Parses the infix grammar (precedence ^ > unary - > *,/ > +,-) with
/// variables x1..xdim, y1..ydim and calls sqrt/exp/log/sin/cos.
inline Expr parse_expr(std::string_view text, int dim) {
    if (dim < 1 || dim > kMaxDim)
        throw DomainError("parse: dimension must be in [1, " +
                          std::to_string(kMaxDim) + "]");
    Expr e = detail::Parser(text, dim).run();
    e.dim_ = static_cast<std::uint8_t>(dim);
    return e;
}

}  // namespace finsler
