// Flat key=value spec files describing a metric fixture plus optional
// classification candidates. Section headers [like-this] and # comments are
// allowed; errors carry file and line context.
#pragma once

#include "finsler/invariants.hpp"
#include "finsler/metric.hpp"

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace finsler {

struct SpecFile {
    std::string name = "user-spec";
    std::string source = "<memory>";
    std::string raw;  // original bytes, hashed into reports
    int dim = 0;
    std::optional<std::string> F_text;
    std::optional<std::string> L_text;
    std::optional<std::string> sigma_text;
    std::optional<std::string> f_text;
    std::optional<std::string> fprime_text;
    std::optional<std::string> P_text;
    std::vector<double> x_min;
    std::vector<double> x_max;
    std::uint64_t seed = 1;
    int samples = 100;
};

namespace detail {

inline std::string trim(std::string s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_reals(const std::string& text,
                                       const std::string& context) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(text);
    while (is >> item) {
        if (!item.empty() && item.back() == ',') item.pop_back();
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw PreconditionError(context + ": expected a list of reals, got '" +
                                    item + "'");
        }
    }
    return out;
}

}  // namespace detail

inline SpecFile parse_spec_stream(std::istream& is, const std::string& source) {
    SpecFile spec;
    spec.source = source;
    std::string line;
    int lineno = 0;
    std::string raw;
    auto fail = [&](const std::string& msg) -> void {
        throw PreconditionError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(is, line)) {
        ++lineno;
        raw += line;
        raw += '\n';
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[' && s.back() == ']') continue;  // section header
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        if (value.empty()) fail("empty value for '" + key + "'");
        const std::string ctx = source + ":" + std::to_string(lineno);
        if (key == "name")
            spec.name = value;
        else if (key == "dim") {
            try {
                spec.dim = std::stoi(value);
            } catch (const std::exception&) {
                fail("dim must be an integer");
            }
        } else if (key == "F")
            spec.F_text = value;
        else if (key == "L")
            spec.L_text = value;
        else if (key == "sigma")
            spec.sigma_text = value;
        else if (key == "f")
            spec.f_text = value;
        else if (key == "fprime")
            spec.fprime_text = value;
        else if (key == "P")
            spec.P_text = value;
        else if (key == "x_min")
            spec.x_min = detail::parse_reals(value, ctx);
        else if (key == "x_max")
            spec.x_max = detail::parse_reals(value, ctx);
        else if (key == "seed") {
            try {
                spec.seed = std::stoull(value);
            } catch (const std::exception&) {
                fail("seed must be a non-negative integer");
            }
        } else if (key == "samples") {
            try {
                spec.samples = std::stoi(value);
            } catch (const std::exception&) {
                fail("samples must be an integer");
            }
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    spec.raw = std::move(raw);
    return spec;
}

inline SpecFile parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open spec file '" + path + "'");
    return parse_spec_stream(in, path);
}

inline SpecFile parse_spec_text(std::string_view text,
                                const std::string& source = "<memory>") {
    std::istringstream is{std::string(text)};
    return parse_spec_stream(is, source);
}

/// Fully validated fixture: metric, volume and optional candidates, with all
/// homogeneity declarations checked on load.
struct LoadedSpec {
    MetricSpec metric;
    VolumeSpec volume;
    std::optional<Expr> f;
    std::optional<Expr> fprime;
    std::optional<Expr> P;
    SpecFile file;
};

inline LoadedSpec load_spec(const SpecFile& spec) {
    if (spec.dim < 2 || spec.dim > kMaxDim)
        throw PreconditionError(spec.source + ": dim must be in [2, " +
                                std::to_string(kMaxDim) + "]");
    if (spec.F_text.has_value() == spec.L_text.has_value())
        throw PreconditionError(spec.source + ": exactly one of F or L is required");
    const int n = spec.dim;

    Domain dom = Domain::box(n, -0.3, 0.3, spec.seed, spec.samples);
    if (!spec.x_min.empty() || !spec.x_max.empty()) {
        if (static_cast<int>(spec.x_min.size()) != n ||
            static_cast<int>(spec.x_max.size()) != n)
            throw PreconditionError(spec.source +
                                    ": x_min/x_max must each list dim reals");
        dom.x_lo = spec.x_min;
        dom.x_hi = spec.x_max;
        for (int i = 0; i < n; ++i)
            if (!(dom.x_lo[i] < dom.x_hi[i]))
                throw PreconditionError(spec.source + ": x_min must be below x_max");
    }

    auto parse_in_context = [&](const std::string& text, const char* what) {
        try {
            return parse_expr(text, n);
        } catch (const ParseError& err) {
            throw PreconditionError(spec.source + ": " + what + ": " + err.what());
        }
    };

    LoadedSpec out;
    out.file = spec;
    if (spec.F_text)
        out.metric = make_metric_from_F(spec.name, parse_in_context(*spec.F_text, "F"),
                                        dom);
    else
        out.metric = make_metric_from_L(spec.name, parse_in_context(*spec.L_text, "L"),
                                        dom);

    if (spec.sigma_text)
        out.volume = make_volume(parse_in_context(*spec.sigma_text, "sigma"));

    auto pts = sample_points(dom);
    if (spec.f_text) {
        out.f = parse_in_context(*spec.f_text, "f");
        require_homogeneous(*out.f, 1.0, n, pts, "candidate f");
    }
    if (spec.fprime_text) {
        out.fprime = parse_in_context(*spec.fprime_text, "fprime");
        require_homogeneous(*out.fprime, 0.0, n, pts, "witness fprime");
    }
    if (spec.P_text) {
        out.P = parse_in_context(*spec.P_text, "P");
        require_homogeneous(*out.P, 1.0, n, pts, "projective factor P");
    }
    return out;
}

}  // namespace finsler
