// Structured run reports: deterministic JSON (timings opt-in) and a plain
// text rendering. Exit-code policy: 0 all pass, 1 fails present, 2 input
// error.
#pragma once

#include "finsler/core.hpp"

#include <json.hpp>

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace finsler {

inline constexpr const char* kToolName = "finsler_lab";
inline constexpr const char* kToolVersion = "0.1.0";

inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

struct Report {
    std::string spec_hash = "none";
    int dim = 2;
    std::uint64_t seed = 1;
    int samples = 100;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, double>> timings_ms;
    nlohmann::ordered_json extra;  // command-specific payload

    bool all_passed() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }

    int exit_code() const { return all_passed() ? 0 : 1; }

    nlohmann::ordered_json to_json(bool with_timings = false) const {
        nlohmann::ordered_json j;
        j["tool"] = kToolName;
        j["version"] = kToolVersion;
        j["spec_hash"] = spec_hash;
        j["dim"] = dim;
        j["seed"] = seed;
        j["samples"] = samples;
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const CheckResult& c : checks) {
            if (c.anchor.empty())
                throw Error("check '" + c.name + "' is missing its anchor");
            nlohmann::ordered_json jc;
            jc["name"] = c.name;
            jc["anchor"] = c.anchor;
            jc["verdict"] = c.pass ? "pass" : "fail";
            jc["max_residual"] = c.max_residual;
            jc["tolerance"] = c.tolerance;
            jc["points"] = c.points;
            if (!c.note.empty()) jc["note"] = c.note;
            arr.push_back(std::move(jc));
        }
        j["checks"] = std::move(arr);
        if (!extra.is_null())
            for (auto& [key, value] : extra.items()) j[key] = value;
        if (with_timings) {
            nlohmann::ordered_json jt;
            for (const auto& [name, ms] : timings_ms) jt[name] = ms;
            j["timings_ms"] = std::move(jt);
        }
        return j;
    }

    std::string to_text() const {
        std::string out;
        char buf[64];
        for (const CheckResult& c : checks) {
            out += c.pass ? "PASS " : "FAIL ";
            out += c.name;
            std::snprintf(buf, sizeof(buf), "  residual=%.3e tol=%.3e points=%d",
                          c.max_residual, c.tolerance, c.points);
            out += buf;
            out += " anchor=" + c.anchor;
            if (!c.note.empty()) out += "  (" + c.note + ")";
            out += "\n";
        }
        out += all_passed() ? "all checks passed\n" : "some checks FAILED\n";
        return out;
    }
};

}  // namespace finsler
