#pragma once

// JSON problem files and reports, CSV tables.
//
// Weight:  {"L": 1, "segments": [{"kind": "sinusoid", "end": 1,
//           "params": {"amplitude": 1, "omega": 6.28, "phase": 0, "offset": 0}}]}
// Problem: {"p": 2, "L": 3.14, "a": 1, "rho": <weight>, "k": [1, 3]}
//
// A bare number for "a" or "rho" is a constant on [0, L]. Serialization always
// writes full weights with sorted keys, so parse -> write is a fixed point.

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "homog.hpp"
#include "lyapunov.hpp"
#include "shooting.hpp"
#include "weights.hpp"

namespace plyap::io {

using json = nlohmann::json;

namespace detail {

inline double number(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) throw DomainError(std::string(where) + ": missing \"" + key + "\"");
    if (!it->is_number()) throw DomainError(std::string(where) + ": \"" + key + "\" must be a number");
    return it->get<double>();
}

inline const json& object(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_object())
        throw DomainError(std::string(where) + ": \"" + key + "\" must be an object");
    return *it;
}

} // namespace detail

inline json to_json(const PiecewiseWeight& w) {
    json segs = json::array();
    for (const auto& s : w.segments()) {
        json seg;
        seg["end"] = s.end;
        std::visit(
            [&](const auto& sh) {
                using S = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<S, Constant>) {
                    seg["kind"] = "constant";
                    seg["params"] = {{"value", sh.value}};
                } else if constexpr (std::is_same_v<S, Linear>) {
                    seg["kind"] = "linear";
                    seg["params"] = {{"left", sh.left}, {"right", sh.right}};
                } else {
                    seg["kind"] = "sinusoid";
                    seg["params"] = {{"amplitude", sh.amplitude},
                                     {"omega", sh.omega},
                                     {"phase", sh.phase},
                                     {"offset", sh.offset}};
                }
            },
            s.shape);
        segs.push_back(std::move(seg));
    }
    return json{{"L", w.length()}, {"segments", std::move(segs)}};
}

/// `length` is used for the numeric shorthand and checked against an explicit "L".
inline PiecewiseWeight weight_from_json(const json& j, std::optional<double> length = std::nullopt) {
    if (j.is_number()) {
        if (!length) throw DomainError("weight: a bare number needs the interval length \"L\"");
        return PiecewiseWeight::constant(*length, j.get<double>());
    }
    if (!j.is_object()) throw DomainError("weight: expected an object or a number");
    const double L = detail::number(j, "L", "weight");
    if (length && std::abs(*length - L) > 1e-12 * L) throw DomainError("weight: \"L\" differs from the problem length");
    auto it = j.find("segments");
    if (it == j.end() || !it->is_array() || it->empty())
        throw DomainError("weight: \"segments\" must be a non-empty array");
    std::vector<Segment> segs;
    double start = 0.0;
    for (const auto& s : *it) {
        if (!s.is_object()) throw DomainError("weight: each segment must be an object");
        const double end = detail::number(s, "end", "segment");
        auto kind = s.find("kind");
        if (kind == s.end() || !kind->is_string()) throw DomainError("segment: \"kind\" must be a string");
        const json& prm = detail::object(s, "params", "segment");
        const std::string k = kind->get<std::string>();
        Shape shape;
        if (k == "constant") {
            shape = Constant{detail::number(prm, "value", "constant segment")};
        } else if (k == "linear") {
            shape = Linear{detail::number(prm, "left", "linear segment"), detail::number(prm, "right", "linear segment")};
        } else if (k == "sinusoid") {
            shape = Sinusoid{detail::number(prm, "amplitude", "sinusoid segment"),
                             detail::number(prm, "omega", "sinusoid segment"),
                             detail::number(prm, "phase", "sinusoid segment"),
                             detail::number(prm, "offset", "sinusoid segment")};
        } else {
            throw DomainError("segment: unknown kind \"" + k + "\"");
        }
        segs.push_back(Segment{start, end, shape});
        start = end;
    }
    if (std::abs(segs.back().end - L) > 1e-12 * L) throw DomainError("weight: last segment must end at L");
    segs.back().end = L;
    return PiecewiseWeight(std::move(segs));
}

struct KRange {
    int first = 1;
    int last = 1;
};

/// "a..b" or "a".
inline KRange parse_k_range(const std::string& s) {
    auto read = [&](std::string_view t) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size()) throw DomainError("k range: cannot parse \"" + s + "\"");
        return v;
    };
    KRange r;
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        r.first = r.last = read(s);
    } else {
        r.first = read(std::string_view(s).substr(0, dots));
        r.last = read(std::string_view(s).substr(dots + 2));
    }
    if (r.first < 1 || r.last < r.first) throw DomainError("k range: need 1 <= a <= b, got \"" + s + "\"");
    return r;
}

/// Everything a command can read from a problem file. Only p, L, a and rho are required;
/// m and n are used by the beam command.
struct ProblemFile {
    double p = 2.0;
    double L = 1.0;
    PiecewiseWeight a;
    PiecewiseWeight rho;
    std::optional<KRange> k;
    std::optional<int> m;
    std::optional<int> n;

    ProblemSpec spec() const { return make_problem(p, a, rho); }
};

inline ProblemFile problem_from_json(const json& j) {
    if (!j.is_object()) throw DomainError("problem: expected a JSON object");
    ProblemFile out;
    out.p = j.contains("p") ? detail::number(j, "p", "problem") : 2.0;
    PExponent check(out.p);
    std::optional<double> L;
    if (j.contains("L")) {
        L = detail::number(j, "L", "problem");
    } else if (j.contains("rho") && j["rho"].is_object()) {
        L = detail::number(j["rho"], "L", "rho");
    }
    if (!L || !(*L > 0.0) || !std::isfinite(*L)) throw DomainError("problem: \"L\" must be a positive number");
    out.L = *L;
    if (!j.contains("rho")) throw DomainError("problem: missing \"rho\"");
    out.rho = weight_from_json(j["rho"], out.L);
    out.a = j.contains("a") ? weight_from_json(j["a"], out.L) : PiecewiseWeight::constant(out.L, 1.0);
    if (j.contains("k")) {
        const json& k = j["k"];
        if (k.is_number_integer()) {
            out.k = KRange{k.get<int>(), k.get<int>()};
        } else if (k.is_array() && k.size() == 2 && k[0].is_number_integer() && k[1].is_number_integer()) {
            out.k = KRange{k[0].get<int>(), k[1].get<int>()};
        } else if (k.is_string()) {
            out.k = parse_k_range(k.get<std::string>());
        } else {
            throw DomainError("problem: \"k\" must be an integer, [a, b] or \"a..b\"");
        }
        if (out.k->first < 1 || out.k->last < out.k->first) throw DomainError("problem: invalid \"k\" range");
    }
    if (j.contains("m")) {
        if (!j["m"].is_number_integer()) throw DomainError("problem: \"m\" must be an integer");
        out.m = j["m"].get<int>();
    }
    if (j.contains("n")) {
        if (!j["n"].is_number_integer()) throw DomainError("problem: \"n\" must be an integer");
        out.n = j["n"].get<int>();
    }
    return out;
}

inline json to_json(const ProblemFile& f) {
    json j{{"p", f.p}, {"L", f.L}, {"a", to_json(f.a)}, {"rho", to_json(f.rho)}};
    if (f.k) j["k"] = json::array({f.k->first, f.k->last});
    if (f.m) j["m"] = *f.m;
    if (f.n) j["n"] = *f.n;
    return j;
}

/// Two-space indented dump with sorted keys and a trailing newline.
inline std::string canonical(const json& j) { return j.dump(2) + "\n"; }

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + path + "\" for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError("\"" + path + "\" is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open \"" + path + "\" for writing");
    out << text;
    if (!out.flush()) throw IoError("write to \"" + path + "\" failed");
}

inline json to_json(const BoundReport& r) {
    json inputs = json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    return json{{"kind", to_string(r.kind)},
                {"lhs", r.lhs},
                {"rhs", r.rhs},
                {"slack", r.slack},
                {"relative_slack", r.relative_slack()},
                {"satisfied", r.satisfied},
                {"verdict", r.verdict()},
                {"inputs", std::move(inputs)}};
}

inline json to_json(const EigenPair& e, bool with_samples = true) {
    json j{{"k", e.k},
           {"sign", to_string(e.sign)},
           {"lambda", e.lambda},
           {"nodal_count", e.nodal_count},
           {"zeros", e.zeros},
           {"terminal_residual", e.terminal_residual},
           {"two_sided", e.two_sided},
           {"ivp_solves", e.ivp_solves}};
    if (e.two_sided) j["matching_point"] = e.matching_point;
    if (with_samples) {
        json s = json::array();
        for (const auto& smp : e.samples) s.push_back(json::array({smp.x, smp.u}));
        j["samples"] = std::move(s);
    }
    return j;
}

inline json to_json(const LadderSummary& l) {
    return json{{"k", l.k},
                {"sign", to_string(l.sign)},
                {"expected", to_string(l.expected)},
                {"observed", l.observed},
                {"limit", l.limit},
                {"rate", l.rate},
                {"final_relative_error", l.final_relative_error},
                {"monotone_tail", l.monotone_tail},
                {"consistent", l.consistent}};
}

inline json to_json(const SweepRow& r) {
    json j{{"epsilon", r.epsilon},
           {"k", r.k},
           {"sign", to_string(r.sign)},
           {"lambda", r.lambda},
           {"lower_bound", r.lower_bound},
           {"upper_bound", r.upper_bound},
           {"printed_upper_bound", r.printed_upper_bound},
           {"minmax_upper_bound", r.minmax_upper_bound},
           {"limit", r.limit},
           {"abs_error", r.abs_error}};
    if (r.failed) j["error"] = r.error;
    return j;
}

/// The summary: problem constants and per-ladder classification.
inline json summary_json(const SweepResult& s) {
    json ladders = json::array();
    for (const auto& l : s.ladders) ladders.push_back(to_json(l));
    return json{{"p", s.p}, {"L", s.L}, {"mean", s.mean}, {"a_star", s.a_star},
                {"a_l1", s.a_l1}, {"ramp", s.ramp}, {"ladders", std::move(ladders)}};
}

inline json to_json(const SweepResult& s) {
    json j = summary_json(s);
    json rows = json::array();
    for (const auto& r : s.rows) rows.push_back(to_json(r));
    j["rows"] = std::move(rows);
    return j;
}

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Comma-separated table with a column-name line. An optional leading
/// "# ..." metadata line carries the command name and a UTC timestamp.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    CsvWriter& cell(double v) { return text(format_double(v)); }
    CsvWriter& cell(int v) { return text(std::to_string(v)); }
    CsvWriter& cell(bool v) { return text(v ? "true" : "false"); }
    CsvWriter& cell(const char* v) { return text(v); }
    CsvWriter& cell(const std::string& v) { return text(v); }

    void end_row() {
        if (current_.size() != columns_.size()) throw DomainError("csv: row width differs from the header");
        rows_.push_back(std::move(current_));
        current_.clear();
    }

    std::string str(const std::string& metadata = {}) const {
        std::string out;
        if (!metadata.empty()) out += "# " + metadata + "\n";
        append_line(out, columns_);
        for (const auto& r : rows_) append_line(out, r);
        return out;
    }

private:
    CsvWriter& text(std::string s) {
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            s = q + "\"";
        }
        current_.push_back(std::move(s));
        return *this;
    }

    static void append_line(std::string& out, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    }

    std::vector<std::string> columns_;
    std::vector<std::string> current_;
    std::vector<std::vector<std::string>> rows_;
};

/// "plyap <command> <UTC timestamp>".
inline std::string metadata_line(const std::string& command) {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return "plyap " + command + " " + buf;
}

inline std::string sweep_csv(const SweepResult& s, const std::string& metadata = {}) {
    CsvWriter w({"epsilon", "k", "sign", "lambda", "lower_bound", "upper_bound", "limit", "abs_error"});
    for (const auto& r : s.rows) {
        w.cell(r.epsilon).cell(r.k).cell(to_string(r.sign)).cell(r.lambda).cell(r.lower_bound);
        w.cell(r.upper_bound).cell(r.limit).cell(r.abs_error).end_row();
    }
    return w.str(metadata);
}

} // namespace plyap::io
