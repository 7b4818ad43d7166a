// plyap: eigenvalues, Lyapunov-type bounds, homogenization sweeps and beam checks
// from JSON problem files.
//
//   plyap solve --input problem.json --k 1..3
//   plyap bounds --input problem.json --k 1..2 --format json
//   plyap homogenize --input period.json --eps 0.25,0.125,0.0625 --output sweep.csv
//   plyap beam --input beam.json
//   plyap ptrig --p 1.5,2,3
//
// Exit status: 0 success, 1 invalid input or domain error, 2 solver did not
// converge, 3 file could not be read or written.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "plyap/plyap.hpp"

namespace {

using plyap::io::json;

struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    std::string k;
    std::string sign;
    std::vector<double> eps;
    double tol = 0.0; ///< 0: module default
    std::string format = "csv";
    bool no_header = false;
    std::vector<double> p_list{1.2, 1.5, 2.0, 3.0, 5.0, 10.0};
    std::optional<int> m;
    std::optional<int> n;
    unsigned threads = 0;
};

struct Loaded {
    json raw;
    plyap::io::ProblemFile file;
};

// Set as soon as the input is parsed so errors can echo it.
std::string echoed_input;

Loaded load(const std::string& path) {
    Loaded l;
    l.raw = plyap::io::read_json_file(path);
    echoed_input = l.raw.dump();
    l.file = plyap::io::problem_from_json(l.raw);
    spdlog::info("loaded {}: p = {}, L = {}, {} coefficient / {} weight segments", path, l.file.p, l.file.L,
                 l.file.a.size(), l.file.rho.size());
    return l;
}

std::vector<plyap::Sign> signs_of(const std::string& s) {
    if (s == "+" || s == "plus") return {plyap::Sign::plus};
    if (s == "-" || s == "minus") return {plyap::Sign::minus};
    if (s == "both") return {plyap::Sign::plus, plyap::Sign::minus};
    throw plyap::DomainError("--sign must be +, - or both, got \"" + s + "\"");
}

plyap::io::KRange k_range(const RunConfig& cfg, const plyap::io::ProblemFile& f) {
    if (!cfg.k.empty()) return plyap::io::parse_k_range(cfg.k);
    if (f.k) return *f.k;
    return {1, 1};
}

plyap::ShootingOptions shooting_options(const RunConfig& cfg) {
    plyap::ShootingOptions o;
    o.tol = cfg.tol;
    return o;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::cout << text << std::flush;
    } else {
        plyap::io::write_text_file(cfg.output, text);
        spdlog::info("wrote {}", cfg.output);
    }
}

std::string metadata(const RunConfig& cfg) { return cfg.no_header ? std::string() : plyap::io::metadata_line(cfg.command); }

int cmd_solve(const RunConfig& cfg) {
    const auto l = load(cfg.input);
    const auto spec = l.file.spec();
    const auto ks = k_range(cfg, l.file);
    const auto opt = shooting_options(cfg);

    std::vector<plyap::EigenPair> pairs;
    for (auto sign : signs_of(cfg.sign.empty() ? "+" : cfg.sign)) {
        for (int k = ks.first; k <= ks.last; ++k) {
            pairs.push_back(plyap::eigenvalue(spec, k, sign, opt));
            spdlog::debug("k = {} sign {}: lambda = {} ({} solves)", k, plyap::to_string(sign), pairs.back().lambda,
                          pairs.back().ivp_solves);
        }
    }
    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& e : pairs) arr.push_back(plyap::io::to_json(e));
        emit(cfg, plyap::io::canonical(json{{"problem", plyap::io::to_json(l.file)}, {"eigenpairs", arr}}));
        return 0;
    }
    plyap::io::CsvWriter w({"k", "sign", "lambda", "nodal_count", "terminal_residual", "two_sided", "ivp_solves"});
    for (const auto& e : pairs) {
        w.cell(e.k).cell(plyap::to_string(e.sign)).cell(e.lambda).cell(e.nodal_count);
        w.cell(e.terminal_residual).cell(e.two_sided).cell(e.ivp_solves).end_row();
    }
    emit(cfg, w.str(metadata(cfg)));
    return 0;
}

struct BoundRow {
    std::optional<int> k;
    std::optional<plyap::Sign> sign;
    double lambda = 0.0;
    plyap::BoundReport report;
};

int cmd_bounds(const RunConfig& cfg) {
    const auto l = load(cfg.input);
    const auto spec = l.file.spec();
    const auto ks = k_range(cfg, l.file);
    const auto opt = shooting_options(cfg);
    const bool unit_a = spec.a.is_constant(1.0);

    std::vector<BoundRow> rows;
    rows.push_back({std::nullopt, std::nullopt, 0.0, plyap::bound_lyapi(spec)});
    if (unit_a) {
        auto [left, right] = plyap::bounds_harris_kong(spec);
        rows.push_back({std::nullopt, std::nullopt, 0.0, left});
        rows.push_back({std::nullopt, std::nullopt, 0.0, right});
    }
    for (auto sign : signs_of(cfg.sign.empty() ? "+" : cfg.sign)) {
        for (int k = ks.first; k <= ks.last; ++k) {
            const auto e = plyap::eigenvalue(spec, k, sign, opt);
            rows.push_back({k, sign, e.lambda, plyap::bound_lyapu(spec, k, e.lambda)});
            if (unit_a) rows.push_back({k, sign, e.lambda, plyap::bound_classical(spec, k, e.lambda)});
            for (std::size_t i = 0; i + 1 < e.zeros.size(); ++i)
                rows.push_back({k, sign, e.lambda, plyap::bound_lyapi_on(spec, e.zeros[i], e.zeros[i + 1], e.lambda)});
        }
    }
    if (!unit_a) spdlog::info("coefficient is not 1: classical and mixed-condition bounds skipped");

    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            json j = plyap::io::to_json(r.report);
            if (r.k) j["k"] = *r.k;
            if (r.sign) j["sign"] = plyap::to_string(*r.sign);
            if (r.k) j["lambda"] = r.lambda;
            arr.push_back(std::move(j));
        }
        emit(cfg, plyap::io::canonical(json{{"problem", plyap::io::to_json(l.file)}, {"reports", arr}}));
        return 0;
    }
    plyap::io::CsvWriter w({"kind", "k", "sign", "lambda", "lhs", "rhs", "slack", "relative_slack", "satisfied"});
    for (const auto& r : rows) {
        w.cell(plyap::to_string(r.report.kind));
        if (r.k) {
            w.cell(*r.k).cell(plyap::to_string(*r.sign)).cell(r.lambda);
        } else {
            w.cell("").cell("").cell("");
        }
        w.cell(r.report.lhs).cell(r.report.rhs).cell(r.report.slack).cell(r.report.relative_slack());
        w.cell(r.report.satisfied).end_row();
    }
    emit(cfg, w.str(metadata(cfg)));
    return 0;
}

int cmd_homogenize(const RunConfig& cfg) {
    const auto l = load(cfg.input);
    plyap::SweepConfig sc(l.file.spec());
    if (!cfg.eps.empty()) sc.epsilons = cfg.eps;
    const auto ks = k_range(cfg, l.file);
    sc.k_list.clear();
    for (int k = ks.first; k <= ks.last; ++k) sc.k_list.push_back(k);
    const std::string sign = cfg.sign.empty() ? "both" : cfg.sign;
    if (sign == "both") sc.sign = plyap::SignSelection::both;
    else sc.sign = signs_of(sign).front() == plyap::Sign::plus ? plyap::SignSelection::plus : plyap::SignSelection::minus;
    sc.shooting = shooting_options(cfg);
    sc.threads = cfg.threads;

    const auto result = plyap::sweep(sc);
    for (const auto& lad : result.ladders)
        spdlog::info("k = {} sign {}: expected {}, observed {}, rate {}", lad.k, plyap::to_string(lad.sign),
                     plyap::to_string(lad.expected), lad.observed, lad.rate);

    if (cfg.format == "json") {
        emit(cfg, plyap::io::canonical(plyap::io::to_json(result)));
    } else {
        emit(cfg, plyap::io::sweep_csv(result, metadata(cfg)));
        if (!cfg.output.empty()) {
            auto summary = std::filesystem::path(cfg.output).replace_extension(".summary.json").string();
            plyap::io::write_text_file(summary, plyap::io::canonical(plyap::io::summary_json(result)));
            spdlog::info("wrote {}", summary);
        }
    }
    int failed = 0;
    for (const auto& r : result.rows) {
        if (!r.failed) continue;
        ++failed;
        std::cerr << "plyap: row eps = " << r.epsilon << ", k = " << r.k << ", sign " << plyap::to_string(r.sign)
                  << " failed: " << r.error << "\n";
    }
    return failed ? 2 : 0;
}

int cmd_beam(const RunConfig& cfg) {
    plyap::BeamProblem bp;
    if (!cfg.input.empty()) {
        const auto l = load(cfg.input);
        if (!l.file.a.is_constant(1.0)) throw plyap::UnsupportedCoefficient("beam: only a = 1 is supported");
        bp.L = l.file.L;
        bp.rho = l.file.rho;
        if (l.file.m) bp.m = *l.file.m;
        if (l.file.n) bp.n = *l.file.n;
    } else {
        bp.rho = plyap::PiecewiseWeight::constant(bp.L, 1.0);
    }
    if (cfg.m) bp.m = *cfg.m;
    if (cfg.n) bp.n = *cfg.n;
    bp.validate();

    const auto eig = plyap::smallest_positive_eigenvalue(plyap::assemble(bp));
    spdlog::info("beam m = {}, n = {}: lambda_1 = {}", bp.m, bp.n, eig.lambda);
    std::vector<plyap::BoundReport> reports;
    if (bp.m >= 2) {
        reports.push_back(plyap::verify_lyapi2(bp, eig.lambda));
        if (bp.rho.min_value() >= 0.0) {
            auto dv = plyap::das_vatsala_report(bp.m, bp.rho.scaled(eig.lambda));
            reports.push_back(std::move(dv));
        }
    }

    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& r : reports) arr.push_back(plyap::io::to_json(r));
        json j{{"m", bp.m}, {"n", bp.n}, {"L", bp.L}, {"lambda", eig.lambda}, {"reports", arr}};
        json u = json::array();
        for (std::size_t i = 0; i < eig.u.size(); ++i) u.push_back(json::array({eig.nodes[i], eig.u[i]}));
        j["eigenvector"] = std::move(u);
        emit(cfg, plyap::io::canonical(j));
        return 0;
    }
    plyap::io::CsvWriter w({"kind", "m", "n", "lambda", "lhs", "rhs", "slack", "satisfied"});
    if (reports.empty()) {
        w.cell("eigenvalue").cell(bp.m).cell(bp.n).cell(eig.lambda).cell("").cell("").cell("").cell("").end_row();
    }
    for (const auto& r : reports) {
        w.cell(plyap::to_string(r.kind)).cell(bp.m).cell(bp.n).cell(eig.lambda);
        w.cell(r.lhs).cell(r.rhs).cell(r.slack).cell(r.satisfied).end_row();
    }
    emit(cfg, w.str(metadata(cfg)));
    return 0;
}

int cmd_ptrig(const RunConfig& cfg) {
    static const std::vector<double> s_grid{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
    json arr = json::array();
    plyap::io::CsvWriter w({"p", "pi_p", "pi_p_closed_form", "s", "phi_p"});
    for (double p : cfg.p_list) {
        const double quad = plyap::pi_p(p);
        const double closed = plyap::pi_p_closed_form(p);
        json samples = json::array();
        for (double s : s_grid) {
            const double v = plyap::phi_p(s, p);
            w.cell(p).cell(quad).cell(closed).cell(s).cell(v).end_row();
            samples.push_back(json::array({s, v}));
        }
        arr.push_back(json{{"p", p}, {"pi_p", quad}, {"pi_p_closed_form", closed}, {"phi_p", samples}});
    }
    if (cfg.format == "json") emit(cfg, plyap::io::canonical(json{{"ptrig", arr}}));
    else emit(cfg, w.str(metadata(cfg)));
    return 0;
}

void validate(const RunConfig& cfg) {
    if (cfg.tol != 0.0 && !(cfg.tol > 0.0 && cfg.tol <= 1e-2))
        throw plyap::DomainError("--tol must lie in (0, 1e-2], got " + plyap::io::format_double(cfg.tol));
    if (cfg.format != "csv" && cfg.format != "json")
        throw plyap::DomainError("--format must be csv or json, got \"" + cfg.format + "\"");
    if (cfg.command != "ptrig" && cfg.command != "beam" && cfg.input.empty())
        throw plyap::DomainError(cfg.command + " needs --input");
    if (!cfg.input.empty() && !std::filesystem::exists(cfg.input))
        throw plyap::IoError("input file \"" + cfg.input + "\" does not exist");
}

int dispatch(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.command == "solve") return cmd_solve(cfg);
    if (cfg.command == "bounds") return cmd_bounds(cfg);
    if (cfg.command == "homogenize") return cmd_homogenize(cfg);
    if (cfg.command == "beam") return cmd_beam(cfg);
    return cmd_ptrig(cfg);
}

int report_error(const RunConfig& cfg, const std::exception& e, int code) {
    std::cerr << "plyap " << cfg.command << ": error: " << e.what() << "\n";
    if (!cfg.input.empty()) std::cerr << "  input file: " << cfg.input << "\n";
    if (!echoed_input.empty()) std::cerr << "  input: " << echoed_input.substr(0, 4000) << "\n";
    return code;
}

int run(const RunConfig& cfg) {
    try {
        return dispatch(cfg);
    } catch (const plyap::IoError& e) {
        return report_error(cfg, e, 3);
    } catch (const plyap::DomainError& e) {
        return report_error(cfg, e, 1);
    } catch (const plyap::Error& e) {
        // search, integration, degenerate quotient, exhausted budgets
        return report_error(cfg, e, 2);
    } catch (const json::exception& e) {
        return report_error(cfg, e, 1);
    }
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("plyap");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::err);
    const char* env = std::getenv("PLYAP_LOG");
    if (!env) return;
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::error("PLYAP_LOG must be error, info or debug; got \"{}\"", level);
}

} // namespace

int main(int argc, char** argv) {
    configure_logging();
    RunConfig cfg;
    CLI::App app{"Eigenvalues and Lyapunov-type inequalities for the weighted one-dimensional p-Laplacian"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "problem JSON");
        sub->add_option("--output", cfg.output, "output path (default: stdout)");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--no-header", cfg.no_header, "omit the metadata line of CSV output");
        sub->add_option("--tol", cfg.tol, "integrator tolerance in (0, 1e-2]; default depends on p");
    };
    auto ladder = [&](CLI::App* sub) {
        sub->add_option("--k", cfg.k, "index range a..b");
        sub->add_option("--sign", cfg.sign, "+, - or both");
    };

    auto* solve = app.add_subcommand("solve", "eigenvalues lambda_k by shooting");
    common(solve);
    ladder(solve);
    auto* bounds = app.add_subcommand("bounds", "Lyapunov-type bounds for the problem and its eigenvalues");
    common(bounds);
    ladder(bounds);
    auto* homog = app.add_subcommand("homogenize", "epsilon sweep of the periodically rescaled problem");
    common(homog);
    ladder(homog);
    homog->add_option("--eps", cfg.eps, "decreasing epsilon list")->delimiter(',');
    homog->add_option("--threads", cfg.threads, "worker threads (0: hardware concurrency)");
    auto* beam = app.add_subcommand("beam", "clamped order-2m problem, p = 2");
    common(beam);
    beam->add_option("--m", cfg.m, "half order m");
    beam->add_option("--n", cfg.n, "interior mesh nodes");
    auto* ptrig = app.add_subcommand("ptrig", "pi_p and phi_p samples");
    common(ptrig);
    ptrig->add_option("--p", cfg.p_list, "exponent list")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return run(cfg);
}
