#pragma once

#include "fdxlab/config.hpp"
#include "fdxlab/csv.hpp"
#include "fdxlab/experiments.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/gronwall.hpp"
#include "fdxlab/parallel.hpp"
#include "fdxlab/solver.hpp"
#include "fdxlab/trace_estimator.hpp"
#include "fdxlab/ulmorrey.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fdxlab::cli {

enum ExitCode { kOk = 0, kDomain = 1, kUsage = 2 };

/// `--out` naming: empty → `<sub>-<timestamp>.csv` in the working
/// directory; a path ending in `.csv` is used as is; anything else is a
/// directory that receives `<sub>-<timestamp>.csv`.
inline std::filesystem::path output_path(const std::string& out, const std::string& sub) {
    namespace fs = std::filesystem;
    if (out.size() >= 4 && out.compare(out.size() - 4, 4, ".csv") == 0) {
        const fs::path p(out);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        return p;
    }
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    fs::create_directories(dir);
    return dir / (sub + "-" + stamp + ".csv");
}

namespace detail {

inline int run_exponents(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const ProblemParams& P = *cfg.params;
    const Exponents ex = derive_exponents(P);
    const Regime regime = classify_regime(P);
    out << "p_m=" << format_double(ex.p_m) << "\ntheta=" << format_double(ex.theta)
        << "\ntheta_prime=" << format_double(ex.theta_prime) << "\nkappa=" << format_double(ex.kappa)
        << "\nregime=" << to_string(regime) << '\n';
    CsvWriter w(csv);
    w.header({"N", "m", "p", "p_m", "theta", "theta_prime", "kappa", "scaling_exponent", "regime"});
    w.row_text({std::to_string(P.N()), format_double(P.m()), format_double(P.p()), format_double(ex.p_m),
                format_double(ex.theta), format_double(ex.theta_prime), format_double(ex.kappa),
                format_double(scaling_exponent(P)), std::string(to_string(regime))});
    w.status("ok");
    return kOk;
}

inline int run_norms(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const ProblemParams& P = *cfg.params;
    const RadialProfile f = cfg.profile.build(P);
    const auto& n = cfg.norm;
    if (n.kind == "condition") {
        const Regime regime = classify_regime(P);
        double ba = n.alpha;
        if (regime == Regime::Supercritical) {
            const OpenInterval range = admissible_beta_range(P);
            ba = n.beta.value_or(0.5 * (range.lo + range.hi));
        }
        const auto v = check_condition(P, f, n.T, n.delta, ba, n.scan);
        out << "regime=" << to_string(v.regime) << " value=" << format_double(v.condition_value)
            << " delta=" << format_double(v.delta) << " met=" << (v.met ? "true" : "false") << '\n';
        CsvWriter w(csv);
        w.header({"regime", "condition_value", "delta", "met", "T", "exponent", "center", "radius"});
        w.row_text({std::string(to_string(v.regime)), format_double(v.condition_value), format_double(v.delta),
                    v.met ? "1" : "0", format_double(v.T_used), format_double(ba), format_double(v.detail.arg_center),
                    format_double(v.detail.arg_radius)});
        w.comment("grid", v.detail.grid_resolution);
        w.status("ok");
        return kOk;
    }
    const NormSpec spec = n.kind == "morrey" ? NormSpec::morrey(n.q, n.alpha, n.R) : NormSpec::orlicz_eta(P, n.alpha, n.T);
    const NormResult res = norm(f, spec, n.scan);
    out << "value=" << format_double(res.value) << " center=" << format_double(res.arg_center)
        << " radius=" << format_double(res.arg_radius) << '\n';
    write_norm_csv(csv, {res});
    return kOk;
}

inline int run_simulate(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const auto tr = simulate(cfg.profile.build(*cfg.params), *cfg.solver, cfg.probes);
    write_trace_csv(csv, tr);
    out << tr.status.str() << " steps=" << tr.steps << '\n';
    return kOk;
}

inline int run_threshold(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const ProblemParams P = *cfg.params;
    const config::ProfileSpec spec = cfg.profile;
    const ProfileFamily family = [P, spec](double c) { return spec.build(P, c); };
    const auto res =
        threshold_sweep(*cfg.solver, family, cfg.threshold.horizon, cfg.threshold.bisect_steps, cfg.threshold.options);
    out << "bracket=[" << format_double(res.c_low) << ", " << format_double(res.c_high) << "]"
        << " consistent=" << (res.labels_consistent() ? "true" : "false") << '\n';
    std::ostringstream hash;
    hash << std::hex << res.config_hash;
    write_manifest_csv(csv, res.history,
                       {{"bracket", format_double(res.c_low) + " " + format_double(res.c_high)},
                        {"initial_bracket", format_double(res.c_init_low) + " " + format_double(res.c_init_high)},
                        {"horizon", format_double(res.horizon)},
                        {"labels_consistent", res.labels_consistent() ? "true" : "false"},
                        {"config_hash", hash.str()}},
                       "ok");
    return kOk;
}

inline int run_decay(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const ProblemParams& P = *cfg.params;
    const SolverConfig& sc = *cfg.solver;
    const auto tr = simulate(cfg.profile.build(P), sc, cfg.probes);
    DecayFitOptions opt;
    opt.time_offset = cfg.decay.time_offset;
    opt.T = cfg.decay.T;
    const double t0 = cfg.decay.t0.value_or(0.01 * sc.t_end);
    const double t1 = cfg.decay.t1.value_or(sc.t_end);
    const auto fit = decay_fit(tr, P, t0, t1, opt);
    out << "slope=" << format_double(fit.slope) << " points=" << fit.points << '\n';
    CsvWriter w(csv);
    w.header({"slope", "points", "proxy_max", "log_corrected", "t0", "t1"});
    w.row({fit.slope, static_cast<double>(fit.points), fit.proxy_max,
           fit.log_corrected.value_or(std::numeric_limits<double>::quiet_NaN()), t0, t1});
    w.comment("trace", tr.status.str());
    w.status("ok");
    return kOk;
}

inline int run_trace(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const ProblemParams& P = *cfg.params;
    SolverTrace tr;
    if (!cfg.trace.input.empty()) {
        std::ifstream in(cfg.trace.input);
        if (!in) throw DomainError("cannot read trace file " + cfg.trace.input);
        tr = read_trace_csv(in);
    } else {
        tr = simulate(cfg.profile.build(P), *cfg.solver, cfg.probes);
    }
    const std::vector<double> radii = cfg.trace.radii.empty() ? tr.probes : cfg.trace.radii;
    TraceOptions opt;
    opt.t_max = cfg.trace.t_max;
    const auto est = estimate_trace(tr, radii, opt);
    std::optional<TraceFit> fit;
    std::string skipped;
    try {
        fit = fit_trace_bounds(est, P, cfg.trace.T);
    } catch (const DomainError& e) {
        skipped = e.what();
    }
    if (fit) out << "slope=" << format_double(fit->slope) << " expected=" << format_double(fit->expected_slope) << '\n';
    else out << "fit skipped: " << skipped << '\n';
    write_trace_estimate_csv(csv, est, fit, fit ? "ok" : "ok (fit skipped: " + skipped + ")");
    return kOk;
}

inline int run_gronwall(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const auto& g = cfg.gronwall;
    const auto draws = gronwall_random_check(cfg.seed, g.draws, g.n_steps, g.rel_tol);
    CsvWriter w(csv);
    w.header({"A1", "A2", "A3", "m", "T", "max_relative_gap", "pass"});
    std::size_t passed = 0;
    for (const auto& d : draws) {
        w.row({d.coeffs.A1, d.coeffs.A2, d.coeffs.A3, d.coeffs.m, d.coeffs.T, d.report.max_relative_gap,
               d.pass ? 1.0 : 0.0});
        passed += d.pass;
    }
    const std::string summary = std::to_string(passed) + "/" + std::to_string(draws.size());
    w.comment("seed", std::to_string(cfg.seed));
    w.status((passed == draws.size() ? "pass " : "fail ") + summary);
    out << (passed == draws.size() ? "pass " : "fail ") << summary << " seed=" << cfg.seed << '\n';
    return passed == draws.size() ? kOk : kDomain;
}

} // namespace detail

/// Runs one validated configuration, writing the CSV to `csv` and a short
/// summary to `out`.
inline int dispatch(const config::RunConfig& cfg, std::ostream& csv, std::ostream& out) {
    const std::string& s = cfg.subcommand;
    if (s == "exponents") return detail::run_exponents(cfg, csv, out);
    if (s == "norms") return detail::run_norms(cfg, csv, out);
    if (s == "simulate") return detail::run_simulate(cfg, csv, out);
    if (s == "threshold") return detail::run_threshold(cfg, csv, out);
    if (s == "decay") return detail::run_decay(cfg, csv, out);
    if (s == "trace") return detail::run_trace(cfg, csv, out);
    if (s == "gronwall-check") return detail::run_gronwall(cfg, csv, out);
    throw ConfigError({"unknown subcommand `" + s + "`"});
}

/// Full command line: fdxlab <subcommand> [--config path] [--set key=value]...
/// [--out path] [--seed n] [--threads n]. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Radial fast-diffusion/source experiments", "fdxlab"};
    std::string sub, config_path, out_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string names;
    for (const auto& n : config::subcommands()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("subcommand", sub, "one of: " + names);
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--set", sets, "override one key (key=value); repeatable");
    app.add_option("--out", out_path, "output directory, or a file name ending in .csv");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--threads", threads, "worker threads (default: FDXLAB_THREADS or all cores)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    config::RunConfig cfg;
    try {
        config::KeyValues kv;
        std::vector<std::string> errors;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError({"cannot read config file " + config_path});
            config::parse_lines(in, config_path, kv, errors);
        }
        for (const auto& s : sets) config::apply_override(s, kv, errors);
        if (seed) kv["seed"] = {std::to_string(*seed), "--seed"};
        if (threads) kv["threads"] = {std::to_string(*threads), "--threads"};
        if (!out_path.empty()) kv["out"] = {out_path, "--out"};
        if (!errors.empty()) throw ConfigError(std::move(errors));
        cfg = config::parse_config(kv, sub);
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) err << "config error: " << p << '\n';
        if (sub.empty()) err << app.help();
        return kUsage;
    }

    struct ThreadScope {
        unsigned saved = fdxlab::detail::thread_override().load();
        ~ThreadScope() { set_thread_count(saved); }
    } scope;
    if (cfg.threads > 0) set_thread_count(cfg.threads);
    try {
        std::ostringstream csv;
        const int code = dispatch(cfg, csv, out);
        const auto path = output_path(cfg.out, cfg.subcommand);
        std::ofstream file(path, std::ios::binary);
        if (!file) throw DomainError("cannot write " + path.string());
        file << csv.str();
        out << "wrote " << path.string() << '\n';
        return code;
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) err << "config error: " << p << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDomain;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kDomain;
    }
}

} // namespace fdxlab::cli
