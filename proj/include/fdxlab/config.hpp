#pragma once

#include "fdxlab/error.hpp"
#include "fdxlab/experiments.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/profiles.hpp"
#include "fdxlab/solver.hpp"
#include "fdxlab/ulmorrey.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fdxlab::config {

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"exponents", "norms",  "simulate",      "threshold",
                                                "decay",     "trace", "gronwall-check"};
    return names;
}

/// One `key = value` entry with where it came from.
struct Entry {
    std::string value;
    std::string origin; ///< "file:line" or "--set"
};

using KeyValues = std::map<std::string, Entry>;

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Parses `key = value` lines; `#` starts a comment. Syntax problems and
/// duplicate keys are appended to `errors`.
inline void parse_lines(std::istream& is, const std::string& source, KeyValues& out, std::vector<std::string>& errors) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + ": expected `key = value`");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            errors.push_back(where + ": empty key");
            continue;
        }
        if (value.empty()) {
            errors.push_back(where + ": key `" + key + "` has no value");
            continue;
        }
        if (out.count(key)) {
            errors.push_back(where + ": duplicate key `" + key + "` (first at " + out[key].origin + ")");
            continue;
        }
        out[key] = {value, where};
    }
}

/// `key=value` from the command line; overrides file entries.
inline void apply_override(const std::string& kv, KeyValues& out, std::vector<std::string>& errors) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || trim(kv.substr(0, eq)).empty() || trim(kv.substr(eq + 1)).empty()) {
        errors.push_back("--set " + kv + ": expected key=value");
        return;
    }
    out[trim(kv.substr(0, eq))] = {trim(kv.substr(eq + 1)), "--set"};
}

struct ProfileSpec {
    std::string kind = "power"; ///< constant, zero, power, sharp, critical, barenblatt
    double c = 0.1;
    std::optional<double> a;    ///< power exponent; default 2/(p-m)
    double C_B = 1.0;
    double t0 = 1.0;

    RadialProfile build(const ProblemParams& P, double coeff) const {
        const int N = P.N();
        if (kind == "constant") return RadialProfile::constant(N, coeff);
        if (kind == "zero") return RadialProfile::zero(N);
        if (kind == "power") return RadialProfile::power_law(N, coeff, a.value_or(scaling_exponent(P)));
        if (kind == "sharp") return critical_profile(P, coeff);
        if (kind == "critical") return RadialProfile::critical_log(N, coeff);
        if (kind == "barenblatt") return RadialProfile::barenblatt(N, P.m(), C_B, t0);
        throw DomainError("unknown profile kind " + kind);
    }
    RadialProfile build(const ProblemParams& P) const { return build(P, c); }
};

struct NormOptions {
    std::string kind = "condition"; ///< condition, morrey, orlicz_eta
    double q = 1.0;
    double alpha = 1.0;
    std::optional<double> beta;     ///< default: midpoint of the admissible range
    double R = std::numeric_limits<double>::infinity();
    double T = 1.0;
    double delta = 1.0;
    ScanOptions scan;
};

struct ThresholdConfig {
    double horizon = 1.0;
    int bisect_steps = 8;
    ThresholdOptions options;
};

struct DecayConfig {
    std::optional<double> t0;   ///< default 0.01·t_end
    std::optional<double> t1;   ///< default t_end
    double time_offset = 0.0;
    double T = 1.0;
};

struct TraceConfig {
    std::vector<double> radii;  ///< default: the probe radii
    double t_max = std::numeric_limits<double>::infinity();
    double T = 1.0;
    std::string input;          ///< trace CSV to read instead of simulating
};

struct GronwallConfig {
    int draws = 1000;
    int n_steps = 2000;
    double rel_tol = 1e-8;
};

struct RunConfig {
    std::string subcommand;
    std::optional<ProblemParams> params;
    ProfileSpec profile;
    std::optional<SolverConfig> solver;
    std::vector<double> probes{0.1, 0.5, 1.0};
    NormOptions norm;
    ThresholdConfig threshold;
    DecayConfig decay;
    TraceConfig trace;
    GronwallConfig gronwall;
    std::string out;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

namespace detail {

inline std::optional<double> to_double(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE || std::isnan(v)) return std::nullopt;
    return v;
}

inline std::optional<long long> to_int(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> to_u64(const std::string& s) {
    if (s.empty() || s[0] == '-') return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) return std::nullopt;
    return v;
}

inline std::optional<bool> to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    return std::nullopt;
}

inline std::optional<std::vector<double>> to_list(const std::string& s) {
    std::vector<double> out;
    std::string cell;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            const auto v = to_double(trim(cell));
            if (!v) return std::nullopt;
            out.push_back(*v);
            cell.clear();
        } else {
            cell += s[i];
        }
    }
    return out;
}

// Reads typed values from the key table, recording which keys were used
// and every problem found.
class Reader {
public:
    Reader(const KeyValues& kv, std::vector<std::string>& errors) : kv_(kv), errors_(errors) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    void error(const std::string& key, const std::string& what) {
        const auto it = kv_.find(key);
        errors_.push_back("key `" + key + "`" + (it != kv_.end() ? " (" + it->second.origin + ")" : "") + ": " + what);
    }

    const std::string* raw(const std::string& key) {
        used_.push_back(key);
        const auto it = kv_.find(key);
        return it == kv_.end() ? nullptr : &it->second.value;
    }

    template <class T, class Conv>
    std::optional<T> get(const std::string& key, Conv conv, const char* expected,
                         const std::function<bool(const T&)>& ok = {}, const char* constraint = "") {
        const std::string* s = raw(key);
        if (!s) return std::nullopt;
        const auto v = conv(*s);
        if (!v) {
            error(key, std::string("expected ") + expected + ", got `" + *s + "`");
            return std::nullopt;
        }
        const T val = static_cast<T>(*v);
        if (ok && !ok(val)) {
            error(key, std::string(constraint) + ", got `" + *s + "`");
            return std::nullopt;
        }
        return val;
    }

    void number(const std::string& key, double& dst, const std::function<bool(const double&)>& ok = {},
                const char* constraint = "") {
        if (auto v = get<double>(key, to_double, "a number", ok, constraint)) dst = *v;
    }
    void opt_number(const std::string& key, std::optional<double>& dst,
                    const std::function<bool(const double&)>& ok = {}, const char* constraint = "") {
        if (auto v = get<double>(key, to_double, "a number", ok, constraint)) dst = *v;
    }
    template <class I>
    void integer(const std::string& key, I& dst, long long lo, long long hi, const char* constraint) {
        if (auto v = get<long long>(key, to_int, "an integer",
                                    [&](const long long& x) { return x >= lo && x <= hi; }, constraint))
            dst = static_cast<I>(*v);
    }
    void list(const std::string& key, std::vector<double>& dst, const std::function<bool(const double&)>& ok,
              const char* constraint) {
        const std::string* s = raw(key);
        if (!s) return;
        const auto v = to_list(*s);
        if (!v || v->empty()) {
            error(key, "expected a comma-separated list of numbers, got `" + *s + "`");
            return;
        }
        for (double x : *v)
            if (!ok(x)) {
                error(key, std::string(constraint) + ", got `" + *s + "`");
                return;
            }
        dst = *v;
    }
    void choice(const std::string& key, std::string& dst, const std::vector<std::string>& allowed) {
        const std::string* s = raw(key);
        if (!s) return;
        if (std::find(allowed.begin(), allowed.end(), *s) == allowed.end()) {
            std::string opts;
            for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
            error(key, "must be one of {" + opts + "}, got `" + *s + "`");
            return;
        }
        dst = *s;
    }

    void report_unknown() {
        for (const auto& [k, e] : kv_)
            if (std::find(used_.begin(), used_.end(), k) == used_.end())
                errors_.push_back("unknown key `" + k + "` (" + e.origin + ")");
    }

private:
    const KeyValues& kv_;
    std::vector<std::string>& errors_;
    std::vector<std::string> used_;
};

inline bool positive(const double& x) { return x > 0.0; }
inline bool nonneg(const double& x) { return x >= 0.0; }
inline bool positive_finite(const double& x) { return x > 0.0 && std::isfinite(x); }

} // namespace detail

/// Builds a validated RunConfig. `subcommand` (from the command line) wins
/// over a `subcommand` key. Throws ConfigError listing every problem.
inline RunConfig parse_config(const KeyValues& kv, const std::string& subcommand = "") {
    std::vector<std::string> errors;
    detail::Reader r(kv, errors);
    RunConfig cfg;
    using detail::nonneg;
    using detail::positive;
    using detail::positive_finite;

    std::string sub;
    r.choice("subcommand", sub, subcommands());
    if (!subcommand.empty()) {
        if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
            errors.push_back("unknown subcommand `" + subcommand + "`");
        sub = subcommand;
    }
    cfg.subcommand = sub;
    if (sub.empty()) errors.push_back("missing subcommand");

    // Problem parameters; required except for gronwall-check.
    int N = 1;
    double m = 0.5, p = 3.0;
    const bool needs_params = sub != "gronwall-check";
    bool params_ok = true;
    for (const char* key : {"N", "m", "p"})
        if (needs_params && !r.has(key)) {
            errors.push_back(std::string("missing required key `") + key + "`");
            params_ok = false;
        }
    const std::size_t before = errors.size();
    r.integer("N", N, 1, 1 << 20, "must be >= 1");
    r.number("m", m, [](const double& x) { return x > 0.0 && x < 1.0; }, "must lie in (0,1)");
    r.number("p", p, [](const double& x) { return x > 1.0 && std::isfinite(x); }, "must be > 1");
    params_ok = params_ok && errors.size() == before;
    const ProblemParams P = params_ok ? ProblemParams(N, m, p) : ProblemParams(1, 0.5, 3.0);
    if (params_ok && needs_params) cfg.params = P;

    if (auto s = r.get<std::uint64_t>("seed", detail::to_u64, "an unsigned 64-bit integer")) cfg.seed = *s;
    r.integer("threads", cfg.threads, 0, 4096, "must lie in [0, 4096]");
    if (const auto* o = r.raw("out")) cfg.out = *o;

    // Profile.
    const std::vector<std::string> kinds{"constant", "zero", "power", "sharp", "critical", "barenblatt"};
    if (r.has("profile") && r.has("profile.kind")) errors.push_back("keys `profile` and `profile.kind` both given");
    r.choice("profile", cfg.profile.kind, kinds);
    r.choice("profile.kind", cfg.profile.kind, kinds);
    if (r.has("c") && r.has("profile.c")) errors.push_back("keys `c` and `profile.c` both given");
    r.number("c", cfg.profile.c, positive_finite, "must be finite and > 0");
    r.number("profile.c", cfg.profile.c, positive_finite, "must be finite and > 0");
    r.opt_number("profile.a", cfg.profile.a, nonneg, "must be >= 0");
    r.number("profile.C_B", cfg.profile.C_B, positive_finite, "must be finite and > 0");
    r.number("profile.t0", cfg.profile.t0, positive_finite, "must be finite and > 0");
    if (params_ok && needs_params) {
        try {
            (void)cfg.profile.build(P);
        } catch (const DomainError& e) {
            errors.push_back(std::string("profile: ") + e.what());
        }
    }

    // Solver.
    SolverConfig sc(P);
    r.number("solver.dt_safety", sc.dt_safety);
    r.number("solver.source_cfl", sc.source_cfl);
    r.number("solver.u_blowup", sc.u_blowup);
    r.number("solver.u_floor", sc.u_floor);
    r.number("solver.u_cap", sc.u_cap);
    r.number("solver.t_end", sc.t_end);
    r.number("solver.R_dom", sc.R_dom);
    r.integer("solver.cells", sc.cells, 2, 100000000, "must be >= 2");
    r.integer("solver.n_outputs", sc.n_outputs, 1, 100000000, "must be >= 1");
    r.integer("solver.log_outputs_per_decade", sc.log_outputs_per_decade, 0, 1000, "must lie in [0, 1000]");
    r.number("solver.log_output_t_min", sc.log_output_t_min, nonneg, "must be >= 0");
    r.number("solver.energy_beta", sc.energy_beta);
    r.number("solver.energy_sigma", sc.energy_sigma);
    r.number("solver.moment_r", sc.moment_r);
    if (auto b = r.get<bool>("solver.source_on", detail::to_bool, "true or false")) sc.source_on = *b;
    std::string boundary = "fixed_floor";
    r.choice("solver.boundary", boundary, {"fixed_floor", "zero_flux", "barenblatt"});
    if (boundary == "zero_flux") sc.boundary = Boundary::ZeroFlux;
    if (boundary == "barenblatt") {
        if (cfg.profile.kind != "barenblatt") {
            r.error("solver.boundary", "`barenblatt` needs profile = barenblatt");
        } else {
            sc.boundary = Boundary::Dirichlet;
            const int n = P.N();
            const double mm = P.m(), C_B = cfg.profile.C_B, t0 = cfg.profile.t0;
            sc.dirichlet = [n, mm, C_B, t0](double rr, double t) { return barenblatt_value(n, mm, C_B, t + t0, rr); };
        }
    }
    r.list("solver.probes", cfg.probes, positive, "radii must be > 0");
    if (sub == "trace") {
        // Early-time samples for the t → 0 extrapolation.
        if (!r.has("solver.log_outputs_per_decade")) sc.log_outputs_per_decade = 3;
        if (!r.has("solver.log_output_t_min")) sc.log_output_t_min = 1e-6 * sc.t_end;
    }
    try {
        sc.validate();
    } catch (const ConfigError& e) {
        for (const auto& msg : e.problems()) errors.push_back("solver: " + msg);
    }
    if (params_ok && needs_params) cfg.solver = sc;

    // Norms.
    r.choice("norm.kind", cfg.norm.kind, {"condition", "morrey", "orlicz_eta"});
    r.number("norm.q", cfg.norm.q, [](const double& x) { return x >= 1.0; }, "must be >= 1");
    r.number("norm.alpha", cfg.norm.alpha, positive, "must be > 0");
    r.opt_number("norm.beta", cfg.norm.beta, positive, "must be > 0");
    r.number("norm.R", cfg.norm.R, positive, "must be > 0");
    r.number("norm.T", cfg.norm.T, positive, "must be > 0");
    r.number("norm.delta", cfg.norm.delta, positive, "must be > 0");
    r.integer("norm.per_decade", cfg.norm.scan.per_decade, 1, 10000, "must lie in [1, 10000]");
    r.number("norm.r_min", cfg.norm.scan.r_min, nonneg, "must be >= 0");
    r.number("norm.radius_cap", cfg.norm.scan.radius_cap, positive_finite, "must be finite and > 0");
    if (cfg.norm.kind == "morrey" && cfg.norm.alpha < 1.0) r.error("norm.alpha", "Morrey alpha must be >= 1");

    // Threshold sweep.
    r.number("threshold.horizon", cfg.threshold.horizon, positive_finite, "must be finite and > 0");
    r.integer("threshold.bisect_steps", cfg.threshold.bisect_steps, 4, 60, "must lie in [4, 60]");
    r.number("threshold.c_start", cfg.threshold.options.c_start, positive_finite, "must be finite and > 0");
    r.integer("threshold.max_scans", cfg.threshold.options.max_scans, 2, 40, "must lie in [2, 40]");
    r.integer("threshold.scan_batch", cfg.threshold.options.scan_batch, 1, 64, "must lie in [1, 64]");
    std::string rule = "decay_proxy";
    r.choice("threshold.rule", rule, {"status", "decay_proxy"});
    cfg.threshold.options.rule = rule == "status" ? SurvivalRule::StatusOnly : SurvivalRule::StatusAndDecayProxy;
    cfg.threshold.options.probes = cfg.probes;

    // Decay fit.
    r.opt_number("decay.t0", cfg.decay.t0, positive, "must be > 0");
    r.opt_number("decay.t1", cfg.decay.t1, positive, "must be > 0");
    r.number("decay.time_offset", cfg.decay.time_offset, nonneg, "must be >= 0");
    r.number("decay.T", cfg.decay.T, positive, "must be > 0");

    // Trace estimator.
    r.list("trace.radii", cfg.trace.radii, positive, "radii must be > 0");
    r.number("trace.t_max", cfg.trace.t_max, positive, "must be > 0");
    r.number("trace.T", cfg.trace.T, positive, "must be > 0");
    if (const auto* in = r.raw("trace.input")) cfg.trace.input = *in;

    // Gronwall check.
    r.integer("gronwall.draws", cfg.gronwall.draws, 1, 10000000, "must be >= 1");
    r.integer("gronwall.n_steps", cfg.gronwall.n_steps, 100, 100000000, "must be >= 100");
    r.number("gronwall.rel_tol", cfg.gronwall.rel_tol, nonneg, "must be >= 0");

    r.report_unknown();
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

inline RunConfig parse_config(std::istream& is, const std::string& source = "config",
                              const std::string& subcommand = "") {
    KeyValues kv;
    std::vector<std::string> errors;
    parse_lines(is, source, kv, errors);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return parse_config(kv, subcommand);
}

} // namespace fdxlab::config
