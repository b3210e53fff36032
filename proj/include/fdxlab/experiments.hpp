#pragma once

#include "fdxlab/csv.hpp"
#include "fdxlab/error.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/parallel.hpp"
#include "fdxlab/profiles.hpp"
#include "fdxlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fdxlab {

/// Data μ_c for a parameter c > 0; expected pointwise nondecreasing in c.
using ProfileFamily = std::function<RadialProfile(double c)>;

enum class SurvivalRule {
    StatusOnly,         ///< Completed
    StatusAndDecayProxy ///< Completed and t^{1/(p-1)}·sup_norm on [H/10, H] stays below 10× its median there
};

/// FNV-1a over the printed solver settings; identifies a configuration in manifests.
inline std::uint64_t config_hash(const SolverConfig& cfg) {
    std::string s;
    auto add = [&](double v) { s += format_double(v) + ';'; };
    add(cfg.params.N());
    add(cfg.params.m());
    add(cfg.params.p());
    add(cfg.dt_safety);
    add(cfg.source_cfl);
    add(cfg.u_blowup);
    add(cfg.u_floor);
    add(cfg.cap());
    add(cfg.t_end);
    s += std::string(to_string(cfg.boundary)) + ';';
    add(cfg.source_on ? 1.0 : 0.0);
    add(cfg.domain_radius());
    add(static_cast<double>(cfg.cells));
    add(static_cast<double>(cfg.n_outputs));
    add(cfg.log_outputs_per_decade);
    add(cfg.log_output_t_min);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

/// max and median of t^{1/(p-1)}·sup_norm over recorded t in [t_lo, t_hi].
struct DecayProxy {
    double max = 0.0;
    double median = 0.0;
    std::size_t points = 0;
};

inline DecayProxy decay_proxy(const SolverTrace& tr, const ProblemParams& params, double t_lo, double t_hi) {
    const double e = 1.0 / (params.p() - 1.0);
    std::vector<double> v;
    for (std::size_t k = 0; k < tr.times.size(); ++k)
        if (tr.times[k] >= t_lo && tr.times[k] <= t_hi && tr.times[k] > 0.0)
            v.push_back(std::pow(tr.times[k], e) * tr.sup_norm[k]);
    DecayProxy d;
    d.points = v.size();
    if (v.empty()) return d;
    d.max = *std::max_element(v.begin(), v.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    d.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    return d;
}

/// One simulation of a sweep or probe.
struct RunRecord {
    double c = 0.0;
    double horizon = 0.0;
    SolverStatus status;
    double sup_final = 0.0;
    double proxy_max = 0.0;     ///< sup over (0, H] of t^{1/(p-1)}·sup_norm
    double proxy_tail_max = 0.0; ///< same over [H/10, H]
    double proxy_tail_median = 0.0;
    bool survived = false;
};

inline RunRecord classify_run(const SolverTrace& tr, const ProblemParams& params, double c, double horizon,
                              SurvivalRule rule) {
    RunRecord r;
    r.c = c;
    r.horizon = horizon;
    r.status = tr.status;
    r.sup_final = tr.sup_norm.back();
    r.proxy_max = decay_proxy(tr, params, 0.0, horizon).max;
    const auto tail = decay_proxy(tr, params, 0.1 * horizon, horizon);
    r.proxy_tail_max = tail.max;
    r.proxy_tail_median = tail.median;
    r.survived = tr.status.kind == SolverStatus::Kind::Completed;
    if (rule == SurvivalRule::StatusAndDecayProxy)
        r.survived = r.survived && tail.points > 0 && tail.max < 10.0 * tail.median;
    return r;
}

struct ThresholdOptions {
    double c_start = 1.0;
    int max_scans = 40;
    std::size_t scan_batch = 4; ///< geometric scan points simulated together
    SurvivalRule rule = SurvivalRule::StatusAndDecayProxy;
    std::vector<double> probes;
};

struct ThresholdResult {
    double c_low = 0.0;  ///< largest tested c that survived, below c_high
    double c_high = 0.0; ///< smallest tested c that blew up
    double c_init_low = 0.0;
    double c_init_high = 0.0;
    std::vector<RunRecord> history; ///< in evaluation order
    double horizon = 0.0;
    std::uint64_t config_hash = 0;

    /// Every tested c ≤ c_low survived and every tested c ≥ c_high did not.
    bool labels_consistent() const {
        for (const auto& r : history) {
            if (r.c <= c_low && !r.survived) return false;
            if (r.c >= c_high && r.survived) return false;
        }
        return c_low < c_high;
    }
};

/// Geometric scan c_start·2^k until both labels appear, then bisection of
/// the bracket. cfg.t_end is replaced by the horizon; R_dom = 0 keeps the
/// default domain 8·H^θ.
inline ThresholdResult threshold_sweep(const SolverConfig& base, const ProfileFamily& family, double horizon,
                                       int bisect_steps, const ThresholdOptions& opt = {}) {
    if (bisect_steps < 4) throw DomainError("threshold_sweep: bisect_steps must be >= 4");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("threshold_sweep: horizon must be finite and > 0");
    if (!(opt.c_start > 0.0)) throw DomainError("threshold_sweep: c_start must be > 0");
    if (opt.scan_batch == 0) throw DomainError("threshold_sweep: scan_batch must be >= 1");
    SolverConfig cfg = base;
    cfg.t_end = horizon;
    cfg.validate();
    const ProblemParams& P = cfg.params;

    ThresholdResult res;
    res.horizon = horizon;
    res.config_hash = config_hash(cfg);

    auto run_batch = [&](const std::vector<double>& cs) {
        std::vector<std::optional<RunRecord>> out(cs.size());
        parallel_for(cs.size(), [&](std::size_t i) {
            out[i] = classify_run(simulate(family(cs[i]), cfg, opt.probes), P, cs[i], horizon, opt.rule);
        });
        std::vector<RunRecord> recs;
        for (auto& r : out) {
            res.history.push_back(*r);
            recs.push_back(*r);
        }
        return recs;
    };

    // Direction is fixed by the label at c_start, then batches continue that way.
    const RunRecord first = run_batch({opt.c_start}).front();
    const double factor = first.survived ? 2.0 : 0.5;
    double prev = opt.c_start;
    bool found = false;
    int scans = 1;
    while (!found && scans < opt.max_scans) {
        std::vector<double> cs;
        for (std::size_t i = 0; i < opt.scan_batch && scans + static_cast<int>(cs.size()) < opt.max_scans; ++i)
            cs.push_back(opt.c_start * std::pow(factor, scans + static_cast<int>(i)));
        const auto recs = run_batch(cs);
        for (const auto& r : recs) {
            ++scans;
            if (r.survived != first.survived) {
                res.c_init_low = first.survived ? prev : r.c;
                res.c_init_high = first.survived ? r.c : prev;
                found = true;
                break;
            }
            prev = r.c;
        }
    }
    if (!found) throw DomainError("threshold_sweep: no bracket within " + std::to_string(opt.max_scans) + " scans");

    double lo = res.c_init_low, hi = res.c_init_high;
    for (int k = 0; k < bisect_steps; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (run_batch({mid}).front().survived) lo = mid;
        else hi = mid;
    }
    res.c_low = lo;
    res.c_high = hi;
    return res;
}

/// Bracket for several grid resolutions (cells, u_floor); reported, not
/// expected to converge.
struct SensitivityRow {
    std::size_t cells;
    double u_floor;
    double c_low;
    double c_high;
};

inline std::vector<SensitivityRow> threshold_sensitivity(const SolverConfig& base, const ProfileFamily& family,
                                                         double horizon, int bisect_steps,
                                                         const std::vector<std::pair<std::size_t, double>>& grids,
                                                         const ThresholdOptions& opt = {}) {
    std::vector<SensitivityRow> rows;
    for (const auto& [cells, floor] : grids) {
        SolverConfig cfg = base;
        cfg.cells = cells;
        cfg.u_floor = floor;
        const auto r = threshold_sweep(cfg, family, horizon, bisect_steps, opt);
        rows.push_back({cells, floor, r.c_low, r.c_high});
    }
    return rows;
}

struct DecayFitOptions {
    double time_offset = 0.0;            ///< fit against t + offset (e.g. Barenblatt t0)
    std::optional<double> blowup_time;   ///< fit against t_b - t instead
    double T = 1.0;                      ///< horizon in the critical log weight
};

struct DecayFit {
    double slope = 0.0;
    std::size_t points = 0;
    double proxy_max = 0.0; ///< sup over the window of t^{1/(p-1)}·sup_norm
    /// Critical only: sup over the window of t^{1/(p-1)}[log(e+T/t)]^{1/(p-1)}·sup_norm.
    std::optional<double> log_corrected;
};

/// Least-squares slope of log sup_norm against log of the time variable over
/// the recorded times in [t0, t1].
inline DecayFit decay_fit(const SolverTrace& tr, const ProblemParams& params, double t0, double t1,
                          const DecayFitOptions& opt = {}) {
    if (!(t0 > 0.0) || !(t1 > t0)) throw DomainError("decay_fit: window must satisfy 0 < t0 < t1");
    if (tr.times.empty() || t1 > tr.times.back()) throw DomainError("decay_fit: window extends past the trace");
    auto var = [&](double t) { return opt.blowup_time ? *opt.blowup_time - t : t + opt.time_offset; };
    const double v0 = var(t0), v1 = var(t1);
    if (!(std::min(v0, v1) > 0.0) || std::max(v0, v1) < 10.0 * std::min(v0, v1))
        throw DomainError("decay_fit: short window (needs at least one decade)");
    const double e = 1.0 / (params.p() - 1.0);
    std::vector<double> lx, ly;
    DecayFit fit;
    const bool critical = classify_regime(params) == Regime::Critical;
    double corrected = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double t = tr.times[k];
        if (t < t0 || t > t1) continue;
        lx.push_back(std::log(var(t)));
        ly.push_back(std::log(tr.sup_norm[k]));
        fit.proxy_max = std::max(fit.proxy_max, std::pow(t, e) * tr.sup_norm[k]);
        if (critical)
            corrected = std::max(corrected, std::pow(t * std::log(std::numbers::e + opt.T / t), e) * tr.sup_norm[k]);
    }
    fit.points = lx.size();
    if (fit.points < 3) throw DomainError("decay_fit: fewer than 3 samples in the window");
    const double n = static_cast<double>(fit.points);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    fit.slope = sxy / sxx;
    if (critical) fit.log_corrected = corrected;
    return fit;
}

struct NonexistenceReport {
    Regime regime;
    bool applicable = true;               ///< false for the supercritical regime
    std::optional<double> first_blowup_horizon;
    std::vector<RunRecord> runs;
    /// Soft expectation: some run blew up, or the last sup_norm still rises.
    bool expectation_met = true;
    std::string note;
};

/// Runs the horizons in increasing order until one ends in blow-up. The
/// domain is 8·H^θ for each horizon unless base.R_dom is set.
inline NonexistenceReport global_nonexistence_probe(const SolverConfig& base, const RadialProfile& data,
                                                    std::vector<double> horizons, const std::vector<double>& probes = {}) {
    NonexistenceReport rep;
    const ProblemParams& P = base.params;
    rep.regime = classify_regime(P);
    std::sort(horizons.begin(), horizons.end());
    if (horizons.empty() || !(horizons.front() > 0.0)) {
        rep.expectation_met = false;
        rep.note = "empty or nonpositive horizon ladder";
        return rep;
    }
    if (data.is_zero() && !(base.u_floor > 0.0)) {
        rep.expectation_met = false;
        rep.note = "trivial data";
        return rep;
    }
    for (double H : horizons) {
        SolverConfig cfg = base;
        cfg.t_end = H;
        const auto tr = simulate(data, cfg, probes);
        rep.runs.push_back(classify_run(tr, P, 0.0, H, SurvivalRule::StatusOnly));
        if (tr.blew_up()) {
            rep.first_blowup_horizon = H;
            break;
        }
    }
    if (rep.regime == Regime::Supercritical) {
        rep.applicable = false;
        rep.note = "not applicable regime";
        return rep;
    }
    if (!rep.first_blowup_horizon) {
        // Last run: is the sup norm still rising at the end?
        const auto& last = rep.runs.back();
        rep.expectation_met = last.proxy_tail_max > last.proxy_tail_median;
        rep.note = rep.expectation_met ? "no blow-up within the ladder; sup_norm still rising"
                                       : "no blow-up within the ladder and sup_norm not rising";
    } else {
        rep.note = "blow-up at horizon " + format_double(*rep.first_blowup_horizon);
    }
    return rep;
}

/// Columns c, horizon, status, t_status, sup_final, proxy_max, survived.
inline void write_manifest_csv(std::ostream& os, const std::vector<RunRecord>& runs,
                               const std::vector<std::pair<std::string, std::string>>& comments,
                               std::string_view status) {
    CsvWriter w(os);
    w.header({"c", "horizon", "status", "t_status", "sup_final", "proxy_max", "survived"});
    for (const auto& r : runs) {
        const std::string s = r.status.str();
        w.row_text({format_double(r.c), format_double(r.horizon), s.substr(0, s.find(' ')), format_double(r.status.t),
                    format_double(r.sup_final), format_double(r.proxy_max), r.survived ? "1" : "0"});
    }
    for (const auto& [k, v] : comments) w.comment(k, v);
    w.status(status);
}

} // namespace fdxlab
