#pragma once

#include "fdxlab/csv.hpp"
#include "fdxlab/error.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/parallel.hpp"
#include "fdxlab/profiles.hpp"
#include "fdxlab/solver.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fdxlab {

/// Extrapolated t → 0 ball masses ν̂(B(z, σ_j)) around one center.
struct TraceEstimate {
    double center = 0.0;           ///< |z|
    std::vector<double> radii;
    std::vector<double> mass;      ///< ν̂, clamped at 0 and made nondecreasing in σ
    std::vector<bool> converged;   ///< successive differences contracted by the required factor
    std::vector<double> gamma;     ///< fitted rate in a + b t^γ
    std::vector<double> raw;       ///< mass at the smallest sample time
    std::vector<double> sample_times; ///< the four smallest positive times used
};

struct TraceOptions {
    double t_max = std::numeric_limits<double>::infinity(); ///< ignore samples above this time
    double contraction = 1.5;
    double gamma_lo = 0.3;
    double gamma_hi = 2.0;
};

namespace detail {

struct Extrapolation {
    double value;
    double gamma;
    bool converged;
};

// ts ascending, at least four entries; only the first four are used.
inline Extrapolation extrapolate_to_zero(const std::vector<double>& ts, const std::vector<double>& ys,
                                         const TraceOptions& opt) {
    const double s1 = ts[0], s2 = ts[1], s3 = ts[2];
    const double y1 = ys[0], y2 = ys[1], y3 = ys[2], y4 = ys[3];
    const double D1 = std::abs(y2 - y1), D2 = std::abs(y3 - y2), D3 = std::abs(y4 - y3);
    const double scale = std::max({std::abs(y1), std::abs(y2), std::abs(y3), std::abs(y4)});
    if (std::max({D1, D2, D3}) <= 1e-12 * scale) return {y1, 1.0, true};

    const bool converged = D2 >= opt.contraction * D1 && D3 >= opt.contraction * D2;
    const double d21 = y2 - y1, d32 = y3 - y2;
    if (!(d21 * d32 > 0.0) || d21 == 0.0) return {y1, std::numeric_limits<double>::quiet_NaN(), false};

    // Exact three-point fit: (s3^γ - s2^γ)/(s2^γ - s1^γ) = (y3 - y2)/(y2 - y1).
    const double target = std::log(d32 / d21);
    auto h = [&](double g) {
        return std::log((std::pow(s3, g) - std::pow(s2, g)) / (std::pow(s2, g) - std::pow(s1, g))) - target;
    };
    double g;
    const double h_lo = h(opt.gamma_lo), h_hi = h(opt.gamma_hi);
    if (h_lo >= 0.0) {
        g = opt.gamma_lo;
    } else if (h_hi <= 0.0) {
        g = opt.gamma_hi;
    } else {
        std::uintmax_t iters = 200;
        const auto br = boost::math::tools::toms748_solve(h, opt.gamma_lo, opt.gamma_hi, h_lo, h_hi,
                                                          boost::math::tools::eps_tolerance<double>(50), iters);
        g = 0.5 * (br.first + br.second);
    }
    // Least squares for (a, b) at fixed γ (exact when γ is interior).
    const double x[3] = {std::pow(s1, g), std::pow(s2, g), std::pow(s3, g)};
    const double y[3] = {y1, y2, y3};
    const double xm = (x[0] + x[1] + x[2]) / 3.0, ym = (y1 + y2 + y3) / 3.0;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 3; ++i) {
        sxy += (x[i] - xm) * (y[i] - ym);
        sxx += (x[i] - xm) * (x[i] - xm);
    }
    const double b = sxy / sxx;
    return {ym - b * xm, g, converged};
}

inline std::vector<std::size_t> trace_sample_indices(const std::vector<double>& times, const TraceOptions& opt) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] > 0.0 && times[k] <= opt.t_max) idx.push_back(k);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    if (idx.size() < 4) throw DomainError("estimate_trace: needs at least 4 sample times t > 0");
    idx.resize(4);
    if (times[idx[3]] < 8.0 * times[idx[0]])
        throw DomainError("estimate_trace: the 4 smallest sample times must span a factor >= 8");
    return idx;
}

// masses[k][j]: sample k (ascending time), radius j.
inline TraceEstimate assemble_estimate(double center, const std::vector<double>& radii, const std::vector<double>& ts,
                                       const std::vector<std::vector<double>>& masses, const TraceOptions& opt) {
    TraceEstimate est;
    est.center = center;
    est.radii = radii;
    est.sample_times = ts;
    double running = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        std::vector<double> ys(4);
        for (int k = 0; k < 4; ++k) ys[k] = masses[k][j];
        const auto ex = extrapolate_to_zero(ts, ys, opt);
        running = std::max(running, std::max(ex.value, 0.0));
        est.mass.push_back(running);
        est.converged.push_back(ex.converged);
        est.gamma.push_back(ex.gamma);
        est.raw.push_back(ys[0]);
    }
    return est;
}

inline void check_radii(const std::vector<double>& radii) {
    if (radii.empty()) throw DomainError("estimate_trace: no radii");
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (!(radii[j] > 0.0)) throw DomainError("estimate_trace: radii must be > 0");
        if (j && !(radii[j] > radii[j - 1])) throw DomainError("estimate_trace: radii must be increasing");
    }
}

} // namespace detail

/// Origin-centered estimate from the recorded probe masses. Every radius must
/// be one of the trace's probe radii.
inline TraceEstimate estimate_trace(const SolverTrace& tr, const std::vector<double>& radii,
                                    const TraceOptions& opt = {}) {
    detail::check_radii(radii);
    std::vector<std::size_t> col;
    for (double s : radii) {
        const auto it = std::find(tr.probes.begin(), tr.probes.end(), s);
        if (it == tr.probes.end()) throw DomainError("estimate_trace: radius is not a probe radius of the trace");
        col.push_back(static_cast<std::size_t>(it - tr.probes.begin()));
    }
    const auto idx = detail::trace_sample_indices(tr.times, opt);
    std::vector<double> ts;
    std::vector<std::vector<double>> masses;
    for (auto k : idx) {
        ts.push_back(tr.times[k]);
        std::vector<double> row;
        for (auto j : col) row.push_back(tr.ball_mass[k][j]);
        masses.push_back(std::move(row));
    }
    return detail::assemble_estimate(0.0, radii, ts, masses, opt);
}

/// Estimates around several centers (distances from the origin) from stored
/// fields (SolverConfig::keep_fields). Centers are processed in parallel.
inline std::vector<TraceEstimate> estimate_trace(const SolverTrace& tr, const std::vector<double>& centers,
                                                 const std::vector<double>& radii, const TraceOptions& opt = {}) {
    detail::check_radii(radii);
    if (tr.fields.size() != tr.times.size())
        throw DomainError("estimate_trace: trace has no stored fields (enable keep_fields)");
    for (double d : centers)
        if (!(d >= 0.0)) throw DomainError("estimate_trace: center distances must be >= 0");
    const auto idx = detail::trace_sample_indices(tr.times, opt);
    std::vector<double> ts;
    std::vector<RadialProfile> snaps;
    for (auto k : idx) {
        ts.push_back(tr.times[k]);
        snaps.push_back(RadialProfile::gridded(tr.fields[k]));
    }
    std::vector<std::optional<TraceEstimate>> out(centers.size());
    parallel_for(centers.size(), [&](std::size_t c) {
        std::vector<std::vector<double>> masses;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            std::vector<double> row;
            for (double s : radii)
                row.push_back(centers[c] == 0.0 ? tr.fields[idx[k]].centered_mass(s)
                                                : snaps[k].ball_integral(centers[c], s, PointTransform::identity()));
            masses.push_back(std::move(row));
        }
        out[c] = detail::assemble_estimate(centers[c], radii, ts, masses, opt);
    });
    std::vector<TraceEstimate> res;
    for (auto& e : out) res.push_back(std::move(*e));
    return res;
}

/// Log-log fit of ν̂(B(z,σ)) against σ.
struct TraceFit {
    Regime regime;
    double slope = 0.0;          ///< least-squares d log ν̂ / d log σ
    double expected_slope = 0.0; ///< N - 2/(p-m)
    /// Critical only: C and the RMS log residual of ν̂ ≈ C [log(e + T^θ/σ)]^{-N/2}.
    std::optional<double> log_shape_constant;
    std::optional<double> log_shape_residual;
    std::size_t points = 0;      ///< radii with ν̂ > 0 entering the fit
    std::size_t flagged = 0;     ///< radii whose extrapolation did not converge
};

inline TraceFit fit_trace_bounds(const TraceEstimate& est, const ProblemParams& params, double T) {
    const Regime regime = classify_regime(params);
    if (regime == Regime::Subcritical)
        throw DomainError("fit_trace_bounds: regime mismatch (needs critical or supercritical)");
    if (est.radii.size() < 2 || est.radii.back() < std::pow(10.0, 1.5) * est.radii.front())
        throw DomainError("fit_trace_bounds: radii must span at least 1.5 decades");
    if (regime == Regime::Critical && !(T > 0.0 && std::isfinite(T)))
        throw DomainError("fit_trace_bounds: critical shape needs a finite T > 0");
    TraceFit fit;
    fit.regime = regime;
    fit.expected_slope = params.N() - 2.0 / (params.p() - params.m());
    std::vector<double> lx, ly;
    for (std::size_t j = 0; j < est.radii.size(); ++j) {
        if (!est.converged[j]) ++fit.flagged;
        if (est.mass[j] > 0.0) {
            lx.push_back(std::log(est.radii[j]));
            ly.push_back(std::log(est.mass[j]));
        }
    }
    fit.points = lx.size();
    if (fit.points < 2) throw DomainError("fit_trace_bounds: fewer than 2 radii with positive mass");
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
    if (regime == Regime::Critical) {
        const double R = std::pow(T, derive_exponents(params).theta);
        std::vector<double> resid;
        for (std::size_t i = 0; i < lx.size(); ++i)
            resid.push_back(ly[i] + 0.5 * params.N() * std::log(std::log(std::numbers::e + R / std::exp(lx[i]))));
        double mean = 0.0;
        for (double r : resid) mean += r;
        mean /= n;
        double ss = 0.0;
        for (double r : resid) ss += (r - mean) * (r - mean);
        fit.log_shape_constant = std::exp(mean);
        fit.log_shape_residual = std::sqrt(ss / n);
    }
    return fit;
}

/// Columns sigma, nu_hat, flag (1 = converged), slope.
inline void write_trace_estimate_csv(std::ostream& os, const TraceEstimate& est, const std::optional<TraceFit>& fit,
                                     std::string_view status = "ok") {
    CsvWriter w(os);
    w.header({"sigma", "nu_hat", "flag", "slope"});
    const double slope = fit ? fit->slope : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 0; j < est.radii.size(); ++j)
        w.row({est.radii[j], est.mass[j], est.converged[j] ? 1.0 : 0.0, slope});
    w.comment("center", format_double(est.center));
    if (fit) {
        w.comment("expected_slope", format_double(fit->expected_slope));
        if (fit->log_shape_residual) w.comment("log_shape_residual", format_double(*fit->log_shape_residual));
    }
    w.status(status);
}

/// Reads the format written by write_trace_csv (times, sup norms, probe
/// masses, energy column and status). Stored fields are not part of it.
inline SolverTrace read_trace_csv(std::istream& is) {
    SolverTrace tr;
    std::string line;
    std::vector<std::string> cols;
    bool energy = false;
    std::size_t n_probes = 0;
    std::size_t lineno = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    auto number = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw DomainError("read_trace_csv: line " + std::to_string(lineno) + ": bad number '" + s + "'");
        }
    };
    bool have_status = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = line.substr(2, colon - 2);
            const std::string val = colon + 2 <= line.size() ? line.substr(colon + 2) : "";
            if (key == "probes") {
                std::stringstream ss(val);
                std::string tok;
                while (ss >> tok) {
                    const auto eq = tok.find('=');
                    if (eq == std::string::npos) throw DomainError("read_trace_csv: bad probes line");
                    tr.probes.push_back(number(tok.substr(eq + 1)));
                }
            } else if (key == "energy") {
                std::stringstream ss(val);
                std::string tok;
                while (ss >> tok) {
                    const auto eq = tok.find('=');
                    if (eq == std::string::npos) continue;
                    const double v = number(tok.substr(eq + 1));
                    if (tok.substr(0, eq) == "beta") tr.energy_beta = v;
                    if (tok.substr(0, eq) == "sigma") tr.energy_sigma = v;
                }
            } else if (key == "status") {
                const auto sp = val.find(" t=");
                const std::string kind = val.substr(0, sp);
                if (kind == "completed") tr.status.kind = SolverStatus::Kind::Completed;
                else if (kind == "blew_up") tr.status.kind = SolverStatus::Kind::BlewUp;
                else if (kind == "dt_underflow") tr.status.kind = SolverStatus::Kind::DtUnderflow;
                else throw DomainError("read_trace_csv: unknown status '" + val + "'");
                if (sp != std::string::npos) tr.status.t = number(val.substr(sp + 3));
                have_status = true;
            }
            continue;
        }
        if (cols.empty()) {
            cols = split(line);
            if (cols.size() < 2 || cols[0] != "t" || cols[1] != "sup_norm")
                throw DomainError("read_trace_csv: header must start with t,sup_norm");
            energy = cols.back() == "energy_beta";
            n_probes = cols.size() - 2 - (energy ? 1 : 0);
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != cols.size())
            throw DomainError("read_trace_csv: line " + std::to_string(lineno) + ": wrong column count");
        tr.times.push_back(number(cells[0]));
        tr.sup_norm.push_back(number(cells[1]));
        std::vector<double> mass;
        for (std::size_t j = 0; j < n_probes; ++j) mass.push_back(number(cells[2 + j]));
        tr.ball_mass.push_back(std::move(mass));
        if (energy) tr.energy.push_back(number(cells.back()));
    }
    if (cols.empty()) throw DomainError("read_trace_csv: missing header");
    if (tr.probes.size() != n_probes) throw DomainError("read_trace_csv: probes line does not match the columns");
    if (!have_status) throw DomainError("read_trace_csv: missing status line");
    return tr;
}

} // namespace fdxlab
