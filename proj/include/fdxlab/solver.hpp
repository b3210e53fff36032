#pragma once

#include "fdxlab/csv.hpp"
#include "fdxlab/error.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/grid_field.hpp"
#include "fdxlab/parallel.hpp"
#include "fdxlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fdxlab {

/// Outer boundary at R_dom. ZeroFlux reflects; FixedFloor pins a ghost cell
/// at u_floor and clamps from below; Dirichlet takes the ghost value from a
/// callback (used to impose a known exact solution).
enum class Boundary { ZeroFlux, FixedFloor, Dirichlet };

inline std::string_view to_string(Boundary b) noexcept {
    switch (b) {
    case Boundary::ZeroFlux: return "zero_flux";
    case Boundary::FixedFloor: return "fixed_floor";
    case Boundary::Dirichlet: return "dirichlet";
    }
    return "?";
}

struct SolverConfig {
    explicit SolverConfig(ProblemParams p) : params(p) {}

    ProblemParams params;
    double dt_safety = 0.9;
    /// Source step limit: dt·max u^{p-1} ≤ source_cfl. Bounds the per-step
    /// relative growth, which sets the bias of the blow-up time.
    double source_cfl = 0.01;
    double u_blowup = 1e8;
    double u_floor = 1e-4;  ///< regularization floor n^{-1}
    double u_cap = 0.0;     ///< regularization cap; 0 means 1/u_floor
    double t_end = 1.0;
    Boundary boundary = Boundary::FixedFloor;
    bool source_on = true;
    double R_dom = 0.0;     ///< 0 means 8·t_end^θ
    std::size_t cells = 400;

    std::size_t n_outputs = 100;     ///< uniform output times k·t_end/n_outputs
    int log_outputs_per_decade = 0;  ///< extra log-spaced outputs from log_output_t_min
    double log_output_t_min = 0.0;   ///< 0 means 1e-4·t_end

    double energy_beta = 0.0;        ///< > 1 enables the ∫_{B(0,σ)} u^β column
    double energy_sigma = 1.0;
    double moment_r = 1.0;           ///< ≠ 1 also records ∫_{B(0,σ_j)} u^r per probe
    bool keep_fields = false;        ///< store the whole field at every output time

    /// Ghost-cell value u(r, t) for Boundary::Dirichlet.
    std::function<double(double r, double t)> dirichlet;

    double cap() const {
        if (u_cap > 0.0) return u_cap;
        return u_floor > 0.0 ? 1.0 / u_floor : std::numeric_limits<double>::infinity();
    }
    double domain_radius() const {
        return R_dom > 0.0 ? R_dom : 8.0 * std::pow(t_end, derive_exponents(params).theta);
    }
    double dr() const { return domain_radius() / static_cast<double>(cells); }

    void validate() const {
        std::vector<std::string> bad;
        if (!(dt_safety > 0.0 && dt_safety < 1.0)) bad.push_back("dt_safety must lie in (0,1)");
        if (!(source_cfl > 0.0 && source_cfl <= 0.5)) bad.push_back("source_cfl must lie in (0, 0.5]");
        if (!(u_blowup > 1.0)) bad.push_back("u_blowup must be > 1");
        if (!(u_floor >= 0.0) || !std::isfinite(u_floor)) bad.push_back("u_floor must be finite and >= 0");
        if (!(u_cap >= 0.0)) bad.push_back("u_cap must be >= 0");
        if (!(t_end > 0.0) || !std::isfinite(t_end)) bad.push_back("t_end must be finite and > 0");
        if (!(R_dom >= 0.0)) bad.push_back("R_dom must be >= 0");
        if (cells < 2) bad.push_back("cells must be >= 2");
        if (params.N() > 3) bad.push_back("radial solver supports N in {1,2,3}");
        if (boundary == Boundary::Dirichlet && !dirichlet) bad.push_back("dirichlet boundary needs a callback");
        if (energy_beta != 0.0 && !(energy_beta > 1.0)) bad.push_back("energy_beta must be > 1 when enabled");
        if (!(energy_sigma > 0.0)) bad.push_back("energy_sigma must be > 0");
        if (!(moment_r >= 1.0)) bad.push_back("moment_r must be >= 1");
        if (!bad.empty()) throw ConfigError(std::move(bad));
    }
};

/// Cell values min(cell average of f, cap) + floor on `cells` cells of width dr.
inline GridField project_initial(const RadialProfile& f, double dr, std::size_t cells, double cap, double floor) {
    if (!(dr > 0.0) || cells == 0) throw DomainError("project_initial: bad grid");
    if (!(cap > 0.0) || !(floor >= 0.0)) throw DomainError("project_initial: cap must be > 0 and floor >= 0");
    GridField out = GridField::uniform(f.N(), dr * static_cast<double>(cells), cells);
    const PointTransform id = PointTransform::identity();
    for (std::size_t i = 0; i < cells; ++i) {
        const double avg = f.shell_integral(out.face(i), out.face(i + 1), id) / out.cell_volume(i);
        out.values()[i] = std::min(std::max(avg, 0.0), cap) + floor;
    }
    return out;
}

/// μ_n = min(μ, n) + 1/n, projected as cell averages.
inline GridField regularize_initial(const RadialProfile& f, double n, double dr, std::size_t cells) {
    if (!(n > 0.0)) throw DomainError("regularize_initial: n must be > 0");
    return project_initial(f, dr, cells, n, 1.0 / n);
}

struct SolverStatus {
    enum class Kind { Completed, BlewUp, DtUnderflow };
    Kind kind = Kind::Completed;
    double t = 0.0;

    std::string str() const {
        switch (kind) {
        case Kind::Completed: return "completed t=" + format_double(t);
        case Kind::BlewUp: return "blew_up t=" + format_double(t);
        case Kind::DtUnderflow: return "dt_underflow t=" + format_double(t);
        }
        return "?";
    }
};

struct SolverTrace {
    std::vector<double> times;
    std::vector<double> sup_norm;
    std::vector<double> probes;                  ///< σ_j
    std::vector<std::vector<double>> ball_mass;  ///< [time][j] = ∫_{B(0,σ_j)} u
    double moment_r = 1.0;
    std::vector<std::vector<double>> moment_mass; ///< [time][j] = ∫_{B(0,σ_j)} u^r, only when r ≠ 1
    double energy_beta = 0.0;
    double energy_sigma = 0.0;
    std::vector<double> energy;                   ///< ∫_{B(0,σ_E)} u^β, only when β > 1
    std::vector<GridField> fields;                ///< [time], only with keep_fields
    SolverStatus status;
    std::size_t steps = 0;
    std::optional<GridField> final_field;

    bool blew_up() const noexcept { return status.kind == SolverStatus::Kind::BlewUp; }
};

namespace detail {

inline double power_integral(const GridField& u, double sigma, double a) {
    return u.centered_integral(sigma, [a](double v) { return std::pow(v, a); });
}

/// Face areas and cell volumes, computed once per run.
struct RadialGeometry {
    std::vector<double> area; // size()+1 faces
    std::vector<double> vol;

    explicit RadialGeometry(const GridField& f) : area(f.size() + 1), vol(f.size()) {
        for (std::size_t i = 0; i <= f.size(); ++i) area[i] = f.face_area(i);
        for (std::size_t i = 0; i < f.size(); ++i) vol[i] = f.cell_volume(i);
        area[0] = 0.0;
    }
};

/// Stability-limited step for the current state; .diffusion and .source are
/// the two limits before dt_safety.
struct StepLimits {
    double diffusion;
    double source;
};

inline StepLimits step_limits(std::span<const double> u, double ghost, const SolverConfig& cfg, double dr) {
    const auto [mn_it, mx_it] = std::minmax_element(u.begin(), u.end());
    double umin = *mn_it;
    if (cfg.boundary != Boundary::ZeroFlux) umin = std::min(umin, ghost);
    const double m = cfg.params.m();
    const double N = cfg.params.N();
    const double inf = std::numeric_limits<double>::infinity();
    // An identically zero state is a fixed point; any zero next to positive
    // values has unbounded diffusivity and no stable step.
    const bool all_zero = *mx_it == 0.0 && umin == 0.0 && (cfg.boundary == Boundary::ZeroFlux || ghost == 0.0);
    const double dmax = umin > 0.0 ? m * std::pow(umin, m - 1.0) : inf;
    const double diff = all_zero ? inf : dr * dr / (2.0 * N * dmax);
    double src = inf;
    if (cfg.source_on && *mx_it > 0.0) src = cfg.source_cfl / std::pow(*mx_it, cfg.params.p() - 1.0);
    return {diff, src};
}

/// Explicit Euler update in place; v and flux are scratch buffers.
inline void euler_update(GridField& field, const RadialGeometry& geo, double ghost, const SolverConfig& cfg, double dt,
                         std::vector<double>& v, std::vector<double>& flux) {
    const std::size_t n = field.size();
    const double dr = field.dr();
    const double m = cfg.params.m();
    const double p = cfg.params.p();
    auto u = field.values();
    v.resize(n);
    flux.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::pow(u[i], m);
    flux[0] = 0.0; // zero-area face at the origin
    for (std::size_t i = 1; i < n; ++i) flux[i] = geo.area[i] * (v[i] - v[i - 1]) / dr;
    flux[n] = cfg.boundary == Boundary::ZeroFlux ? 0.0 : geo.area[n] * (std::pow(ghost, m) - v[n - 1]) / dr;
    for (std::size_t i = 0; i < n; ++i) {
        double next = u[i] + dt * (flux[i + 1] - flux[i]) / geo.vol[i];
        if (cfg.source_on) next += dt * std::pow(u[i], p);
        if (cfg.boundary == Boundary::FixedFloor) next = std::max(next, cfg.u_floor);
        u[i] = next;
    }
}

inline double ghost_value(const GridField& field, const SolverConfig& cfg, double t) {
    switch (cfg.boundary) {
    case Boundary::ZeroFlux: return field[field.size() - 1];
    case Boundary::FixedFloor: return cfg.u_floor;
    case Boundary::Dirichlet: return cfg.dirichlet(field.center(field.size()), t);
    }
    return 0.0;
}

inline std::vector<double> output_schedule(const SolverConfig& cfg) {
    std::vector<double> ts;
    for (std::size_t k = 1; k <= cfg.n_outputs; ++k)
        ts.push_back(cfg.t_end * static_cast<double>(k) / static_cast<double>(cfg.n_outputs));
    if (cfg.log_outputs_per_decade > 0) {
        const double t0 = cfg.log_output_t_min > 0.0 ? cfg.log_output_t_min : 1e-4 * cfg.t_end;
        for (int k = 0;; ++k) {
            const double t = t0 * std::pow(10.0, static_cast<double>(k) / cfg.log_outputs_per_decade);
            if (t >= cfg.t_end) break;
            ts.push_back(t);
        }
    }
    ts.push_back(cfg.t_end);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

} // namespace detail

/// One explicit step of u_t = Δu^m + u^p on the radial finite-volume grid.
/// t is only used by the Dirichlet callback.
inline GridField step(const GridField& field, const SolverConfig& cfg, double dt, double t = 0.0) {
    if (field.N() != cfg.params.N()) throw DomainError("step: field dimension differs from N");
    const double ghost = detail::ghost_value(field, cfg, t);
    const auto lim = detail::step_limits(field.values(), ghost, cfg, field.dr());
    if (!(dt > 0.0) || dt > std::min(lim.diffusion, lim.source) * (1.0 + 1e-12))
        throw DomainError("step: dt violates the stability bound");
    GridField out = field;
    std::vector<double> v, flux;
    detail::euler_update(out, detail::RadialGeometry(out), ghost, cfg, dt, v, flux);
    for (double x : out.values())
        if (!(x >= 0.0)) throw DomainError("step: negative or non-finite value produced");
    return out;
}

/// Integrates from an already projected field until t_end, blow-up or step
/// underflow, recording probes at t = 0 and each scheduled output time.
inline SolverTrace simulate_field(GridField field, const SolverConfig& cfg, const std::vector<double>& probes) {
    cfg.validate();
    if (field.N() != cfg.params.N()) throw DomainError("simulate: field dimension differs from N");
    for (double s : probes)
        if (!(s > 0.0)) throw DomainError("simulate: probe radii must be > 0");
    SolverTrace tr;
    tr.probes = probes;
    tr.moment_r = cfg.moment_r;
    tr.energy_beta = cfg.energy_beta;
    tr.energy_sigma = cfg.energy_sigma;

    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.sup_norm.push_back(field.sup());
        std::vector<double> mass;
        for (double s : probes) mass.push_back(field.centered_mass(s));
        tr.ball_mass.push_back(std::move(mass));
        if (cfg.moment_r != 1.0) {
            std::vector<double> mom;
            for (double s : probes) mom.push_back(detail::power_integral(field, s, cfg.moment_r));
            tr.moment_mass.push_back(std::move(mom));
        }
        if (cfg.energy_beta > 1.0)
            tr.energy.push_back(detail::power_integral(field, cfg.energy_sigma, cfg.energy_beta));
        if (cfg.keep_fields) tr.fields.push_back(field);
    };

    // The terminal state replaces a record at the same time (t can stall
    // once steps fall below its resolution).
    auto record_final = [&](double t) {
        if (tr.times.back() == t) {
            tr.times.pop_back();
            tr.sup_norm.pop_back();
            tr.ball_mass.pop_back();
            if (!tr.moment_mass.empty()) tr.moment_mass.pop_back();
            if (!tr.energy.empty()) tr.energy.pop_back();
            if (!tr.fields.empty()) tr.fields.pop_back();
        }
        record(t);
    };

    const std::vector<double> outputs = detail::output_schedule(cfg);
    std::size_t next = 0;
    double t = 0.0;
    record(t);
    std::vector<double> v, flux;
    const detail::RadialGeometry geo(field);
    const double dt_floor = 1e-14 * cfg.t_end;
    while (true) {
        if (field.sup() >= cfg.u_blowup) {
            tr.status = {SolverStatus::Kind::BlewUp, t};
            record_final(t);
            break;
        }
        if (next >= outputs.size()) {
            tr.status = {SolverStatus::Kind::Completed, t};
            break;
        }
        const double ghost = detail::ghost_value(field, cfg, t);
        const auto lim = detail::step_limits(field.values(), ghost, cfg, field.dr());
        // Source-limited steps shrink like u^{1-p} near blow-up; they are
        // allowed below dt_floor so the run ends by crossing u_blowup.
        if (lim.diffusion < dt_floor) {
            tr.status = {SolverStatus::Kind::DtUnderflow, t};
            record_final(t);
            break;
        }
        double dt = cfg.dt_safety * std::min(lim.diffusion, lim.source);
        bool hit = false;
        if (!(t + dt < outputs[next])) {
            dt = outputs[next] - t;
            hit = true;
        }
        detail::euler_update(field, geo, ghost, cfg, dt, v, flux);
        ++tr.steps;
        t = hit ? outputs[next] : t + dt;
        if (hit) {
            record(t);
            ++next;
        }
    }
    tr.final_field = std::move(field);
    return tr;
}

/// Projects f onto the configured grid with the regularization
/// min(f, cap) + u_floor, then integrates.
inline SolverTrace simulate(const RadialProfile& f, const SolverConfig& cfg, const std::vector<double>& probes) {
    cfg.validate();
    if (f.N() != cfg.params.N()) throw DomainError("simulate: profile dimension differs from N");
    return simulate_field(project_initial(f, cfg.dr(), cfg.cells, cfg.cap(), cfg.u_floor), cfg, probes);
}

/// Independent runs in parallel; results in input order.
inline std::vector<SolverTrace> simulate_many(const std::vector<RadialProfile>& fs, const std::vector<SolverConfig>& cfgs,
                                              const std::vector<double>& probes) {
    if (fs.size() != cfgs.size()) throw DomainError("simulate_many: profile and config counts differ");
    std::vector<std::optional<SolverTrace>> out(fs.size());
    parallel_for(fs.size(), [&](std::size_t i) { out[i] = simulate(fs[i], cfgs[i], probes); });
    std::vector<SolverTrace> res;
    res.reserve(out.size());
    for (auto& o : out) res.push_back(std::move(*o));
    return res;
}

struct EnergyDiagnostics {
    double mass_beta;      ///< ∫_{B(0,σ)} u^β
    double dirichlet_beta; ///< ∫_{B(0,σ)} u^{m+β-3} |∇u|²
};

/// Cellwise quantities integrated with exact (partial) cell volumes. The
/// gradient is central, with a mirror ghost at the origin and a one-sided
/// difference in the last cell.
inline EnergyDiagnostics energy_diagnostics(const GridField& u, double m, double beta, double sigma) {
    if (!(beta > 1.0)) throw DomainError("energy_diagnostics: beta must be > 1");
    if (!(sigma > 0.0)) throw DomainError("energy_diagnostics: sigma must be > 0");
    const std::size_t n = u.size();
    const double dr = u.dr();
    EnergyDiagnostics e{0.0, 0.0};
    for (std::size_t i = 0; i < n && u.face(i) < sigma; ++i) {
        const double w = ball_volume(u.N(), std::min(u.face(i + 1), sigma)) - ball_volume(u.N(), u.face(i));
        double grad = 0.0;
        if (n > 1) {
            if (i == 0) grad = (u[1] - u[0]) / (2.0 * dr);
            else if (i + 1 == n) grad = (u[i] - u[i - 1]) / dr;
            else grad = (u[i + 1] - u[i - 1]) / (2.0 * dr);
        }
        e.mass_beta += w * std::pow(u[i], beta);
        if (grad != 0.0) e.dirichlet_beta += w * std::pow(u[i], m + beta - 3.0) * grad * grad;
    }
    return e;
}

struct DecayReport {
    double C = 0.0;         ///< smallest constant making the bound hold on the window
    double window_start = 0.0;
    double window_end = 0.0;
    std::size_t points = 0;
};

/// ‖u(t)‖∞ ≤ C t^{-N/κ_r} (sup_{s<t} ∫_{B(0,R)} u(s)^r)^{2/κ_r} + (t/R²)^{1/(1-m)}
/// over recorded t > 0 in the window where s^{1/(p-1)}‖u(s)‖∞ ≤ 1 for all s ≤ t.
/// Ball integrals are taken at the origin (radially nonincreasing data); R
/// must be one of the trace's probe radii.
inline DecayReport linfty_decay_check(const SolverTrace& tr, const ProblemParams& params, double r, double R) {
    const KappaR kr = kappa_r(params, r);
    if (!kr.positive) throw DomainError("linfty_decay_check: requires kappa_r > 0");
    const auto it = std::find(tr.probes.begin(), tr.probes.end(), R);
    if (it == tr.probes.end()) throw DomainError("linfty_decay_check: R is not a recorded probe radius");
    const std::size_t j = static_cast<std::size_t>(it - tr.probes.begin());
    if (r != 1.0 && (tr.moment_r != r || tr.moment_mass.empty()))
        throw DomainError("linfty_decay_check: trace has no recorded moments for this r");
    const auto& moments = r == 1.0 ? tr.ball_mass : tr.moment_mass;
    const double N = params.N();
    const double m = params.m();
    const double q = 1.0 / (params.p() - 1.0);

    DecayReport rep;
    double running = 0.0; // sup of recorded moments up to t; continuity covers s < t
    bool any = false;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double t = tr.times[k];
        if (t > 0.0 && std::pow(t, q) * tr.sup_norm[k] > 1.0) break;
        running = std::max(running, moments[k][j]);
        if (!(t > 0.0)) continue;
        const double tail = std::pow(t / (R * R), 1.0 / (1.0 - m));
        const double excess = tr.sup_norm[k] - tail;
        const double scale = std::pow(t, -N / kr.value) * std::pow(running, 2.0 / kr.value);
        if (excess > 0.0) rep.C = std::max(rep.C, scale > 0.0 ? excess / scale : std::numeric_limits<double>::infinity());
        if (!any) rep.window_start = t;
        any = true;
        rep.window_end = t;
        ++rep.points;
    }
    if (!any) throw DomainError("linfty_decay_check: empty window (t^{1/(p-1)} sup_norm exceeds 1 from the start)");
    return rep;
}

// ---- scaling u_λ(x,t) = λ^a u(λx, λ^θ' t), a = 2/(p-m) ----

inline GridField scaling_transform(const GridField& f, double lambda, const ProblemParams& params) {
    if (!(lambda > 0.0)) throw DomainError("scaling_transform: lambda must be > 0");
    if (lambda == 1.0) return f;
    const double amp = std::pow(lambda, scaling_exponent(params));
    std::vector<double> u(f.values().begin(), f.values().end());
    for (auto& x : u) x *= amp;
    return GridField(f.N(), f.dr() / lambda, std::move(u));
}

inline SolverTrace scaling_transform(const SolverTrace& tr, double lambda, const ProblemParams& params) {
    if (!(lambda > 0.0)) throw DomainError("scaling_transform: lambda must be > 0");
    if (lambda == 1.0) return tr;
    const double a = scaling_exponent(params);
    const double N = params.N();
    const double tfac = std::pow(lambda, -derive_exponents(params).theta_prime);
    SolverTrace out = tr;
    for (auto& t : out.times) t *= tfac;
    out.status.t *= tfac;
    for (auto& s : out.sup_norm) s *= std::pow(lambda, a);
    for (auto& s : out.probes) s /= lambda;
    for (auto& row : out.ball_mass)
        for (auto& x : row) x *= std::pow(lambda, a - N);
    for (auto& row : out.moment_mass)
        for (auto& x : row) x *= std::pow(lambda, a * out.moment_r - N);
    out.energy_sigma /= lambda;
    for (auto& x : out.energy) x *= std::pow(lambda, a * out.energy_beta - N);
    for (auto& f : out.fields) f = scaling_transform(f, lambda, params);
    if (out.final_field) out.final_field = scaling_transform(*out.final_field, lambda, params);
    return out;
}

/// The configuration that, applied to the rescaled data, reproduces the
/// rescaled run step for step: grid, floor, cap, horizon and outputs scale
/// with the solution.
inline SolverConfig scaled_config(const SolverConfig& cfg, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("scaled_config: lambda must be > 0");
    const double a = scaling_exponent(cfg.params);
    const double tfac = std::pow(lambda, -derive_exponents(cfg.params).theta_prime);
    SolverConfig out = cfg;
    out.u_floor = cfg.u_floor * std::pow(lambda, a);
    out.u_cap = cfg.cap() * std::pow(lambda, a);
    out.u_blowup = cfg.u_blowup * std::pow(lambda, a);
    out.t_end = cfg.t_end * tfac;
    out.R_dom = cfg.domain_radius() / lambda;
    out.log_output_t_min = (cfg.log_output_t_min > 0.0 ? cfg.log_output_t_min : 1e-4 * cfg.t_end) * tfac;
    out.energy_sigma = cfg.energy_sigma / lambda;
    if (cfg.dirichlet) {
        auto g = cfg.dirichlet;
        const double amp = std::pow(lambda, a);
        out.dirichlet = [g, amp, lambda, tfac](double r, double t) { return amp * g(lambda * r, t / tfac); };
    }
    return out;
}

inline void write_trace_csv(std::ostream& os, const SolverTrace& tr) {
    CsvWriter w(os);
    std::vector<std::string> cols{"t", "sup_norm"};
    for (std::size_t j = 0; j < tr.probes.size(); ++j) cols.push_back("mass_sigma_" + std::to_string(j));
    const bool energy = !tr.energy.empty();
    if (energy) cols.push_back("energy_beta");
    w.header(cols);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        std::vector<double> row{tr.times[k], tr.sup_norm[k]};
        row.insert(row.end(), tr.ball_mass[k].begin(), tr.ball_mass[k].end());
        if (energy) row.push_back(tr.energy[k]);
        w.row(row);
    }
    std::string probes;
    for (std::size_t j = 0; j < tr.probes.size(); ++j) {
        if (j) probes += ' ';
        probes += "sigma_" + std::to_string(j) + "=" + format_double(tr.probes[j]);
    }
    w.comment("probes", probes);
    if (energy) w.comment("energy", "beta=" + format_double(tr.energy_beta) + " sigma=" + format_double(tr.energy_sigma));
    w.status(tr.status.str());
}

} // namespace fdxlab
