#pragma once

#include "fdxlab/csv.hpp"
#include "fdxlab/error.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/geometry.hpp"
#include "fdxlab/parallel.hpp"
#include "fdxlab/profiles.hpp"
#include "fdxlab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace fdxlab {

inline constexpr double kDefaultRadiusCap = 1e6;
inline constexpr int kDefaultRadiiPerDecade = 64;

/// Which weighted ball quantity a norm takes the sup of.
///   Morrey:     σ^{N/q} (avg_{B(z,σ)} f^α)^{1/α}
///   OrliczEta:  η(σ/ℓ) Ψ_α^{-1}(avg_{B(z,σ)} Ψ_α(s·f)),  ℓ = T^θ, s = T^{1/(p-1)}
struct NormSpec {
    enum class Kind { Morrey, OrliczEta };
    Kind kind = Kind::Morrey;
    double q = 1.0;
    double alpha = 1.0;
    double R = std::numeric_limits<double>::infinity();
    double eta_length = 1.0;
    double gauge_scale = 1.0;

    static NormSpec morrey(double q, double alpha, double R) {
        if (!(q >= 1.0)) throw DomainError("NormSpec: Morrey q must be >= 1");
        if (!(alpha >= 1.0)) throw DomainError("NormSpec: Morrey alpha must be >= 1");
        if (!(R > 0.0)) throw DomainError("NormSpec: radius cap R must be > 0");
        return {Kind::Morrey, q, alpha, R, 1.0, 1.0};
    }

    /// The left side of the critical-case condition for a given T.
    static NormSpec orlicz_eta(const ProblemParams& params, double alpha, double T) {
        if (!(alpha > 0.0)) throw DomainError("NormSpec: Orlicz alpha must be > 0");
        if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("NormSpec: Orlicz-eta norm needs finite T > 0");
        const double ell = std::pow(T, derive_exponents(params).theta);
        return {Kind::OrliczEta, 1.0, alpha, ell, ell, std::pow(T, 1.0 / (params.p() - 1.0))};
    }
};

/// Centers (distances from the origin; radial data makes direction
/// irrelevant) and radii to take the sup over.
struct ScanGrid {
    std::vector<double> centers;
    std::vector<double> radii;
    std::string description;
};

/// Radii r_min·10^{k/per_decade} below R, then the largest double below R.
/// The fixed ratio makes grids with a common r_min nested across caps.
inline std::vector<double> log_radii(double r_min, double R, int per_decade = kDefaultRadiiPerDecade) {
    if (!(r_min > 0.0) || !(R > r_min) || !std::isfinite(R))
        throw DomainError("log_radii: need 0 < r_min < R < inf");
    if (per_decade < 1) throw DomainError("log_radii: per_decade must be >= 1");
    const double top = std::nextafter(R, 0.0);
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double r = r_min * std::pow(10.0, static_cast<double>(k) / per_decade);
        if (r >= top) break;
        out.push_back(r);
    }
    out.push_back(top);
    return out;
}

struct ScanOptions {
    int per_decade = kDefaultRadiiPerDecade;
    double r_min = 0.0;                   ///< 0: grid spacing for fields, R·1e-6 otherwise
    double radius_cap = kDefaultRadiusCap; ///< stands in for R = ∞
    std::vector<double> extra_centers;    ///< off-center spot checks for analytic profiles
};

/// Analytic radial profiles are nonincreasing in |x|, so the sup over centers
/// sits at the origin; gridded fields are scanned at every cell center.
inline ScanGrid make_scan(const RadialProfile& f, double R, const ScanOptions& opt = {}) {
    ScanGrid s;
    const double R_eff = std::isinf(R) ? opt.radius_cap : R;
    double r_min = opt.r_min;
    s.centers.push_back(0.0);
    if (const auto* gr = std::get_if<RadialProfile::Gridded>(&f.base())) {
        const GridField& F = *gr->field;
        const double dr = F.dr() / f.stretch();
        for (std::size_t i = 0; i < F.size(); ++i) s.centers.push_back(F.center(i) / f.stretch());
        if (!(r_min > 0.0)) r_min = dr;
    }
    if (!(r_min > 0.0)) r_min = 1e-6 * R_eff;
    s.centers.insert(s.centers.end(), opt.extra_centers.begin(), opt.extra_centers.end());
    if (r_min >= R_eff) r_min = 0.5 * R_eff;
    s.radii = log_radii(r_min, R_eff, opt.per_decade);
    s.description = "centers=" + std::to_string(s.centers.size()) + " radii=" + std::to_string(s.radii.size()) +
                    " per_decade=" + std::to_string(opt.per_decade) + " r_min=" + format_double(r_min) +
                    " r_max=" + format_double(s.radii.back());
    return s;
}

struct NormResult {
    double value = 0.0;
    double arg_center = 0.0; ///< distance of the attaining center from the origin
    double arg_radius = 0.0;
    std::string grid_resolution;

    /// Attaining center as a point on the first axis.
    std::vector<double> arg_center_point(int N) const {
        std::vector<double> z(static_cast<std::size_t>(N), 0.0);
        z[0] = arg_center;
        return z;
    }
};

/// Ψ_α^{-1} of the mean of Ψ_α(f) over B(z, σ), |z| = d.
inline double orlicz_ball_average(const RadialProfile& f, double alpha, double d, double sigma,
                                  double tol = quad::kDefaultTol) {
    if (!(sigma > 0.0)) throw DomainError("orlicz_ball_average: sigma must be positive");
    const PointTransform g = PointTransform::orlicz(alpha);
    return g.invert(ball_mean(f, d, sigma, g, tol));
}

inline double orlicz_ball_average(const RadialProfile& f, double alpha, std::span<const double> z, double sigma,
                                  double tol = quad::kDefaultTol) {
    if (static_cast<int>(z.size()) != f.N()) throw DomainError("orlicz_ball_average: center dimension mismatch");
    return orlicz_ball_average(f, alpha, euclidean_norm(z), sigma, tol);
}

namespace detail {

/// The weighted quantity of `spec` at one (center, radius).
inline double norm_quantity(const RadialProfile& f, const NormSpec& spec, double d, double sigma) {
    const int N = f.N();
    if (spec.kind == NormSpec::Kind::Morrey) {
        const PointTransform g = spec.alpha == 1.0 ? PointTransform::identity() : PointTransform::power(spec.alpha);
        const double mean = ball_mean(f, d, sigma, g);
        return std::pow(sigma, N / spec.q) * g.invert(mean);
    }
    const PointTransform g = PointTransform::orlicz(spec.alpha, spec.gauge_scale);
    const double avg = psi_inv(spec.alpha, ball_mean(f, d, sigma, g));
    return eta(N, sigma / spec.eta_length) * avg;
}

/// Exponent e with σ^{N/q}·(avg f^α)^{1/α} ~ σ^e (up to logs) at z = 0 as σ → 0,
/// for singular profiles; NaN otherwise.
inline double morrey_small_radius_exponent(const RadialProfile& f, const NormSpec& spec) {
    if (spec.kind != NormSpec::Kind::Morrey || !f.singular_at_origin()) return std::numeric_limits<double>::quiet_NaN();
    if (const auto* p = std::get_if<RadialProfile::PowerLaw>(&f.base())) return f.N() / spec.q - p->a;
    return f.N() / spec.q - f.N(); // critical log profile
}

/// Same exponent as σ → ∞ for uncut power laws and constants; NaN otherwise.
inline double morrey_tail_exponent(const RadialProfile& f, const NormSpec& spec) {
    if (spec.kind != NormSpec::Kind::Morrey || f.cutoff() || f.is_zero())
        return std::numeric_limits<double>::quiet_NaN();
    if (const auto* p = std::get_if<RadialProfile::PowerLaw>(&f.base())) return f.N() / spec.q - p->a;
    if (std::holds_alternative<RadialProfile::Constant>(f.base())) return f.N() / spec.q;
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace detail

/// sup over the scan grid of the weighted ball quantity. Pairs are evaluated
/// in parallel; the reduction takes the first maximum in (center, radius)
/// order so the result does not depend on the thread count.
inline NormResult norm(const RadialProfile& f, const NormSpec& spec, const ScanGrid& scan) {
    if (scan.centers.empty() || scan.radii.empty()) throw DomainError("norm: empty scan grid");
    for (double r : scan.radii)
        if (!(r > 0.0) || !(r < spec.R)) throw DomainError("norm: scan radii must lie in (0, R)");
    NormResult out;
    out.grid_resolution = scan.description;
    if (detail::morrey_small_radius_exponent(f, spec) < 0.0) {
        // The weighted average blows up as σ → 0 at the singularity.
        out.value = std::numeric_limits<double>::infinity();
        out.arg_radius = scan.radii.front();
        return out;
    }
    if (std::isinf(spec.R) && detail::morrey_tail_exponent(f, spec) > 0.0) {
        // Grows without bound beyond any finite cap.
        out.value = std::numeric_limits<double>::infinity();
        out.arg_radius = scan.radii.back();
        return out;
    }
    if (f.is_zero()) {
        out.arg_radius = scan.radii.front();
        return out;
    }
    const std::size_t nr = scan.radii.size();
    std::vector<double> vals(scan.centers.size() * nr);
    parallel_for(vals.size(), [&](std::size_t k) {
        vals[k] = detail::norm_quantity(f, spec, scan.centers[k / nr], scan.radii[k % nr]);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < vals.size(); ++k)
        if (vals[k] > vals[best]) best = k;
    out.value = vals[best];
    out.arg_center = scan.centers[best / nr];
    out.arg_radius = scan.radii[best % nr];
    return out;
}

inline NormResult norm(const RadialProfile& f, const NormSpec& spec, const ScanOptions& opt = {}) {
    return norm(f, spec, make_scan(f, spec.R, opt));
}

inline NormResult norm(const GridField& field, const NormSpec& spec, const ScanOptions& opt = {}) {
    return norm(RadialProfile::gridded(field), spec, opt);
}

/// sup over `centers` of ∫_{B(z,σ)} f.
inline double sup_ball_mass(const RadialProfile& f, const std::vector<double>& centers, double sigma) {
    if (centers.empty()) throw DomainError("sup_ball_mass: no centers");
    std::vector<double> m(centers.size());
    parallel_for(centers.size(), [&](std::size_t k) {
        m[k] = f.ball_integral(centers[k], sigma, PointTransform::identity());
    });
    return *std::max_element(m.begin(), m.end());
}

/// sup over the origin and all cell centers of the field's ball mass.
inline double sup_ball_mass(const GridField& field, double sigma) {
    std::vector<double> centers{0.0};
    for (std::size_t i = 0; i < field.size(); ++i) centers.push_back(field.center(i));
    return sup_ball_mass(RadialProfile::gridded(field), centers, sigma);
}

struct SolvabilityVerdict {
    Regime regime;
    double condition_value;
    double delta;
    bool met;
    double T_used;
    NormResult detail; ///< attaining center and radius behind condition_value
};

/// Evaluates the regime's sufficient smallness condition for existence on (0, T):
///   subcritical    sup_z ∫_{B(z,T^θ)} f · T^{-θ(N-2/(p-m))}
///   critical       sup η(σ/T^θ) Ψ_α^{-1}(avg Ψ_α(T^{1/(p-1)} f)),  σ < T^θ
///   supercritical  |||f|||_{N(p-m)/2, β; T^θ}   (T = ∞ allowed)
/// and compares it with δ. `beta_or_alpha` is α in the critical case and β
/// in the supercritical case; it is ignored below p_m.
inline SolvabilityVerdict check_condition(const ProblemParams& params, const RadialProfile& f, double T, double delta,
                                          double beta_or_alpha, const ScanOptions& opt = {}) {
    if (f.N() != params.N()) throw DomainError("check_condition: profile dimension differs from N");
    if (!(T > 0.0)) throw DomainError("check_condition: T must be > 0");
    const Regime regime = classify_regime(params);
    const Exponents ex = derive_exponents(params);
    SolvabilityVerdict v{regime, 0.0, delta, false, T, {}};
    switch (regime) {
    case Regime::Subcritical: {
        if (!std::isfinite(T)) throw DomainError("check_condition: subcritical condition needs finite T");
        const double R = std::pow(T, ex.theta);
        const ScanGrid scan = make_scan(f, std::numeric_limits<double>::infinity(), opt);
        const double mass = sup_ball_mass(f, scan.centers, R);
        v.condition_value = mass * std::pow(T, -ex.theta * (params.N() - scaling_exponent(params)));
        v.detail = {mass, 0.0, R, "centers=" + std::to_string(scan.centers.size()) + " radius=" + format_double(R)};
        break;
    }
    case Regime::Critical: {
        if (!(beta_or_alpha > 0.0)) throw DomainError("check_condition: critical case needs alpha > 0");
        v.detail = norm(f, NormSpec::orlicz_eta(params, beta_or_alpha, T), opt);
        v.condition_value = v.detail.value;
        break;
    }
    case Regime::Supercritical: {
        const OpenInterval range = admissible_beta_range(params);
        if (!range.contains(beta_or_alpha))
            throw DomainError("check_condition: beta = " + format_double(beta_or_alpha) + " outside (" +
                              format_double(range.lo) + ", " + format_double(range.hi) + ")");
        const double R = std::isinf(T) ? T : std::pow(T, ex.theta);
        const double q = 0.5 * params.N() * (params.p() - params.m());
        v.detail = norm(f, NormSpec::morrey(q, beta_or_alpha, R), opt);
        v.condition_value = v.detail.value;
        break;
    }
    }
    v.met = v.condition_value <= delta;
    return v;
}

inline void write_norm_csv(std::ostream& os, const std::vector<NormResult>& rows, std::string_view status = "ok") {
    CsvWriter w(os);
    w.header({"value", "center", "radius"});
    for (const auto& r : rows) w.row({r.value, r.arg_center, r.arg_radius});
    if (!rows.empty()) w.comment("grid", rows.front().grid_resolution);
    w.status(status);
}

} // namespace fdxlab
