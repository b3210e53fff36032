#pragma once

#include "fdxlab/error.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/geometry.hpp"
#include "fdxlab/grid_field.hpp"
#include "fdxlab/quadrature.hpp"
#include "fdxlab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>

namespace fdxlab {

enum class ProfileKind { Constant, PowerLaw, CriticalLog, Barenblatt, Gridded };

std::string_view to_string(ProfileKind k) noexcept;

/// log f(r) = slow − power·log r, with `slow` varying at most logarithmically.
/// Keeping the power separate lets r^k weights cancel it exactly.
struct LogParts {
    double slow;
    double power;
};

/// Pointwise gauge G applied before averaging: g(f) = G(scale·f) with G one
/// of identity, x^α or Ψ_α. Norms are built from ball averages of g(f).
struct PointTransform {
    enum class Kind { Identity, Power, Psi };
    Kind kind = Kind::Identity;
    double alpha = 1.0;
    double scale = 1.0;

    static PointTransform identity() { return {}; }
    static PointTransform power(double alpha) { return {Kind::Power, alpha, 1.0}; }
    static PointTransform orlicz(double alpha, double scale = 1.0) { return {Kind::Psi, alpha, scale}; }

    double apply(double v) const {
        const double x = scale * v;
        switch (kind) {
        case Kind::Identity: return x;
        case Kind::Power: return std::pow(x, alpha);
        case Kind::Psi: return psi(alpha, x);
        }
        return x;
    }

    /// log g given log f; −∞ maps to −∞.
    double log_apply(double log_f) const {
        if (log_f == -std::numeric_limits<double>::infinity()) return log_f;
        const double lx = std::log(scale) + log_f;
        switch (kind) {
        case Kind::Identity: return lx;
        case Kind::Power: return alpha * lx;
        case Kind::Psi: return lx + alpha * std::log(log_e_plus_exp(lx));
        }
        return lx;
    }

    /// log( g(f(r)) · r^k ) at log r = lr, cancelling powers of r exactly.
    double log_weighted(LogParts f, double lr, double k) const {
        const double ninf = -std::numeric_limits<double>::infinity();
        if (f.slow == ninf || scale == 0.0) return ninf;
        const double ls = std::log(scale) + f.slow;
        switch (kind) {
        case Kind::Identity: return ls + (k - f.power) * lr;
        case Kind::Power: return alpha * ls + (k - alpha * f.power) * lr;
        case Kind::Psi:
            return ls + (k - f.power) * lr + alpha * std::log(log_e_plus_exp(ls - f.power * lr));
        }
        return ninf;
    }

    /// Maps an average of g(f) back to the scale of f (G^{-1}, then /scale).
    double invert(double mean) const {
        switch (kind) {
        case Kind::Identity: return mean / scale;
        case Kind::Power: return std::pow(mean, 1.0 / alpha) / scale;
        case Kind::Psi: return psi_inv(alpha, mean) / scale;
        }
        return mean;
    }

    /// Exponent e with G(x) ~ x^e at large x, ignoring log factors.
    double growth_power() const { return kind == Kind::Power ? alpha : 1.0; }
};

/// Radial, nonnegative initial-data family f(x) = amp · base(stretch·|x|),
/// zero beyond an optional cutoff radius.
class RadialProfile {
public:
    struct Constant { double c; };
    struct PowerLaw { double c; double a; };   // c r^{-a}
    struct CriticalLog { double c; };          // c r^{-N} [log(e+1/r)]^{-N/2-1}
    struct Barenblatt { double m; double C_B; double t0; };
    struct Gridded { std::shared_ptr<const GridField> field; };
    using Base = std::variant<Constant, PowerLaw, CriticalLog, Barenblatt, Gridded>;

    static RadialProfile constant(int N, double c) {
        check_dim(N);
        check_coefficient(c);
        return RadialProfile(N, Constant{c});
    }
    static RadialProfile zero(int N) { return constant(N, 0.0); }

    static RadialProfile power_law(int N, double c, double a) {
        check_dim(N);
        check_coefficient(c);
        if (!(a >= 0.0 && a < N))
            throw IntegrabilityError("power_law: exponent a must satisfy 0 <= a < N for local integrability");
        return RadialProfile(N, PowerLaw{c, a});
    }

    static RadialProfile critical_log(int N, double c) {
        check_dim(N);
        check_coefficient(c);
        return RadialProfile(N, CriticalLog{c});
    }

    /// Source-free Barenblatt solution evaluated at time t0:
    /// U = t0^{-N/κ} (C_B + (1-m)/(2mκ) r² t0^{-2/κ})^{-1/(1-m)}, κ = N(m-1)+2 > 0.
    static RadialProfile barenblatt(int N, double m, double C_B, double t0) {
        check_dim(N);
        if (!(m > 0.0 && m < 1.0)) throw DomainError("barenblatt: m must lie in (0,1)");
        if (!(N * (m - 1.0) + 2.0 > 0.0)) throw DomainError("barenblatt: requires kappa > 0");
        if (!(C_B > 0.0) || !(t0 > 0.0)) throw DomainError("barenblatt: C_B and t0 must be positive");
        return RadialProfile(N, Barenblatt{m, C_B, t0});
    }

    static RadialProfile gridded(std::shared_ptr<const GridField> field) {
        if (!field) throw DomainError("gridded: null field");
        const int N = field->N();
        return RadialProfile(N, Gridded{std::move(field)});
    }
    static RadialProfile gridded(GridField field) {
        return gridded(std::make_shared<const GridField>(std::move(field)));
    }

    RadialProfile with_cutoff(double radius) const {
        if (!(radius > 0.0)) throw DomainError("with_cutoff: radius must be positive");
        RadialProfile out = *this;
        out.base_cutoff_ = std::min(base_cutoff_, radius * stretch_);
        return out;
    }

    /// r ↦ amplitude · f(stretch · r).
    RadialProfile scaled(double amplitude, double stretch) const {
        if (!(amplitude >= 0.0) || !(stretch > 0.0)) throw DomainError("scaled: invalid scaling");
        RadialProfile out = *this;
        out.amp_ *= amplitude;
        out.stretch_ *= stretch;
        return out;
    }

    int N() const noexcept { return N_; }
    ProfileKind kind() const noexcept { return static_cast<ProfileKind>(base_.index()); }
    const Base& base() const noexcept { return base_; }
    double amplitude() const noexcept { return amp_; }
    double stretch() const noexcept { return stretch_; }
    std::optional<double> cutoff() const noexcept {
        if (std::isinf(base_cutoff_)) return std::nullopt;
        return base_cutoff_ / stretch_;
    }

    bool singular_at_origin() const noexcept {
        if (amp_ == 0.0) return false;
        if (const auto* p = std::get_if<PowerLaw>(&base_)) return p->a > 0.0 && p->c > 0.0;
        if (const auto* q = std::get_if<CriticalLog>(&base_)) return q->c > 0.0;
        return false;
    }

    bool is_zero() const noexcept {
        if (amp_ == 0.0) return true;
        return std::visit(
            [](const auto& b) -> bool {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, Gridded>) return b.field->sup() == 0.0;
                else if constexpr (std::is_same_v<T, Barenblatt>) return false;
                else return b.c == 0.0;
            },
            base_);
    }

    /// Pointwise value; singular kinds return +∞ at r = 0.
    double eval(double r) const {
        if (!(r >= 0.0)) throw DomainError("eval: radius must be >= 0");
        if (r > 0.0) return std::exp(log_eval(std::log(r)));
        if (singular_at_origin()) return std::numeric_limits<double>::infinity();
        return amp_ * base_value_at_zero();
    }

    /// log f at log r (−∞ where f vanishes).
    double log_eval(double log_r) const {
        const double ninf = -std::numeric_limits<double>::infinity();
        if (amp_ == 0.0) return ninf;
        const double ly = log_r + std::log(stretch_);
        if (ly >= std::log(base_cutoff_)) return ninf;
        return std::log(amp_) + base_log_eval(ly);
    }

    /// ∫_{B(0,ρ)} g(f) dx.
    double centered_integral(double rho, const PointTransform& g, double tol = quad::kDefaultTol) const {
        if (!(rho > 0.0)) return 0.0;
        check_integrable(g);
        const PointTransform gb = folded(g);
        const double lam = stretch_;
        return std::pow(lam, -N_) * base_centered(rho * lam, gb, tol);
    }

    /// ∫_{B(z,σ)} g(f) dx for a center at distance d from the origin.
    double ball_integral(double d, double sigma, const PointTransform& g, double tol = quad::kDefaultTol) const {
        if (!(sigma > 0.0)) throw DomainError("ball_integral: sigma must be positive");
        if (!(d >= 0.0)) throw DomainError("ball_integral: center distance must be >= 0");
        check_integrable(g);
        const PointTransform gb = folded(g);
        const double lam = stretch_;
        return std::pow(lam, -N_) * base_ball(d * lam, sigma * lam, gb, tol);
    }

    /// ∫_{r0 < |x| < r1} g(f) dx.
    double shell_integral(double r0, double r1, const PointTransform& g, double tol = quad::kDefaultTol) const {
        if (!(r1 > r0)) return 0.0;
        if (!(r0 > 0.0)) return centered_integral(r1, g, tol);
        const PointTransform gb = folded(g);
        const double lam = stretch_;
        return std::pow(lam, -N_) * base_shell(r0 * lam, r1 * lam, gb, tol);
    }

    /// Throws IntegrabilityError when g∘f is not locally integrable near 0.
    void check_integrable(const PointTransform& g) const {
        if (!singular_at_origin()) return;
        if (const auto* p = std::get_if<PowerLaw>(&base_)) {
            if (!(p->a * g.growth_power() < N_))
                throw IntegrabilityError("power-law profile: |x|^{-a} raised to the averaging power is not locally integrable");
        } else if (std::holds_alternative<CriticalLog>(base_)) {
            // c r^{-N} L^{-N/2-1}: integrable itself; Ψ_α of it iff α < N/2; any power > 1 diverges.
            if (g.kind == PointTransform::Kind::Power && g.alpha > 1.0)
                throw IntegrabilityError("critical profile is not in L^alpha_loc for alpha > 1");
            if (g.kind == PointTransform::Kind::Psi && !(g.alpha < 0.5 * N_))
                throw IntegrabilityError("critical profile: Psi_alpha of it is locally integrable only for alpha < N/2");
        }
    }

private:
    RadialProfile(int N, Base b) : N_(N), base_(std::move(b)) {}

    static void check_dim(int N) {
        if (N < 1 || N > 3) throw DomainError("profiles: supported dimensions are N in {1,2,3}");
    }
    static void check_coefficient(double c) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("profiles: coefficient c must be >= 0 and finite");
    }

    PointTransform folded(const PointTransform& g) const {
        PointTransform out = g;
        out.scale *= amp_;
        return out;
    }

    double base_value_at_zero() const {
        return std::visit(
            [&](const auto& b) -> double {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, Constant>) return b.c;
                else if constexpr (std::is_same_v<T, Barenblatt>) return std::exp(barenblatt_log(b, -1e300));
                else if constexpr (std::is_same_v<T, Gridded>) return (*b.field)[0];
                else if constexpr (std::is_same_v<T, PowerLaw>) return b.a == 0.0 ? b.c : 0.0;
                else return 0.0;
            },
            base_);
    }

    double barenblatt_log(const Barenblatt& b, double ly) const {
        const double kappa = N_ * (b.m - 1.0) + 2.0;
        const double k = (1.0 - b.m) / (2.0 * b.m * kappa);
        const double lt = std::log(b.t0);
        // log(C_B + k r² t0^{-2/κ}) via log-sum-exp
        const double x1 = std::log(b.C_B);
        const double x2 = std::log(k) + 2.0 * ly - 2.0 / kappa * lt;
        const double hi = std::max(x1, x2);
        const double lse = hi + std::log1p(std::exp(std::min(x1, x2) - hi));
        return -(N_ / kappa) * lt - lse / (1.0 - b.m);
    }

    LogParts base_log_parts(double ly) const {
        const double ninf = -std::numeric_limits<double>::infinity();
        return std::visit(
            [&](const auto& b) -> LogParts {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, Constant>) return {b.c > 0.0 ? std::log(b.c) : ninf, 0.0};
                else if constexpr (std::is_same_v<T, PowerLaw>) return {b.c > 0.0 ? std::log(b.c) : ninf, b.a};
                else if constexpr (std::is_same_v<T, CriticalLog>) {
                    if (!(b.c > 0.0)) return {ninf, 0.0};
                    return {std::log(b.c) - (0.5 * N_ + 1.0) * std::log(log_e_plus_exp(-ly)), double(N_)};
                } else if constexpr (std::is_same_v<T, Barenblatt>) return {barenblatt_log(b, ly), 0.0};
                else {
                    const std::size_t i = b.field->cell_of(std::exp(ly));
                    if (i >= b.field->size()) return {ninf, 0.0};
                    const double v = (*b.field)[i];
                    return {v > 0.0 ? std::log(v) : ninf, 0.0};
                }
            },
            base_);
    }

    /// Base-coordinate parts with the cutoff applied.
    LogParts cut_parts(double ly) const {
        if (ly >= std::log(base_cutoff_)) return {-std::numeric_limits<double>::infinity(), 0.0};
        return base_log_parts(ly);
    }

    double base_log_eval(double ly) const {
        const LogParts p = base_log_parts(ly);
        return p.slow - p.power * ly;
    }

    // ---- base-coordinate integrals (amp folded into g, stretch = 1) ----

    double base_centered(double rho, const PointTransform& g, double tol) const {
        rho = std::min(rho, base_cutoff_);
        if (!(rho > 0.0)) return 0.0;
        if (const auto* c = std::get_if<Constant>(&base_)) return g.apply(c->c) * ball_volume(N_, rho);
        if (const auto* p = std::get_if<PowerLaw>(&base_); p && g.kind != PointTransform::Kind::Psi) {
            const double e = g.growth_power();
            const double coeff = std::pow(g.scale * p->c, e);
            return coeff * sphere_area(N_) * std::pow(rho, N_ - p->a * e) / (N_ - p->a * e);
        }
        if (const auto* gr = std::get_if<Gridded>(&base_)) {
            return gr->field->centered_integral(rho, [&](double v) { return g.apply(v); });
        }
        // τ = log(ρ/r): ω_N ∫_0^∞ g(f(ρ e^{-τ})) (ρ e^{-τ})^N dτ
        const double lrho = std::log(rho);
        auto h = [&](double tau) {
            const double lr = lrho - tau;
            return std::exp(g.log_weighted(base_log_parts(lr), lr, N_));
        };
        return sphere_area(N_) * quad::half_line(h, tol, "centered ball integral").value;
    }

    double base_shell(double r0, double r1, const PointTransform& g, double tol) const {
        const double hi = std::min(r1, base_cutoff_);
        if (!(hi > r0)) return 0.0;
        if (const auto* c = std::get_if<Constant>(&base_))
            return g.apply(c->c) * (ball_volume(N_, hi) - ball_volume(N_, r0));
        if (std::holds_alternative<Gridded>(base_) ||
            (std::holds_alternative<PowerLaw>(base_) && g.kind != PointTransform::Kind::Psi))
            return base_centered(hi, g, tol) - base_centered(r0, g, tol);
        const double omega = sphere_area(N_);
        auto h = [&](double r) {
            const double lr = std::log(r);
            return omega * std::exp(g.log_weighted(base_log_parts(lr), lr, N_ - 1));
        };
        return quad::finite(h, r0, hi, tol, "shell integral").value;
    }

    double base_ball(double d, double sigma, const PointTransform& g, double tol) const {
        if (d == 0.0) return base_centered(sigma, g, tol);
        if (const auto* c = std::get_if<Constant>(&base_)) {
            const double vol = std::isinf(base_cutoff_) ? ball_volume(N_, sigma)
                                                         : ball_intersection_volume(N_, base_cutoff_, d, sigma);
            return g.apply(c->c) * vol;
        }
        if (N_ == 1) {
            // 1-D ball [d-σ, d+σ]: the part |x| < σ-d is covered twice by the radial shells.
            const double inner = std::max(0.0, sigma - d);
            return base_centered(inner, g, tol) +
                   0.5 * (base_centered(sigma + d, g, tol) - base_centered(std::abs(sigma - d), g, tol));
        }
        const double full = d < sigma ? base_centered(sigma - d, g, tol) : 0.0;
        const double lo = std::abs(sigma - d);
        const double hi = std::min(sigma + d, base_cutoff_);
        if (!(hi > lo)) return full;
        const double omega = sphere_area(N_);

        if (const auto* gr = std::get_if<Gridded>(&base_)) {
            // Exact: each cell is an annulus, intersected with the ball in closed form.
            const GridField& F = *gr->field;
            auto gv = [&](double v) { return g.apply(v); };
            const std::size_t i0 = std::min(F.cell_of(lo), F.size());
            const double inner = std::min(F.face(i0), base_cutoff_);
            double total = d < sigma ? F.centered_integral(inner, gv) : 0.0;
            double prev = ball_intersection_volume(N_, inner, d, sigma);
            for (std::size_t i = i0; i < F.size() && F.face(i) < std::min(sigma + d, base_cutoff_); ++i) {
                const double outer = std::min(F.face(i + 1), base_cutoff_);
                const double cur = ball_intersection_volume(N_, outer, d, sigma);
                total += g.apply(F[i]) * (cur - prev);
                prev = cur;
            }
            return total;
        }

        if (lo > 0.0) {
            // Lens in τ = log(hi/r) so singular profiles stay well scaled near the origin.
            const double lhi = std::log(hi);
            auto h = [&](double tau) {
                const double lr = lhi - tau;
                return omega * std::exp(g.log_weighted(cut_parts(lr), lr, N_)) *
                       sphere_fraction_in_ball(N_, std::exp(lr), d, sigma);
            };
            return full + quad::finite(h, 0.0, lhi - std::log(lo), tol, "off-center ball integral").value;
        }
        // d == σ: the lens reaches the origin, where the sphere fraction tends to 1/2.
        // Split off 1/2 of the centered mass; the remainder has a weight vanishing like r.
        auto half_minus_frac = [&](double r) {
            return N_ == 2 ? std::asin(std::min(1.0, r / (2.0 * d))) / std::numbers::pi : r / (4.0 * d);
        };
        const double lhi = std::log(hi);
        auto h = [&](double tau) {
            const double lr = lhi - tau;
            return omega * std::exp(g.log_weighted(cut_parts(lr), lr, N_)) * half_minus_frac(std::exp(lr));
        };
        return 0.5 * base_centered(hi, g, tol) - quad::half_line(h, tol, "off-center ball integral").value;
    }

    int N_;
    Base base_;
    double amp_ = 1.0;
    double stretch_ = 1.0;
    double base_cutoff_ = std::numeric_limits<double>::infinity();
};

inline std::string_view to_string(ProfileKind k) noexcept {
    switch (k) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::PowerLaw: return "power";
    case ProfileKind::CriticalLog: return "critical";
    case ProfileKind::Barenblatt: return "barenblatt";
    case ProfileKind::Gridded: return "gridded";
    }
    return "?";
}

/// The sharp singular profile for p ≥ p_m: c|x|^{-N}[log(e+1/|x|)]^{-N/2-1}
/// at p = p_m and c|x|^{-2/(p-m)} above it.
inline RadialProfile critical_profile(const ProblemParams& params, double c) {
    switch (classify_regime(params)) {
    case Regime::Critical: return RadialProfile::critical_log(params.N(), c);
    case Regime::Supercritical: return RadialProfile::power_law(params.N(), c, scaling_exponent(params));
    case Regime::Subcritical: break;
    }
    throw DomainError("critical_profile: no sharp singular profile in the subcritical regime");
}

/// Barenblatt value U(r, t) for the source-free fast diffusion equation.
inline double barenblatt_value(int N, double m, double C_B, double t, double r) {
    return RadialProfile::barenblatt(N, m, C_B, t).eval(r);
}

/// Mean of g(f) over B(z, σ), |z| = d.
inline double ball_mean(const RadialProfile& f, double d, double sigma, const PointTransform& g,
                        double tol = quad::kDefaultTol) {
    return f.ball_integral(d, sigma, g, tol) / ball_volume(f.N(), sigma);
}

inline double ball_average(const RadialProfile& f, double d, double sigma, double quad_tol = quad::kDefaultTol) {
    return ball_mean(f, d, sigma, PointTransform::identity(), quad_tol);
}

inline double ball_average(const RadialProfile& f, std::span<const double> z, double sigma,
                           double quad_tol = quad::kDefaultTol) {
    if (static_cast<int>(z.size()) != f.N()) throw DomainError("ball_average: center dimension mismatch");
    return ball_average(f, euclidean_norm(z), sigma, quad_tol);
}

} // namespace fdxlab
