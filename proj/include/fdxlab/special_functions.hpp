#pragma once

#include "fdxlab/error.hpp"
#include "fdxlab/exponents.hpp"
#include "fdxlab/geometry.hpp"
#include "fdxlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace fdxlab {

/// Orlicz gauge Ψ_α(ξ) = ξ [log(e + ξ)]^α.
inline double psi(double alpha, double xi) {
    if (!(xi >= 0.0)) throw DomainError("psi: argument must be >= 0");
    if (!(alpha >= 0.0)) throw DomainError("psi: alpha must be >= 0");
    if (xi == 0.0) return 0.0;
    return xi * std::pow(std::log(std::numbers::e + xi), alpha);
}

inline double psi_derivative(double alpha, double xi) {
    const double L = std::log(std::numbers::e + xi);
    return std::pow(L, alpha) + alpha * xi * std::pow(L, alpha - 1.0) / (std::numbers::e + xi);
}

/// Inverse of Ψ_α: bisection on [0, y] (Ψ_α(y) ≥ y) followed by one Newton polish.
/// Returns x with |Ψ_α(x) − y| ≤ tol·max(1, y) or throws ConvergenceError.
inline double psi_inv(double alpha, double y, double tol = 1e-13) {
    if (!(y >= 0.0)) throw DomainError("psi_inv: argument must be >= 0");
    if (!(tol > 0.0)) throw DomainError("psi_inv: tol must be > 0");
    if (y == 0.0) return 0.0;
    if (!std::isfinite(y)) return y;
    const double target = tol * std::max(1.0, y);
    double lo = 0.0, hi = y;
    double x = 0.5 * (lo + hi);
    constexpr int kMaxIter = 400;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        x = 0.5 * (lo + hi);
        const double r = psi(alpha, x) - y;
        if (std::abs(r) <= 0.01 * target || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
        (r < 0.0 ? lo : hi) = x;
    }
    // Newton polish, kept only when it stays in the bracket and improves the residual.
    const double r0 = psi(alpha, x) - y;
    const double xn = x - r0 / psi_derivative(alpha, x);
    if (xn >= lo && xn <= hi && std::abs(psi(alpha, xn) - y) < std::abs(r0)) x = xn;
    if (std::abs(psi(alpha, x) - y) > target)
        throw ConvergenceError("psi_inv: no convergence for y = " + std::to_string(y));
    return x;
}

/// log(e + 1/ξ) for ξ > 0, stable as ξ → 0.
inline double log_e_plus_inv(double xi) noexcept { return log_e_plus_exp(-std::log(xi)); }

/// η(ξ) = ξ^N [log(e + 1/ξ)]^{N/2}, with η(0) = 0.
inline double eta(int N, double xi) {
    if (!(xi >= 0.0)) throw DomainError("eta: argument must be >= 0");
    if (N < 1) throw DomainError("eta: N must be >= 1");
    if (xi == 0.0) return 0.0;
    return std::pow(xi, N) * std::pow(log_e_plus_inv(xi), 0.5 * N);
}

namespace detail {

/// s·η(s)^{m-1} ds expressed in τ = −log s: e^{−κτ} [log(e + e^τ)]^{N(m−1)/2} dτ.
inline double gamma_integrand_tau(const ProblemParams& params, double kappa, double tau) {
    const double log_factor = 0.5 * params.N() * (params.m() - 1.0) * std::log(log_e_plus_exp(tau));
    return std::exp(-kappa * tau + log_factor);
}

inline double require_positive_kappa(const ProblemParams& params, const char* who) {
    const double kappa = derive_exponents(params).kappa;
    if (!(kappa > 0.0))
        throw DomainError(std::string(who) + ": requires kappa = N(m-1)+2 > 0 (got " + std::to_string(kappa) + ")");
    return kappa;
}

/// ∫_0^g s η(s)^{m−1} ds.
inline double gamma_cumulative(const ProblemParams& params, double kappa, double g) {
    if (g <= 0.0) return 0.0;
    const double tau0 = -std::log(g);
    return quad::half_line(
               [&](double u) { return gamma_integrand_tau(params, kappa, tau0 + u); }, 1e-13,
               "gamma cumulative integral")
        .value;
}

} // namespace detail

/// C_η = ∫_0^1 s η(s)^{m−1} ds.
inline double c_eta(const ProblemParams& params) {
    const double kappa = detail::require_positive_kappa(params, "c_eta");
    return detail::gamma_cumulative(params, kappa, 1.0);
}

/// γ on [0,1] defined by ∫_0^{γ(ξ)} s η(s)^{m−1} ds = C_η ξ.
///
/// Holds a 1024-node monotone (PCHIP) table of log γ against log ξ, nodes
/// geometric on [1e-12, 1] plus ξ = 0. `operator()` seeds a safeguarded
/// Newton iteration from the table and solves the implicit equation to
/// 1e-12 relative residual; `interpolate()` is the table-only fast path.
class GammaFn {
public:
    static constexpr std::size_t kTableSize = 1024;
    static constexpr double kXiMin = 1e-12;

    explicit GammaFn(ProblemParams params)
        : params_(params),
          kappa_(detail::require_positive_kappa(params, "GammaFn")),
          c_eta_(detail::gamma_cumulative(params, kappa_, 1.0)) {
        build_table();
    }

    const ProblemParams& params() const noexcept { return params_; }
    double c_eta() const noexcept { return c_eta_; }

    double operator()(double xi) const {
        check_domain(xi);
        if (xi == 0.0) return 0.0;
        if (xi == 1.0) return 1.0;
        return solve(xi, interpolate(xi));
    }

    double interpolate(double xi) const {
        check_domain(xi);
        if (xi == 0.0) return 0.0;
        if (xi == 1.0) return 1.0;
        const double lx = std::log(xi);
        if (lx <= log_xi_.front()) {
            // γ ≍ ξ^{1/κ} up to a slowly varying factor below the table.
            return std::exp(log_gamma_.front() + slope_.front() * (lx - log_xi_.front()));
        }
        const auto it = std::upper_bound(log_xi_.begin(), log_xi_.end(), lx);
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - log_xi_.begin()) - 1, log_xi_.size() - 2);
        const double h = log_xi_[k + 1] - log_xi_[k];
        const double t = (lx - log_xi_[k]) / h;
        const double h00 = (2 * t * t * t - 3 * t * t + 1), h10 = (t * t * t - 2 * t * t + t);
        const double h01 = (-2 * t * t * t + 3 * t * t), h11 = (t * t * t - t * t);
        const double lg = h00 * log_gamma_[k] + h10 * h * slope_[k] + h01 * log_gamma_[k + 1] + h11 * h * slope_[k + 1];
        return std::min(1.0, std::exp(lg));
    }

    /// Residual of the defining equation, relative to C_η ξ.
    double relative_residual(double xi, double g) const {
        const double target = c_eta_ * xi;
        return (detail::gamma_cumulative(params_, kappa_, g) - target) / target;
    }

private:
    static void check_domain(double xi) {
        if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("gamma: argument must lie in [0,1]");
    }

    // Newton in log g on F(lg) = I(e^lg) − C_η ξ with F' = g² η(g)^{m−1}; bisection fallback.
    double solve(double xi, double guess) const {
        const double target = c_eta_ * xi;
        double lo = -std::numeric_limits<double>::infinity(), hi = 0.0; // bracket in log g
        double lg = std::log(std::clamp(guess, 1e-300, 1.0));
        for (int it = 0; it < 100; ++it) {
            const double g = std::exp(lg);
            const double F = detail::gamma_cumulative(params_, kappa_, g) - target;
            if (std::abs(F) <= 1e-12 * target) return g;
            (F < 0.0 ? lo : hi) = lg;
            const double dF = g * g * std::pow(eta(params_.N(), g), params_.m() - 1.0);
            double next = lg - F / dF;
            if (!(next > lo && next < hi)) {
                next = std::isfinite(lo) ? 0.5 * (lo + hi) : lg - 2.0;
            }
            if (std::abs(next - lg) < 1e-15) return std::exp(next);
            lg = next;
        }
        throw ConvergenceError("gamma: Newton iteration did not converge");
    }

    void build_table() {
        const std::size_t n = kTableSize - 1; // ξ = 0 is the extra node
        log_xi_.resize(n);
        log_gamma_.resize(n);
        const double a = std::log(kXiMin);
        double guess = std::pow(kXiMin, 1.0 / kappa_);
        for (std::size_t k = 0; k < n; ++k) {
            log_xi_[k] = a + (0.0 - a) * static_cast<double>(k) / static_cast<double>(n - 1);
            const double xi = std::exp(log_xi_[k]);
            const double g = (k + 1 == n) ? 1.0 : solve(xi, guess);
            log_gamma_[k] = std::log(g);
            guess = g;
        }
        log_xi_.back() = 0.0;
        // Fritsch–Carlson slopes.
        std::vector<double> delta(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k)
            delta[k] = (log_gamma_[k + 1] - log_gamma_[k]) / (log_xi_[k + 1] - log_xi_[k]);
        slope_.assign(n, 0.0);
        slope_.front() = delta.front();
        slope_.back() = delta.back();
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (delta[k - 1] * delta[k] <= 0.0) continue;
            slope_[k] = 2.0 / (1.0 / delta[k - 1] + 1.0 / delta[k]);
        }
    }

    ProblemParams params_;
    double kappa_;
    double c_eta_;
    std::vector<double> log_xi_;
    std::vector<double> log_gamma_;
    std::vector<double> slope_;
};

inline double gamma_fn(const GammaFn& g, double xi) { return g(xi); }

/// Range [lo, hi] of a ratio that should be bounded above and below;
/// C = max(hi, 1/lo) is the two-sided equivalence constant.
struct MeasuredConstant {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t samples = 0;

    void add(double r) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        ++samples;
    }
    double C() const { return std::max(hi, 1.0 / lo); }
};

namespace detail {
// 0 followed by `per_decade` log-spaced points per decade on [x_min, x_max].
inline std::vector<double> log_grid_with_zero(double x_min, double x_max, int per_decade) {
    std::vector<double> xs{0.0};
    const int n = static_cast<int>(std::ceil(per_decade * std::log10(x_max / x_min)));
    for (int k = 0; k <= n; ++k) xs.push_back(x_min * std::pow(x_max / x_min, static_cast<double>(k) / n));
    return xs;
}
} // namespace detail

/// Ψ_α^{-1}(ξ) / (ξ [log(e+ξ)]^{-α}) over ξ ∈ (0, ξ_max]; the ratio at ξ → 0 is 1.
inline MeasuredConstant measure_psi_inv_equivalence(double alpha, double xi_max = 1e8, int per_decade = 50) {
    MeasuredConstant mc;
    for (double xi : detail::log_grid_with_zero(1e-8, xi_max, per_decade)) {
        if (xi == 0.0) continue;
        mc.add(psi_inv(alpha, xi) / (xi * std::pow(std::log(std::numbers::e + xi), -alpha)));
    }
    return mc;
}

/// Ψ_α(kξ) / (k Ψ_α(ξ)) over ξ ∈ (0, ξ_max].
inline MeasuredConstant measure_psi_homogeneity(double alpha, double k, double xi_max = 1e8, int per_decade = 50) {
    if (!(k > 0.0)) throw DomainError("measure_psi_homogeneity: k must be > 0");
    MeasuredConstant mc;
    for (double xi : detail::log_grid_with_zero(1e-8, xi_max, per_decade)) {
        if (xi == 0.0) continue;
        mc.add(psi(alpha, k * xi) / (k * psi(alpha, xi)));
    }
    return mc;
}

/// max of Ψ_α^{-1}(a+b) / (Ψ_α^{-1}(a) + Ψ_α^{-1}(b)) over a grid of a, b in
/// [0, ab_max] (not both zero); the subadditivity constant is `hi`.
inline MeasuredConstant measure_psi_inv_subadditivity(double alpha, double ab_max = 1e6, int per_decade = 8) {
    MeasuredConstant mc;
    const auto grid = detail::log_grid_with_zero(1e-6, ab_max, per_decade);
    std::vector<double> inv;
    for (double x : grid) inv.push_back(psi_inv(alpha, x));
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i; j < grid.size(); ++j) {
            if (grid[i] == 0.0 && grid[j] == 0.0) continue;
            mc.add(psi_inv(alpha, grid[i] + grid[j]) / (inv[i] + inv[j]));
        }
    return mc;
}

/// γ(ξ)² η(γ(ξ))^{m-1} / ξ over ξ ∈ [ξ_min, 1].
inline MeasuredConstant measure_gamma_equivalence(const GammaFn& g, double xi_min = 1e-6, int per_decade = 50) {
    MeasuredConstant mc;
    const double m = g.params().m();
    for (double xi : detail::log_grid_with_zero(xi_min, 1.0, per_decade)) {
        if (xi == 0.0) continue;
        const double v = g(xi);
        mc.add(v * v * std::pow(eta(g.params().N(), v), m - 1.0) / xi);
    }
    return mc;
}

} // namespace fdxlab
