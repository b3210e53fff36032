#pragma once

#include "fdxlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

namespace fdxlab {

/// Space dimension N with diffusion exponent m and source exponent p for
/// u_t = Δu^m + u^p. Construction enforces N ≥ 1, 0 < m < 1, p > 1.
class ProblemParams {
public:
    ProblemParams(int N, double m, double p) : N_(N), m_(m), p_(p) {
        if (N < 1) throw DomainError("ProblemParams: N must be >= 1, got " + std::to_string(N));
        if (!(m > 0.0 && m < 1.0)) throw DomainError("ProblemParams: m must lie in (0,1), got " + std::to_string(m));
        if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("ProblemParams: p must be > 1, got " + std::to_string(p));
    }

    int N() const noexcept { return N_; }
    double m() const noexcept { return m_; }
    double p() const noexcept { return p_; }

    friend bool operator==(const ProblemParams&, const ProblemParams&) = default;

private:
    int N_;
    double m_;
    double p_;
};

struct Exponents {
    double p_m;         // m + 2/N
    double theta;       // (p-m) / (2(p-1))
    double theta_prime; // 1/theta
    double kappa;       // N(m-1) + 2
};

inline Exponents derive_exponents(const ProblemParams& params) noexcept {
    const double N = params.N();
    const double m = params.m();
    const double p = params.p();
    return Exponents{
        .p_m = m + 2.0 / N,
        .theta = (p - m) / (2.0 * (p - 1.0)),
        .theta_prime = 2.0 * (p - 1.0) / (p - m),
        .kappa = N * (m - 1.0) + 2.0,
    };
}

/// Exponent of the sharp power profile and of the scaling u_λ = λ^a u(λx, λ^θ' t).
inline double scaling_exponent(const ProblemParams& params) noexcept {
    return 2.0 / (params.p() - params.m());
}

enum class Regime { Subcritical, Critical, Supercritical };

inline constexpr double kDefaultCriticalTol = 1e-12;

inline Regime classify_regime(const ProblemParams& params, double rel_tol = kDefaultCriticalTol) {
    if (!(rel_tol >= 0.0)) throw DomainError("classify_regime: rel_tol must be >= 0");
    const double p_m = derive_exponents(params).p_m;
    const double gap = params.p() - p_m;
    if (std::abs(gap) <= rel_tol * std::max(1.0, p_m)) return Regime::Critical;
    return gap < 0.0 ? Regime::Subcritical : Regime::Supercritical;
}

inline std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::Supercritical: return "Supercritical";
    }
    return "?";
}

struct KappaR {
    double value;
    bool positive;
};

/// κ_r = N(m-1) + 2r, the exponent governing L^r → L^∞ smoothing.
inline KappaR kappa_r(const ProblemParams& params, double r) {
    if (!(r >= 1.0)) throw DomainError("kappa_r: r must be >= 1");
    const double v = params.N() * (params.m() - 1.0) + 2.0 * r;
    return {v, v > 0.0};
}

/// Open interval (lo, hi); empty when lo >= hi.
struct OpenInterval {
    double lo;
    double hi;
    bool empty() const noexcept { return !(lo < hi); }
    bool contains(double x) const noexcept { return x > lo && x < hi; }
};

/// Admissible Morrey integrability exponents β for the supercritical
/// smallness condition: 1 < β < N(p-m)/2 with κ_β > 0.
inline OpenInterval admissible_beta_range(const ProblemParams& params) {
    if (classify_regime(params) != Regime::Supercritical)
        throw DomainError("admissible_beta_range: requires the supercritical regime (p > m + 2/N)");
    const double N = params.N();
    // κ_β > 0  <=>  β > N(1-m)/2
    const double lo = std::max(1.0, N * (1.0 - params.m()) / 2.0);
    const double hi = N * (params.p() - params.m()) / 2.0;
    return {lo, hi};
}

} // namespace fdxlab
