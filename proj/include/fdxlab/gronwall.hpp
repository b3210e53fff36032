#pragma once

#include "fdxlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace fdxlab {

/// Coefficients of f' ≤ A2 f^m + A3 f, f(0) ≤ A1 on (0, T).
struct GronwallCoeffs {
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
    double m = 0.5;
    double T = 1.0;

    void validate() const {
        if (!(A1 >= 0.0) || !(A2 >= 0.0) || !(A3 >= 0.0) || !std::isfinite(A1 + A2 + A3))
            throw DomainError("GronwallCoeffs: A1, A2, A3 must be finite and >= 0");
        if (!(m > 0.0 && m < 1.0)) throw DomainError("GronwallCoeffs: m must lie in (0,1)");
        if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("GronwallCoeffs: T must be finite and > 0");
    }
};

namespace detail {
// Evaluation without the t ∈ (0,T) check; t = 0 gives A1.
inline double gronwall_envelope(const GronwallCoeffs& c, double t) {
    const double k = 1.0 - c.m;
    const double base = (c.A1 == 0.0 ? 0.0 : std::pow(c.A1, k)) + k * c.A2 * t;
    if (base == 0.0) return 0.0;
    return std::exp(c.A3 * t) * std::pow(base, 1.0 / k);
}
} // namespace detail

/// e^{A3 t} (A1^{1-m} + (1-m) A2 t)^{1/(1-m)}.
inline double gronwall_bound(const GronwallCoeffs& c, double t) {
    c.validate();
    if (!(t > 0.0 && t < c.T)) throw DomainError("gronwall_bound: t must lie in (0, T)");
    return detail::gronwall_envelope(c, t);
}

struct GronwallReport {
    double max_gap = 0.0;          ///< max over nodes of g(t) - bound(t)
    double max_relative_gap = 0.0; ///< same, divided by bound(t)
    double worst_t = 0.0;          ///< node attaining max_relative_gap
    int n_steps = 0;
};

/// Integrates g' = A2 g^m + A3 g, g(0) = A1 with classical RK4 on n_steps
/// uniform steps over [0, T] and compares with the bound at interior nodes.
inline GronwallReport verify_against_ode(const GronwallCoeffs& c, int n_steps) {
    c.validate();
    if (n_steps < 100) throw DomainError("verify_against_ode: n_steps must be >= 100");
    const double h = c.T / n_steps;
    if (!(h > 0.0) || c.T + h == c.T) throw ConvergenceError("verify_against_ode: step size underflow");
    auto rhs = [&](double g) { return c.A2 * std::pow(std::max(g, 0.0), c.m) + c.A3 * g; };
    GronwallReport rep;
    rep.n_steps = n_steps;
    rep.max_gap = -std::numeric_limits<double>::infinity();
    rep.max_relative_gap = -std::numeric_limits<double>::infinity();
    double g = c.A1;
    for (int k = 1; k < n_steps; ++k) {
        const double k1 = rhs(g);
        const double k2 = rhs(g + 0.5 * h * k1);
        const double k3 = rhs(g + 0.5 * h * k2);
        const double k4 = rhs(g + h * k3);
        g += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        const double t = k * h;
        const double b = detail::gronwall_envelope(c, t);
        const double gap = g - b;
        const double rel = b > 0.0 ? gap / b : (gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        rep.max_gap = std::max(rep.max_gap, gap);
        if (rel > rep.max_relative_gap) {
            rep.max_relative_gap = rel;
            rep.worst_t = t;
        }
    }
    return rep;
}

struct GronwallDraw {
    GronwallCoeffs coeffs;
    GronwallReport report;
    bool pass;
};

/// Seeded random coefficients: A1, A2, A3 ~ U[0,2], m from {0.3, 0.5, 0.9},
/// T ~ U[0.1, 2]. A draw passes when the relative gap is at most rel_tol.
inline std::vector<GronwallDraw> gronwall_random_check(std::uint64_t seed, int draws, int n_steps = 2000,
                                                       double rel_tol = 1e-8) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(0.0, 2.0), horizon(0.1, 2.0);
    std::uniform_int_distribution<int> pick(0, 2);
    constexpr double ms[] = {0.3, 0.5, 0.9};
    std::vector<GronwallDraw> out;
    out.reserve(static_cast<std::size_t>(std::max(draws, 0)));
    for (int i = 0; i < draws; ++i) {
        GronwallCoeffs c;
        c.A1 = coef(rng);
        c.A2 = coef(rng);
        c.A3 = coef(rng);
        c.m = ms[pick(rng)];
        c.T = horizon(rng);
        const auto rep = verify_against_ode(c, n_steps);
        out.push_back({c, rep, rep.max_relative_gap <= rel_tol});
    }
    return out;
}

} // namespace fdxlab
