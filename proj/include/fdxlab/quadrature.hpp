#pragma once

// Thin wrappers over Boost.Math double-exponential quadrature. Callers
// phrase integrands in log-radius variables so the singular end of an
// integral becomes an exponentially or algebraically decaying tail.

#include "fdxlab/error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace fdxlab::quad {

inline constexpr double kDefaultTol = 1e-10;

struct Estimate {
    double value;
    double error;
};

namespace detail {

inline void check(const Estimate& e, double l1, double tol, const char* what) {
    if (!std::isfinite(e.value))
        throw IntegrabilityError(std::string(what) + ": integral is not finite");
    // A divergent or unresolved integrand shows up as an error estimate far
    // above the requested tolerance.
    if (e.error > std::max(1e-300, 1e4 * tol * std::max(l1, std::abs(e.value))))
        throw IntegrabilityError(std::string(what) + ": quadrature did not converge (error estimate " +
                                 std::to_string(e.error) + ", value " + std::to_string(e.value) + ")");
}

// One rule per thread: the rules extend their abscissa tables lazily.
inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    return rule;
}

inline boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
    thread_local boost::math::quadrature::exp_sinh<double> rule(12);
    return rule;
}

} // namespace detail

/// ∫_a^b f on a finite interval, mapped affinely onto [-1, 1]. The
/// integrand may be evaluated at (rounded) endpoints, so it must be finite there.
template <class F>
Estimate finite(F&& f, double a, double b, double tol = kDefaultTol, const char* what = "quadrature") {
    if (!(b > a)) return {0.0, 0.0};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double x) { return f(std::clamp(mid + half * x, a, b)); };
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double v = half * detail::tanh_sinh_rule().integrate(g, -1.0, 1.0, tol, &err, &l1, &levels);
    err *= half;
    l1 *= half;
    Estimate e{v, err};
    detail::check(e, l1, tol, what);
    return e;
}

/// ∫_0^∞ f for decaying f.
template <class F>
Estimate half_line(F&& f, double tol = kDefaultTol, const char* what = "quadrature") {
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double v = detail::exp_sinh_rule().integrate(
        f, 0.0, std::numeric_limits<double>::infinity(), tol, &err, &l1, &levels);
    Estimate e{v, err};
    detail::check(e, l1, tol, what);
    return e;
}

/// Fixed 8-point Gauss–Legendre on [a,b]; for smooth pieces inside one grid cell.
template <class F>
double gauss8(F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss<double, 8>::integrate(f, a, b);
}

} // namespace fdxlab::quad
