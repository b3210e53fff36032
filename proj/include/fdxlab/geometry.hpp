#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace fdxlab {

/// Surface measure of the unit sphere in R^N (2 for N=1: the two endpoints).
inline double sphere_area(int N) noexcept {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

inline double ball_volume(int N, double radius) noexcept {
    return sphere_area(N) * std::pow(radius, N) / N;
}

/// Fraction of the sphere |x| = r lying inside B(z, sigma) with |z| = d.
inline double sphere_fraction_in_ball(int N, double r, double d, double sigma) noexcept {
    if (d == 0.0) return r < sigma ? 1.0 : 0.0;
    if (r + d <= sigma) return 1.0;
    if (r <= std::abs(sigma - d) && d > sigma) return 0.0;
    if (r >= sigma + d) return 0.0;
    if (r == 0.0) return d < sigma ? 1.0 : (d > sigma ? 0.0 : 0.5);
    if (N == 1) return 0.5;
    // x inside iff cos(angle to z) > c0
    double c0 = (r * r + (d - sigma) * (d + sigma)) / (2.0 * r * d);
    if (c0 <= -1.0) return 1.0;
    if (c0 >= 1.0) return 0.0;
    if (N == 2) return std::acos(c0) / std::numbers::pi;
    if (N == 3) return 0.5 * (1.0 - c0);
    // General N: normalised spherical cap, I_{sin^2}((N-1)/2, 1/2) / 2; not needed for N <= 3.
    return std::numeric_limits<double>::quiet_NaN();
}

/// Volume of B(0, rho) ∩ B(z, sigma) with |z| = d, N ∈ {1,2,3}.
inline double ball_intersection_volume(int N, double rho, double d, double sigma) noexcept {
    if (!(rho > 0.0) || !(sigma > 0.0)) return 0.0;
    if (d >= rho + sigma) return 0.0;
    if (d <= std::abs(rho - sigma)) return ball_volume(N, std::min(rho, sigma));
    switch (N) {
    case 1: return std::min(rho, d + sigma) - std::max(-rho, d - sigma);
    case 2: {
        const double a1 = std::acos(std::clamp((d * d + rho * rho - sigma * sigma) / (2 * d * rho), -1.0, 1.0));
        const double a2 = std::acos(std::clamp((d * d + sigma * sigma - rho * rho) / (2 * d * sigma), -1.0, 1.0));
        const double k = (-d + rho + sigma) * (d + rho - sigma) * (d - rho + sigma) * (d + rho + sigma);
        return rho * rho * a1 + sigma * sigma * a2 - 0.5 * std::sqrt(std::max(0.0, k));
    }
    case 3: {
        const double s = rho + sigma - d;
        const double diff = rho - sigma;
        return std::numbers::pi * s * s * (d * d + 2 * d * (rho + sigma) - 3 * diff * diff) / (12 * d);
    }
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

inline double euclidean_norm(std::span<const double> z) noexcept {
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
}

/// log(e + e^x) without overflow.
inline double log_e_plus_exp(double x) noexcept {
    if (x <= 1.0) return 1.0 + std::log1p(std::exp(x - 1.0));
    return x + std::log1p(std::exp(1.0 - x));
}

} // namespace fdxlab
