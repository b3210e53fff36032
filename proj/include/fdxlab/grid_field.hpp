#pragma once

#include "fdxlab/error.hpp"
#include "fdxlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace fdxlab {

/// Nonnegative radial finite-volume field on [0, R_dom] with uniform cells.
/// Cell i covers [i·dr, (i+1)·dr]; values are cell averages.
class GridField {
public:
    GridField(int N, double dr, std::vector<double> u) : N_(N), dr_(dr), u_(std::move(u)) {
        if (N < 1 || N > 3) throw DomainError("GridField: radial grids support N in {1,2,3}");
        if (!(dr > 0.0) || !std::isfinite(dr)) throw DomainError("GridField: dr must be positive");
        if (u_.empty()) throw DomainError("GridField: needs at least one cell");
        for (std::size_t i = 0; i < u_.size(); ++i) {
            if (!(u_[i] >= 0.0) || !std::isfinite(u_[i]))
                throw DomainError("GridField: cell " + std::to_string(i) + " is negative or not finite");
        }
    }

    static GridField uniform(int N, double R_dom, std::size_t cells, double value = 0.0) {
        if (cells == 0) throw DomainError("GridField: needs at least one cell");
        return GridField(N, R_dom / static_cast<double>(cells), std::vector<double>(cells, value));
    }

    int N() const noexcept { return N_; }
    double dr() const noexcept { return dr_; }
    std::size_t size() const noexcept { return u_.size(); }
    double R_dom() const noexcept { return dr_ * static_cast<double>(u_.size()); }

    double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dr_; }
    double face(std::size_t i) const noexcept { return static_cast<double>(i) * dr_; }
    double face_area(std::size_t i) const noexcept { return sphere_area(N_) * std::pow(face(i), N_ - 1); }
    double cell_volume(std::size_t i) const noexcept {
        return (ball_volume(N_, face(i + 1)) - ball_volume(N_, face(i)));
    }

    std::span<const double> values() const noexcept { return u_; }
    std::span<double> values() noexcept { return u_; }
    double operator[](std::size_t i) const noexcept { return u_[i]; }

    double sup() const noexcept { return *std::max_element(u_.begin(), u_.end()); }

    /// Cell containing radius r, or size() when r lies beyond the domain.
    std::size_t cell_of(double r) const noexcept {
        if (!(r >= 0.0)) return 0;
        const double k = std::floor(r / dr_);
        if (k >= static_cast<double>(u_.size())) return u_.size();
        return static_cast<std::size_t>(k);
    }

    /// ∫_{B(0,rho)} g(u) dx, exact for the piecewise-constant field (partial
    /// last cell by its exact volume fraction).
    template <class G>
    double centered_integral(double rho, G&& g) const {
        if (!(rho > 0.0)) return 0.0;
        double total = 0.0;
        const std::size_t n = u_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double lo = face(i);
            if (lo >= rho) break;
            const double hi = std::min(face(i + 1), rho);
            total += g(u_[i]) * (ball_volume(N_, hi) - ball_volume(N_, lo));
        }
        return total;
    }

    double centered_mass(double rho) const {
        return centered_integral(rho, [](double v) { return v; });
    }

    /// Running ∫_{B(0, face(k))} g(u) for k = 0..size(); used for O(1) ball
    /// queries in repeated norm sweeps.
    template <class G>
    std::vector<double> cumulative(G&& g) const {
        std::vector<double> c(u_.size() + 1, 0.0);
        for (std::size_t i = 0; i < u_.size(); ++i) c[i + 1] = c[i] + g(u_[i]) * cell_volume(i);
        return c;
    }

    /// Centered integral using a table from cumulative() with the same g.
    template <class G>
    double centered_from_cumulative(std::span<const double> cum, double rho, G&& g) const {
        if (!(rho > 0.0)) return 0.0;
        const std::size_t k = cell_of(rho);
        if (k >= u_.size()) return cum.back();
        return cum[k] + g(u_[k]) * (ball_volume(N_, rho) - ball_volume(N_, face(k)));
    }

private:
    int N_;
    double dr_;
    std::vector<double> u_;
};

} // namespace fdxlab
