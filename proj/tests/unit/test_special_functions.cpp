#include "fdxlab/special_functions.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace fdxlab;

// Frozen values from tests/oracles/compute_oracles.py (mpmath, 40 digits).
namespace oracle {
constexpr double psi_1_1 = 1.313261687518222834;
constexpr double psi_inv_1_10 = 4.9188011248786443468;
constexpr double eta_1_1 = 1.145976303209722934;
constexpr double c_eta_1_05 = 0.59730674326780534865;
constexpr double c_eta_2_05 = 0.77102318318502539545;
constexpr double c_eta_2_08 = 0.57362226237498410602;
constexpr double gamma_half_1_05 = 0.64269744176661803304;
constexpr double gamma_half_2_05 = 0.5445109576938029691;
constexpr double gamma_half_2_08 = 0.65765058708925194697;
} // namespace oracle

TEST(Psi, Values) {
    EXPECT_EQ(psi(1.0, 0.0), 0.0);
    const double x = std::numbers::e * std::numbers::e - std::numbers::e;
    EXPECT_NEAR(psi(2.0, x), 4.0 * x, 1e-12);
    EXPECT_NEAR(psi(1.0, 1.0), oracle::psi_1_1, 1e-15);
    EXPECT_THROW(psi(1.0, -1e-3), DomainError);
}

TEST(PsiInv, Values) {
    EXPECT_NEAR(psi_inv(2.0, 18.683097081886419967, 1e-13), 4.6707742704716049919, 1e-12);
    EXPECT_EQ(psi_inv(0.7, 0.0, 1e-10), 0.0);
    EXPECT_NEAR(psi_inv(1.0, 10.0, 1e-13), oracle::psi_inv_1_10, 1e-12);
    EXPECT_THROW(psi_inv(1.0, -1.0, 1e-10), DomainError);
    EXPECT_THROW(psi_inv(1.0, 1.0, 0.0), DomainError);
}

TEST(PsiInv, RoundTripRandom) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ad(0.0, 3.0), ld(-8.0, 6.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = ad(rng);
        const double x = (i % 10 == 0) ? 0.0 : std::pow(10.0, ld(rng));
        EXPECT_LE(std::abs(psi_inv(a, psi(a, x)) - x), 1e-6 * std::max(1.0, x)) << "a=" << a << " x=" << x;
    }
}

TEST(Psi, IncreasingAndConvex) {
    for (double a : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        double prev = 0.0, prev_slope = -1.0;
        for (int k = 1; k <= 2000; ++k) {
            const double x = 0.01 * k;
            const double v = psi(a, x);
            EXPECT_GT(v, prev);
            const double slope = (v - prev) / 0.01;
            EXPECT_GE(slope, prev_slope - 1e-9);
            prev = v;
            prev_slope = slope;
        }
    }
}

TEST(Eta, Values) {
    EXPECT_EQ(eta(2, 0.0), 0.0);
    EXPECT_NEAR(eta(2, 1.0), oracle::psi_1_1, 1e-15);
    EXPECT_NEAR(eta(1, 1.0), oracle::eta_1_1, 1e-15);
    EXPECT_THROW(eta(1, -0.1), DomainError);
    // ξ → 0 without overflow in 1/ξ
    EXPECT_GT(eta(1, 1e-300), 0.0);
    double prev = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        const double v = eta(3, k / 1000.0);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(CEta, QuadratureValues) {
    EXPECT_NEAR(c_eta(ProblemParams(1, 0.5, 2.0)), oracle::c_eta_1_05, 1e-12);
    EXPECT_NEAR(c_eta(ProblemParams(2, 0.5, 1.5)), oracle::c_eta_2_05, 1e-12);
    EXPECT_NEAR(c_eta(ProblemParams(2, 0.8, 1.8)), oracle::c_eta_2_08, 1e-12);
    EXPECT_THROW(c_eta(ProblemParams(4, 0.5, 2.0)), DomainError); // κ = 0
}

TEST(CEta, IntegrandEndpointAtOne) {
    // s·η(s)^{m-1} at s = 1 equals η(1)^{m-1}.
    ProblemParams P(2, 0.5, 1.5);
    const double kappa = derive_exponents(P).kappa;
    EXPECT_NEAR(detail::gamma_integrand_tau(P, kappa, 0.0), std::pow(eta(2, 1.0), -0.5), 1e-15);
}

TEST(GammaFn, EndpointsAndOracle) {
    struct Case { int N; double m; double g_half; };
    for (auto c : {Case{1, 0.5, oracle::gamma_half_1_05}, Case{2, 0.5, oracle::gamma_half_2_05},
                   Case{2, 0.8, oracle::gamma_half_2_08}}) {
        GammaFn g(ProblemParams(c.N, c.m, c.m + 2.0 / c.N));
        EXPECT_EQ(g(0.0), 0.0);
        EXPECT_EQ(g(1.0), 1.0);
        EXPECT_NEAR(g(0.5), c.g_half, 1e-8 * c.g_half);
        EXPECT_NEAR(g.interpolate(0.5), c.g_half, 1e-6 * c.g_half);
        EXPECT_THROW(g(1.5), DomainError);
        EXPECT_THROW(g(-0.1), DomainError);
    }
}

TEST(GammaFn, StrictlyIncreasingAndSmallXi) {
    GammaFn g(ProblemParams(2, 0.5, 1.5));
    double prev = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        const double v = g.interpolate(k / 1000.0);
        EXPECT_GT(v, prev);
        prev = v;
    }
    for (double xi : {1e-6, 1e-9, 1e-11}) {
        const double exact = g(xi);
        EXPECT_LT(std::abs(g.relative_residual(xi, exact)), 1e-8);
        EXPECT_NEAR(g.interpolate(xi), exact, 1e-5 * exact);
    }
}

TEST(MeasuredConstants, PsiEquivalences) {
    for (double alpha : {0.5, 1.0, 2.0}) {
        const auto inv = measure_psi_inv_equivalence(alpha);
        EXPECT_LE(inv.C(), 10.0) << alpha;
        EXPECT_GE(inv.lo, 0.99) << alpha; // Ψ^{-1}(ξ) ≥ ξ/[log(e+ξ)]^α since Ψ^{-1}(ξ) ≤ ξ
        for (double k : {0.1, 2.0, 10.0}) {
            const auto h = measure_psi_homogeneity(alpha, k);
            EXPECT_LE(h.C(), 10.0) << alpha << " " << k;
            // The ratio is [log(e+kξ)/log(e+ξ)]^α: at most 1 for k < 1, at least 1 for k > 1.
            EXPECT_TRUE(k < 1.0 ? h.hi <= 1.0 + 1e-12 : h.lo >= 1.0 - 1e-12);
        }
        // Ψ^{-1} is concave with Ψ^{-1}(0) = 0, hence subadditive.
        EXPECT_LE(measure_psi_inv_subadditivity(alpha).hi, 1.0 + 1e-9) << alpha;
    }
}

TEST(MeasuredConstants, GammaEquivalence) {
    for (auto [N, m] : {std::pair{1, 0.5}, std::pair{2, 0.5}, std::pair{2, 0.8}}) {
        const GammaFn g(ProblemParams(N, m, m + 2.0 / N));
        const auto mc = measure_gamma_equivalence(g);
        EXPECT_GT(mc.lo, 0.0);
        EXPECT_LT(mc.C(), 1e3) << N << " " << m;
        EXPECT_EQ(mc.samples, 301u);
    }
}
