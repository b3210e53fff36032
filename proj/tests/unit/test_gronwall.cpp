#include "fdxlab/gronwall.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace fdxlab;

TEST(GronwallBound, Examples) {
    EXPECT_NEAR(gronwall_bound({1, 0, 1, 0.5, 2}, 1.0), std::numbers::e, 1e-15);
    EXPECT_NEAR(gronwall_bound({0, 1, 0, 0.5, 3}, 2.0), 1.0, 1e-15);
    EXPECT_NEAR(gronwall_bound({1, 1, 1, 0.5, 2}, 1.0), 6.1161341140328517796, 1e-14);
}

TEST(GronwallBound, Domain) {
    const GronwallCoeffs c{1, 1, 1, 0.5, 1};
    EXPECT_THROW(gronwall_bound(c, 0.0), DomainError);
    EXPECT_THROW(gronwall_bound(c, 1.0), DomainError);
    EXPECT_THROW(gronwall_bound({-1, 1, 1, 0.5, 1}, 0.5), DomainError);
    EXPECT_THROW(gronwall_bound({1, 1, 1, 1.0, 1}, 0.5), DomainError);
    EXPECT_THROW(verify_against_ode(c, 99), DomainError);
    EXPECT_EQ(gronwall_bound({0, 0, 3, 0.5, 1}, 0.5), 0.0);
}

TEST(GronwallBound, DominatesHighAccuracyOde) {
    const GronwallCoeffs c{1, 1, 1, 0.5, 1.5};
    const auto rep = verify_against_ode(c, 20000);
    EXPECT_LT(rep.max_gap, 0.0);
}

TEST(GronwallOde, LinearAndBernoulliCasesAreExact) {
    for (double m : {0.3, 0.5, 0.9}) {
        for (double A : {0.2, 1.0, 2.0}) {
            const auto lin = verify_against_ode({1.3, 0.0, A, m, 1.0}, 2000);
            EXPECT_LE(std::abs(lin.max_relative_gap), 1e-10) << "A2=0 m=" << m << " A3=" << A;
            const auto ber = verify_against_ode({1.3, A, 0.0, m, 1.0}, 2000);
            EXPECT_LE(std::abs(ber.max_relative_gap), 1e-10) << "A3=0 m=" << m << " A2=" << A;
        }
    }
}

TEST(GronwallOde, RandomDrawsNeverExceedBound) {
    const auto draws = gronwall_random_check(12345, 1000);
    ASSERT_EQ(draws.size(), 1000u);
    for (const auto& d : draws)
        EXPECT_TRUE(d.pass) << "A1=" << d.coeffs.A1 << " A2=" << d.coeffs.A2 << " A3=" << d.coeffs.A3
                            << " m=" << d.coeffs.m << " gap=" << d.report.max_relative_gap;
}

TEST(GronwallBound, MonotoneInEachArgument) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0), bump(1e-3, 0.5);
    for (int i = 0; i < 500; ++i) {
        GronwallCoeffs c{u(rng), u(rng), u(rng), 0.5, 3.0};
        const double t = 0.1 + u(rng);
        const double b = gronwall_bound(c, t);
        for (double GronwallCoeffs::*field : {&GronwallCoeffs::A1, &GronwallCoeffs::A2, &GronwallCoeffs::A3}) {
            GronwallCoeffs d = c;
            d.*field += bump(rng);
            EXPECT_GE(gronwall_bound(d, t), b);
        }
        EXPECT_GE(gronwall_bound(c, t + 0.5 * bump(rng)), b);
    }
}
