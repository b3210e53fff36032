#include "fdxlab/exponents.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fdxlab;

TEST(ProblemParams, RejectsOutOfRangeExponents) {
    EXPECT_THROW(ProblemParams(0, 0.5, 2.0), DomainError);
    EXPECT_THROW(ProblemParams(1, 1.0, 2.0), DomainError);
    EXPECT_THROW(ProblemParams(1, 0.0, 2.0), DomainError);
    EXPECT_THROW(ProblemParams(1, 1.2, 2.0), DomainError);
    EXPECT_THROW(ProblemParams(1, 0.5, 1.0), DomainError);
    EXPECT_NO_THROW(ProblemParams(3, 0.1, 1.01));
}

TEST(DeriveExponents, WorkedCases) {
    auto e = derive_exponents(ProblemParams(1, 0.5, 3.0));
    EXPECT_DOUBLE_EQ(e.theta, 0.625);
    EXPECT_DOUBLE_EQ(e.theta_prime, 1.6);
    EXPECT_DOUBLE_EQ(e.kappa, 1.5);
    EXPECT_DOUBLE_EQ(e.p_m, 2.5);

    e = derive_exponents(ProblemParams(2, 0.5, 1.5));
    EXPECT_DOUBLE_EQ(e.p_m, 1.5);
    EXPECT_DOUBLE_EQ(e.kappa, 1.0);

    e = derive_exponents(ProblemParams(2, 0.5, 2.0));
    EXPECT_DOUBLE_EQ(e.theta, 0.75);
    EXPECT_DOUBLE_EQ(e.theta_prime, 4.0 / 3.0);
}

TEST(ClassifyRegime, ThreeCases) {
    EXPECT_EQ(classify_regime(ProblemParams(2, 0.5, 1.2)), Regime::Subcritical);
    EXPECT_EQ(classify_regime(ProblemParams(2, 0.5, 1.5)), Regime::Critical);
    EXPECT_EQ(classify_regime(ProblemParams(1, 0.5, 3.0)), Regime::Supercritical);
    // p_m computed in floating point still lands on Critical.
    EXPECT_EQ(classify_regime(ProblemParams(3, 0.7, 0.7 + 2.0 / 3.0)), Regime::Critical);
    EXPECT_THROW(classify_regime(ProblemParams(1, 0.5, 3.0), -1.0), DomainError);
}

TEST(KappaR, Cases) {
    auto k = kappa_r(ProblemParams(1, 0.5, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(k.value, 1.5);
    EXPECT_TRUE(k.positive);
    k = kappa_r(ProblemParams(4, 0.5, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(k.value, 0.0);
    EXPECT_FALSE(k.positive);
    EXPECT_NEAR(kappa_r(ProblemParams(1, 0.5, 2.0), 1.1).value, 1.7, 1e-15);
    EXPECT_THROW(kappa_r(ProblemParams(1, 0.5, 2.0), 0.5), DomainError);
}

TEST(AdmissibleBeta, Cases) {
    auto I = admissible_beta_range(ProblemParams(1, 0.5, 3.0));
    EXPECT_DOUBLE_EQ(I.lo, 1.0);
    EXPECT_DOUBLE_EQ(I.hi, 1.25);
    I = admissible_beta_range(ProblemParams(2, 0.5, 2.0));
    EXPECT_DOUBLE_EQ(I.lo, 1.0);
    EXPECT_DOUBLE_EQ(I.hi, 1.5);
    EXPECT_THROW(admissible_beta_range(ProblemParams(2, 0.5, 1.2)), DomainError);
    // κ_β > 0 binds when N(1-m)/2 > 1.
    I = admissible_beta_range(ProblemParams(3, 0.2, 3.0));
    EXPECT_DOUBLE_EQ(I.lo, 1.2);
    EXPECT_GT(3 * (0.2 - 1.0) + 2.0 * 1.2000001, 0.0);
}

TEST(ExponentProperties, RandomDraws) {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> Nd(1, 6);
    std::uniform_real_distribution<double> md(1e-3, 1.0 - 1e-3), pd(1.0 + 1e-3, 10.0);
    for (int i = 0; i < 10000; ++i) {
        ProblemParams P(Nd(rng), md(rng), pd(rng));
        const auto e = derive_exponents(P);
        EXPECT_NEAR(e.theta * e.theta_prime, 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(e.kappa, P.N() * (P.m() - 1.0) + 2.0);
        EXPECT_EQ(e.p_m > 1.0, e.kappa > 0.0);
        EXPECT_DOUBLE_EQ(kappa_r(P, 1.0).value, e.kappa);
    }
}

TEST(ExponentProperties, RegimeMonotoneInP) {
    for (int N = 1; N <= 3; ++N) {
        for (double m : {0.2, 0.5, 0.9}) {
            int prev = -1;
            for (double p = 1.01; p < 6.0; p += 0.01) {
                const int tag = static_cast<int>(classify_regime(ProblemParams(N, m, p)));
                EXPECT_GE(tag, prev);
                prev = tag;
            }
        }
    }
}
