#include "fdxlab/ulmorrey.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace fdxlab;

namespace {

GridField random_field(std::mt19937_64& rng, int N) {
    std::uniform_int_distribution<int> cells(20, 60);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::bernoulli_distribution spike(0.1);
    const int n = cells(rng);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& v : u) v = spike(rng) ? 20.0 * val(rng) : val(rng);
    return GridField(N, 0.05, std::move(u));
}

} // namespace

TEST(OrliczBallAverage, ConstantAndZero) {
    const auto f = RadialProfile::constant(2, 3.5);
    for (double alpha : {0.5, 1.0, 2.0})
        for (double d : {0.0, 0.4, 3.0})
            for (double s : {0.01, 1.0, 7.0}) EXPECT_NEAR(orlicz_ball_average(f, alpha, d, s), 3.5, 1e-12);
    EXPECT_EQ(orlicz_ball_average(RadialProfile::zero(3), 1.0, 0.5, 1.0), 0.0);
}

TEST(OrliczBallAverage, PowerLawOracle) {
    const auto f = RadialProfile::power_law(1, 1.0, 0.8);
    const double z[] = {0.0};
    EXPECT_NEAR(orlicz_ball_average(f, 1.0, z, 0.1), 47.64842201531777844, 1e-9 * 47.65);
}

TEST(Norm, ConstantAttainedAtCap) {
    const double c = 2.5, R = 3.0;
    for (int N : {1, 2, 3}) {
        const auto f = RadialProfile::constant(N, c);
        const auto r = norm(f, NormSpec::morrey(2.0, 1.0, R));
        EXPECT_NEAR(r.value, c * std::pow(R, N / 2.0), 1e-12 * r.value);
        EXPECT_EQ(r.arg_radius, std::nextafter(R, 0.0));
        EXPECT_EQ(r.arg_center, 0.0);
    }
}

TEST(Norm, CriticalPowerLawIsScaleFree) {
    // N=1, m=0.5, p=3: |x|^{-0.8} with q = 1.25 gives σ^{0.8}·avg = 5c at z = 0.
    const ProblemParams P(1, 0.5, 3.0);
    const double c = 0.7;
    const auto f = critical_profile(P, c);
    ScanOptions opt;
    for (int k = 1; k <= 20; ++k) opt.extra_centers.push_back(0.05 * k);
    opt.extra_centers.push_back(50.0);
    const auto r = norm(f, NormSpec::morrey(1.25, 1.0, std::numeric_limits<double>::infinity()), opt);
    EXPECT_NEAR(r.value, 5.0 * c, 1e-10 * c);
    EXPECT_EQ(r.arg_center, 0.0);
    const auto rb = norm(f, NormSpec::morrey(1.25, 1.1, std::numeric_limits<double>::infinity()), opt);
    EXPECT_NEAR(rb.value, 6.8723925464104762741 * c, 1e-10 * c);
    EXPECT_EQ(rb.arg_center, 0.0);
}

TEST(Norm, InfiniteCases) {
    const double inf = std::numeric_limits<double>::infinity();
    // Too singular for the weight at small radii.
    EXPECT_TRUE(std::isinf(norm(RadialProfile::power_law(1, 1.0, 0.9), NormSpec::morrey(1.25, 1.0, 1.0)).value));
    EXPECT_TRUE(std::isinf(norm(RadialProfile::critical_log(2, 1.0), NormSpec::morrey(2.0, 1.0, 1.0)).value));
    // Too heavy a tail for an unbounded cap.
    EXPECT_TRUE(std::isinf(norm(RadialProfile::power_law(1, 1.0, 0.5), NormSpec::morrey(1.25, 1.0, inf)).value));
    EXPECT_TRUE(std::isinf(norm(RadialProfile::constant(2, 1.0), NormSpec::morrey(3.0, 1.0, inf)).value));
    // Cut off, the same profile is finite.
    EXPECT_TRUE(std::isfinite(
        norm(RadialProfile::power_law(1, 1.0, 0.5).with_cutoff(1.0), NormSpec::morrey(1.25, 1.0, inf)).value));
    EXPECT_EQ(norm(RadialProfile::zero(2), NormSpec::morrey(1.0, 1.0, 2.0)).value, 0.0);
}

TEST(Norm, EmptyScanThrows) {
    ScanGrid s;
    EXPECT_THROW(norm(RadialProfile::constant(1, 1.0), NormSpec::morrey(1.0, 1.0, 1.0), s), DomainError);
    s.centers = {0.0};
    s.radii = {2.0};
    EXPECT_THROW(norm(RadialProfile::constant(1, 1.0), NormSpec::morrey(1.0, 1.0, 1.0), s), DomainError);
}

TEST(Norm, OrliczEtaQuantity) {
    // Critical case N=1, m=0.5 (p = p_m = 2.5), α = 0.25 < N/2.
    const ProblemParams P(1, 0.5, 2.5);
    const auto f = critical_profile(P, 0.3);
    const double T = 0.5;
    const auto spec = NormSpec::orlicz_eta(P, 0.25, T);
    const auto r = norm(f, spec);
    ASSERT_TRUE(std::isfinite(r.value));
    EXPECT_LT(r.arg_radius, spec.R);
    const double s = std::pow(T, 1.0 / 1.5);
    const double direct =
        eta(1, r.arg_radius / spec.eta_length) * orlicz_ball_average(f.scaled(s, 1.0), 0.25, 0.0, r.arg_radius);
    EXPECT_NEAR(r.value, direct, 1e-10 * direct);
    EXPECT_THROW(NormSpec::orlicz_eta(P, 0.0, T), DomainError);
}

TEST(CheckCondition, Examples) {
    const double c = 0.8;
    // Subcritical: p = 2 < p_m = 2.5; T = 1 so T^θ = 1 and the mass of B(z,1) is 2c.
    const ProblemParams sub(1, 0.5, 2.0);
    auto v = check_condition(sub, RadialProfile::constant(1, c), 1.0, 1.6, 0.0);
    EXPECT_EQ(v.regime, Regime::Subcritical);
    EXPECT_NEAR(v.condition_value, 2 * c, 1e-12);
    EXPECT_TRUE(v.met);
    v = check_condition(sub, RadialProfile::constant(1, c), 1.0, 1.5, 0.0);
    EXPECT_FALSE(v.met);

    const ProblemParams sup(1, 0.5, 3.0);
    v = check_condition(sup, RadialProfile::power_law(1, c, 0.8), std::numeric_limits<double>::infinity(), 10.0, 1.1);
    EXPECT_NEAR(v.condition_value, 6.8723925464104762741 * c, 1e-9 * c);
    EXPECT_EQ(v.met, v.condition_value <= 10.0);
    EXPECT_THROW(check_condition(sup, RadialProfile::power_law(1, c, 0.8), 1.0, 1.0, 1.3), DomainError);
    EXPECT_THROW(check_condition(sup, RadialProfile::power_law(1, c, 0.8), 1.0, 1.0, 1.0), DomainError);

    const ProblemParams crit(1, 0.5, 2.5);
    EXPECT_THROW(check_condition(crit, RadialProfile::critical_log(1, c), 1.0, 1.0, 0.0), DomainError);
    EXPECT_NO_THROW(check_condition(crit, RadialProfile::critical_log(1, c), 1.0, 1.0, 0.25));

    for (const auto& P : {sub, sup, crit}) {
        const double arg = classify_regime(P) == Regime::Supercritical ? 1.1 : 0.25;
        v = check_condition(P, RadialProfile::zero(1), 1.0, 1e-9, arg);
        EXPECT_EQ(v.condition_value, 0.0);
        EXPECT_TRUE(v.met);
    }
}

TEST(NormProperties, Doubling) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int N = 1 + trial % 3;
        const GridField F = random_field(rng, N);
        const double R = F.dr() * (1.0 + 10.0 * u01(rng));
        const double small = sup_ball_mass(F, R);
        const double big = sup_ball_mass(F, 2.0 * R);
        EXPECT_LE(big, std::pow(3.0, N) * small) << "trial " << trial;
    }
}

TEST(NormProperties, HomogeneityAndMonotonicity) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
        const int N = 1 + trial % 3;
        const GridField F = random_field(rng, N);
        std::vector<double> bigger(F.values().begin(), F.values().end());
        for (auto& v : bigger) v += u01(rng);
        const GridField G(N, F.dr(), bigger);
        const double c = 0.1 + 5.0 * u01(rng);
        std::vector<double> scaled(F.values().begin(), F.values().end());
        for (auto& v : scaled) v *= c;
        const GridField cF(N, F.dr(), scaled);
        for (double alpha : {1.0, 1.7}) {
            const auto spec = NormSpec::morrey(2.0, alpha, 1.0);
            const double nf = norm(F, spec).value;
            EXPECT_NEAR(norm(cF, spec).value, c * nf, 1e-12 * c * nf);
            EXPECT_LE(nf, norm(G, spec).value);
        }
    }
}

TEST(NormProperties, RadiusCapMonotoneAndScaleEquivalent) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 9; ++trial) {
        const int N = 1 + trial % 3;
        const auto f = RadialProfile::gridded(random_field(rng, N));
        const double q = 1.5, alpha = 1.3;
        ScanGrid s1 = make_scan(f, 1.0);
        ScanGrid s2 = make_scan(f, 2.5);
        // Same r_min and ratio: s1's radii are s2's below 1, plus 1⁻.
        s2.radii.push_back(s1.radii.back());
        std::sort(s2.radii.begin(), s2.radii.end());
        const double n1 = norm(f, NormSpec::morrey(q, alpha, 1.0), s1).value;
        const double n2 = norm(f, NormSpec::morrey(q, alpha, 2.5), s2).value;
        EXPECT_LE(n1, n2);
        // Covering B(z,σ), σ < R, by (1+2R)^N unit balls.
        const double C = std::pow(2.5, N / q) * std::pow(1.0 + 2.0 * 2.5, N / alpha);
        EXPECT_LE(n2, C * n1);
    }
}

TEST(NormProperties, ThreadCountDoesNotChangeResult) {
    std::mt19937_64 rng(5);
    const GridField F = random_field(rng, 2);
    const auto spec = NormSpec::morrey(1.5, 1.0, 1.0);
    set_thread_count(1);
    const auto a = norm(F, spec);
    set_thread_count(4);
    const auto b = norm(F, spec);
    set_thread_count(0);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.arg_center, b.arg_center);
    EXPECT_EQ(a.arg_radius, b.arg_radius);
}

TEST(NormCsv, Format) {
    std::ostringstream os;
    write_norm_csv(os, {{5.0, 0.0, 0.25, "centers=1"}});
    EXPECT_EQ(os.str(), "value,center,radius\n5,0,0.25\n# grid: centers=1\n# status: ok\n");
}
