#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "propest/errors.hpp"
#include "propest/families.hpp"
#include "propest/kernels.hpp"
#include "propest/numerics.hpp"
#include "support/oracles.hpp"

using namespace propest;

namespace {

constexpr double kPi = std::numbers::pi;
const WeightFunction kTri = WeightFunction::triangular();
const FamilyModel kGauss = FamilyModel::gaussian(1.0);
const FamilyModel kGamma = FamilyModel::gamma(4.0);

QuadratureConfig fine(double h) {
    QuadratureConfig cfg;
    cfg.partition_norm = h;
    return cfg;
}

// K_1 for a location family by nested adaptive quadrature of the displayed
// double integral.
double bounded_ls_oracle(double t, double x, double a, double b, const FamilyModel& f) {
    auto inner = [&](double y) {
        return oracle::integrate([&](double s) { return std::cos(t * s * (x - y)) * modulus_recip(f, t * s); }, -1.0,
                                 1.0, 1e-11, 16);
    };
    return t / (2.0 * kPi) * oracle::integrate(inner, a, b, 1e-9, 16);
}

// Gamma K_1 by direct summation of the truncated series inside a nested
// adaptive quadrature.
double bounded_gamma_oracle(double t, double x, double a, double b, double shape, int n_max) {
    auto inner = [&](double y) {
        return oracle::integrate(
            [&](double s) {
                double sum = 0.0;
                for (int n = 0; n <= n_max; ++n) {
                    const double log_term = n * std::log(std::abs(t * s * x * shape) + 1e-300) - std::lgamma(n + 1.0) -
                                            (std::lgamma(n + shape) - std::lgamma(shape));
                    const double sign = (t * s * x < 0 && n % 2 == 1) ? -1.0 : 1.0;
                    const double term = n == 0 ? 1.0 : sign * std::exp(log_term);
                    sum += term * std::cos(0.5 * kPi * n - t * s * y);
                }
                return sum;
            },
            -1.0, 1.0, 1e-11, 16);
    };
    return t / (2.0 * kPi) * oracle::integrate(inner, a, b, 1e-9, 16);
}

// The one-sided K_1 after integrating the s-derivative out:
// (1/pi) int_0^1 sin(t y x) / (y r_0(t y)) dy.
double onesided_ls_oracle(double t, double x, const FamilyModel& f) {
    return oracle::integrate(
               [&](double y) { return y == 0.0 ? t * x : std::sin(t * y * x) * modulus_recip(f, t * y) / y; }, 0.0,
               1.0, 1e-12) /
           kPi;
}

template <class Draw>
void expect_unbiased(const PreparedKernel& k, double target, Draw&& draw, std::uint64_t seed, const char* what) {
    const auto stat = oracle::monte_carlo([&](double x) { return k(x); }, draw, 100000, seed);
    EXPECT_LE(std::abs(stat.z(target)), 5.0) << what << ": mean " << stat.mean << " target " << target << " se "
                                             << stat.se;
}

}  // namespace

TEST(NullSpecTest, ParseRoundTrip) {
    for (const char* text : {"point:0", "bounded:-1,2", "onesided:0.5"}) {
        EXPECT_EQ(NullSpec::parse(text).to_string(), text);
    }
    EXPECT_TRUE(NullSpec::parse("bounded:-1,2").is_bounded());
    EXPECT_THROW(NullSpec::parse("interval:1,2"), ParseError);
    EXPECT_THROW(NullSpec::parse("bounded:1"), ParseError);
    EXPECT_THROW(NullSpec::parse("point:x"), ParseError);
    EXPECT_THROW(NullSpec::parse("bounded:2,1"), InvalidInterval);
}

TEST(NullSpecTest, ContainsIsOpen) {
    const NullSpec bounded = NullSpec::bounded(-1.0, 2.0);
    EXPECT_TRUE(bounded.contains(0.0));
    EXPECT_FALSE(bounded.contains(-1.0));
    EXPECT_FALSE(bounded.contains(2.0));
    EXPECT_TRUE(NullSpec::one_sided(0.0).contains(-5.0));
    EXPECT_FALSE(NullSpec::one_sided(0.0).contains(0.0));
}

TEST(FunctionalSpecTest, Builders) {
    const auto sq = FunctionalSpec::truncated_square(2.0);
    EXPECT_DOUBLE_EQ(sq.phi(1.5), 2.25);
    EXPECT_EQ(sq.phi(2.5), 0.0);
    EXPECT_DOUBLE_EQ(sq.sup_norm, 4.0);
    EXPECT_EQ(sq.a, -2.0);
    EXPECT_EQ(FunctionalSpec::constant(3.0, 0.0, 1.0).phi(0.4), 3.0);
    EXPECT_THROW(FunctionalSpec::constant(1.0, 1.0, 0.0).validate(), InvalidInterval);
}

TEST(PointLs, ZeroSpeedGivesUnitIntegral) {
    EXPECT_NEAR(k_point_ls(0.0, 3.7, -1.0, kGauss, kTri), 1.0, 1e-12);
    EXPECT_NEAR(psi_point_ls(0.0, 3.7, -1.0, kTri), 1.0, 1e-12);
}

TEST(PointLs, CentreValueMatchesOracle) {
    const double expected =
        oracle::integrate([](double s) { return (1.0 - std::abs(s)) * std::exp(0.5 * s * s); }, -1.0, 1.0);
    EXPECT_NEAR(expected, 1.0924728, 1e-6);
    EXPECT_NEAR(k_point_ls(1.0, 0.4, 0.4, kGauss, kTri), expected, 1e-5);
}

TEST(PointLs, PsiClosedForms) {
    for (double t : {0.5, 4.0, 20.0}) {
        EXPECT_NEAR(psi_point_ls(t, 1.0, 1.0, kTri), 1.0, 1e-12);
        EXPECT_NEAR(psi_point_ls(t, 1.0, 0.0, kTri, fine(1e-4)), 2.0 * (1.0 - std::cos(t)) / (t * t), 1e-6) << t;
        EXPECT_NEAR(psi_point_ls(t, 1.0, 0.0, WeightFunction::uniform(), fine(1e-4)), std::sin(t) / t, 1e-6) << t;
    }
    EXPECT_LE(std::abs(psi_point_ls(20.0, 1.0, 0.0, kTri)), fourier_decay_bound(2.0, 1.0, -1.0, 1.0, 20.0));
}

TEST(PointLs, UnbiasedAtCentre) {
    const auto k = prepare_point_ls(2.0, 0.5, kGauss, kTri, {});
    expect_unbiased(k, 1.0, [](SeededStream& r) { return sample(kGauss, 0.5, r); }, 1, "point");
}

TEST(BoundedLs, ZeroSpeedAndOracle) {
    const NullSpec::Bounded ab{-1.0, 2.0};
    EXPECT_EQ(k_bounded_ls(0.0, 0.3, ab, kGauss), 0.0);
    for (double x : {-2.0, 0.3, 1.7}) {
        EXPECT_NEAR(k_bounded_ls(2.0, x, ab, kGauss, fine(0.002)), bounded_ls_oracle(2.0, x, -1.0, 2.0, kGauss), 1e-4)
            << x;
    }
    const FamilyModel lap = FamilyModel::laplace(0.8);
    EXPECT_NEAR(k_bounded_ls(3.0, 0.9, ab, lap, fine(0.002)), bounded_ls_oracle(3.0, 0.9, -1.0, 2.0, lap), 1e-4);
}

TEST(BoundedLs, EvenForSymmetricWindow) {
    const NullSpec::Bounded ab{-1.5, 1.5};
    for (double x : {0.2, 1.1, 3.0}) {
        EXPECT_NEAR(k_bounded_ls(2.5, x, ab, kGauss), k_bounded_ls(2.5, -x, ab, kGauss), 1e-8);
    }
}

TEST(BoundedLs, UnbiasedForWindow) {
    const auto k = prepare_bounded_ls(3.0, -1.0, 2.0, kGauss, {});
    expect_unbiased(k, dirichlet_window(3.0, 0.5, -1.0, 2.0), [](SeededStream& r) { return sample(kGauss, 0.5, r); },
                    2, "bounded gaussian");
    const FamilyModel lap = FamilyModel::laplace(1.0);
    const auto kl = prepare_bounded_ls(2.0, -1.0, 2.0, lap, {});
    expect_unbiased(kl, dirichlet_window(2.0, 2.5, -1.0, 2.0), [&](SeededStream& r) { return sample(lap, 2.5, r); },
                    3, "bounded laplace");
}

TEST(BoundedLs, RejectsBadInterval) {
    EXPECT_THROW(k_bounded_ls(1.0, 0.0, NullSpec::Bounded{2.0, 1.0}, kGauss), InvalidInterval);
}

TEST(OnesidedLs, ZeroSpeedAndOracle) {
    EXPECT_EQ(k_onesided_ls(0.0, 0.7, NullSpec::OneSided{0.0}, kGauss), 0.0);
    for (double x : {-1.2, 0.4, 1.3}) {
        EXPECT_NEAR(k_onesided_ls(2.0, x + 0.5, NullSpec::OneSided{0.5}, kGauss, fine(0.002)),
                    onesided_ls_oracle(2.0, x, kGauss), 1e-4)
            << x;
    }
    const FamilyModel lap = FamilyModel::laplace(1.0);
    EXPECT_NEAR(k_onesided_ls(3.0, 0.8, NullSpec::OneSided{0.0}, lap, fine(0.002)), onesided_ls_oracle(3.0, 0.8, lap),
                1e-4);
}

TEST(OnesidedLs, UnbiasedForHalfline) {
    const auto k = prepare_onesided_ls(3.0, 0.0, kGauss, {});
    expect_unbiased(k, dirichlet_halfline(3.0, 1.0, 0.0), [](SeededStream& r) { return sample(kGauss, 1.0, r); }, 4,
                    "onesided gaussian");
    EXPECT_NEAR(dirichlet_halfline(3.0, 1.0, 0.0), -dirichlet_halfline(3.0, -1.0, 0.0), 1e-12);
}

TEST(OnesidedLs, CauchyRejected) {
    EXPECT_THROW(k_onesided_ls(1.0, 0.0, NullSpec::OneSided{0.0}, FamilyModel::cauchy(1.0)), UnsupportedConstruction);
}

TEST(BoundedGamma, ZeroObservationKeepsLeadingTerm) {
    const double t = 2.0, a = 4.0, b = 8.0;
    const double expected = (oracle::si(t * b) - oracle::si(t * a)) / kPi;
    EXPECT_NEAR(k_bounded_gamma(t, 0.0, NullSpec::Bounded{a, b}, kGamma, {}, fine(0.001)), expected, 1e-5);
}

TEST(BoundedGamma, MatchesSeriesOracle) {
    for (double x : {1.5, 4.0, 9.0}) {
        EXPECT_NEAR(k_bounded_gamma(0.5, x, NullSpec::Bounded{4.0, 8.0}, kGamma, {}, fine(0.002)),
                    bounded_gamma_oracle(0.5, x, 4.0, 8.0, 4.0, 25), 1e-4)
            << x;
    }
}

TEST(BoundedGamma, UnbiasedForWindow) {
    const auto k = prepare_bounded_gamma(2.0, 4.0, 8.0, kGamma, {}, {});
    expect_unbiased(k, dirichlet_window(2.0, kGamma.gamma_mean(0.2), 4.0, 8.0),
                    [](SeededStream& r) { return sample(kGamma, 0.2, r); }, 5, "bounded gamma");
}

TEST(BoundedGamma, TruncationStableAtScenarioSpeeds) {
    SeriesConfig n25;
    SeriesConfig n60;
    n60.truncation = 60;
    const NullSpec::Bounded ab{kGamma.gamma_mean(0.0), kGamma.gamma_mean(0.35)};
    for (double t : {0.2, 0.25}) {
        const auto k25 = prepare_bounded_gamma(t, ab.a, ab.b, kGamma, n25, {});
        const auto k60 = prepare_bounded_gamma(t, ab.a, ab.b, kGamma, n60, {});
        for (double x : {0.5, 4.0, 10.0, 20.0}) EXPECT_NEAR(k25(x), k60(x), 1e-8) << t << ' ' << x;
    }
}

TEST(OnesidedGamma, ZeroObservationAndBoundary) {
    const double t = 1.5, b = 5.0;
    EXPECT_NEAR(k_onesided_gamma(t, 0.0, NullSpec::OneSided{b}, kGamma, {}, fine(0.001)), -oracle::si(t * b) / kPi,
                1e-5);
    EXPECT_EQ(dirichlet_halfline(t, b, b), 0.0);
}

TEST(OnesidedGamma, UnbiasedForHalfline) {
    const double theta = 0.35;
    const double b = kGamma.gamma_mean(theta) - 1.0;
    const auto k = prepare_onesided_gamma(1.5, b, kGamma, {}, {});
    expect_unbiased(k, dirichlet_halfline(1.5, kGamma.gamma_mean(theta), b),
                    [&](SeededStream& r) { return sample(kGamma, theta, r); }, 6, "onesided gamma");
}

TEST(PointGamma, IdentitiesAndUnbiasedness) {
    for (double t : {0.0, 1.0, 5.0}) EXPECT_NEAR(psi_point_gamma(t, 0.2, 0.2, kTri), 1.0, 1e-12);
    const double t = 2.0;
    const double expected = oracle::integrate(
        [&](double s) { return std::cos(t * s * 1.0) * (1.0 - std::abs(s)); }, -1.0, 1.0);
    EXPECT_NEAR(k_point_gamma(t, 0.0, 0.0, kGamma, kTri, {}, fine(0.001)), expected, 1e-5);
    const auto k = prepare_point_gamma(t, 0.0, kGamma, kTri, {}, {});
    expect_unbiased(k, psi_point_gamma(t, 0.1, 0.0, kTri), [](SeededStream& r) { return sample(kGamma, 0.1, r); }, 7,
                    "point gamma");
    EXPECT_THROW(psi_point_gamma(1.0, 1.0, 0.0, kTri), DomainError);
}

TEST(Weighted, ConstantWeightReducesToBounded) {
    const auto one = FunctionalSpec::constant(1.0, -1.0, 2.0);
    for (double x : {-0.5, 0.4, 2.2}) {
        EXPECT_NEAR(k_weighted(2.0, x, one, kGauss), k_bounded_ls(2.0, x, NullSpec::Bounded{-1.0, 2.0}, kGauss), 1e-10);
    }
    const auto one_g = FunctionalSpec::constant(1.0, 4.0, 8.0);
    EXPECT_NEAR(k_weighted(0.5, 3.0, one_g, kGamma), k_bounded_gamma(0.5, 3.0, NullSpec::Bounded{4.0, 8.0}, kGamma),
                1e-10);
    EXPECT_EQ(k_weighted(2.0, 0.3, FunctionalSpec::constant(0.0, -1.0, 2.0), kGauss), 0.0);
}

TEST(Weighted, UnbiasedForWeightedWindow) {
    const auto spec = FunctionalSpec::truncated_square(2.0);
    const auto k = prepare_weighted(3.0, spec, kGauss, {}, {});
    expect_unbiased(k, weighted_dirichlet(3.0, 1.0, -2.0, 2.0, spec.phi),
                    [](SeededStream& r) { return sample(kGauss, 1.0, r); }, 8, "weighted");
}

TEST(PreparedKernelTest, EvaluateMatchesPointwiseAcrossThreads) {
    const auto k = prepare_bounded_ls(2.0, -1.0, 2.0, kGauss, {});
    std::vector<double> xs;
    for (int i = 0; i < 257; ++i) xs.push_back(-4.0 + 0.03 * i);
    const auto one = k.evaluate(xs, 1);
    const auto many = k.evaluate(xs, 4);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        EXPECT_EQ(one[i], many[i]);
        EXPECT_EQ(one[i], k(xs[i]));
    }
}

TEST(Composed, LargeSpeedLimits) {
    const auto bounded = compose_full_kernel(NullSpec::bounded(-1.0, 2.0), kGauss, kTri);
    const double t = 300.0;
    EXPECT_NEAR(bounded.psi(t, -2.0), 0.0, 0.1);
    EXPECT_NEAR(bounded.psi(t, -1.0), 0.0, 0.1);
    EXPECT_NEAR(bounded.psi(t, 0.5), 1.0, 0.1);
    EXPECT_NEAR(bounded.psi(t, 2.0), 0.0, 0.1);
    EXPECT_NEAR(bounded.psi(t, 3.0), 0.0, 0.1);
    const auto onesided = compose_full_kernel(NullSpec::one_sided(0.0), kGauss, kTri);
    EXPECT_NEAR(onesided.psi(t, -1.0), 1.0, 0.1);
    EXPECT_NEAR(onesided.psi(t, 0.0), 0.0, 0.1);
    EXPECT_NEAR(onesided.psi(t, 1.0), 0.0, 0.1);
    const auto point = compose_full_kernel(NullSpec::point(0.0), kGauss, kTri);
    EXPECT_NEAR(point.psi(t, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(point.psi(t, 1.0), 0.0, 0.1);
}

TEST(Composed, Unbiased) {
    const auto c1 = compose_full_kernel(NullSpec::bounded(-1.0, 2.0), kGauss, kTri);
    expect_unbiased(c1.at(2.0), c1.psi(2.0, 0.5), [](SeededStream& r) { return sample(kGauss, 0.5, r); }, 9,
                    "composed bounded");
    const auto c2 = compose_full_kernel(NullSpec::one_sided(0.0), kGauss, kTri);
    expect_unbiased(c2.at(1.5), c2.psi(1.5, -0.5), [](SeededStream& r) { return sample(kGauss, -0.5, r); }, 10,
                    "composed onesided");
    const auto c3 = compose_full_kernel(NullSpec::one_sided(5.0), kGamma, kTri);
    expect_unbiased(c3.at(1.0), c3.psi(1.0, 0.1), [](SeededStream& r) { return sample(kGamma, 0.1, r); }, 11,
                    "composed gamma onesided");
    const auto c4 = compose_functional_kernel(FunctionalSpec::truncated_square(2.0), kGauss, kTri, true);
    expect_unbiased(c4.at(2.0), c4.psi(2.0, 1.8), [](SeededStream& r) { return sample(kGauss, 1.8, r); }, 12,
                    "composed weighted corrected");
}

TEST(Composed, ConfigurationErrors) {
    EXPECT_THROW(compose_full_kernel(NullSpec::one_sided(0.0), FamilyModel::cauchy(1.0), kTri),
                 UnsupportedConstruction);
    EXPECT_THROW(compose_full_kernel(NullSpec::point(0.0), kGamma, kTri), ConfigError);
    EXPECT_THROW(compose_full_kernel(NullSpec::bounded(-1.0, 2.0), kGamma, kTri), ConfigError);
    EXPECT_THROW(compose_full_kernel(NullSpec::bounded(2.0, 2.0), kGauss, kTri), InvalidInterval);
    EXPECT_NO_THROW(compose_full_kernel(NullSpec::bounded(-1.0, 2.0), FamilyModel::cauchy(1.0), kTri));
}

TEST(Composed, OverflowIsRangeError) {
    const auto c = compose_full_kernel(NullSpec::bounded(-1.0, 2.0), kGauss, kTri);
    EXPECT_THROW(c.at(60.0), RangeError);
}
