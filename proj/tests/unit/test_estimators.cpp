#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "propest/diagnostics.hpp"
#include "propest/errors.hpp"
#include "propest/estimators.hpp"
#include "support/oracles.hpp"

using namespace propest;

namespace {

constexpr double kPi = std::numbers::pi;
const FamilyModel kGauss = FamilyModel::gaussian(1.0);
const FamilyModel kGamma = FamilyModel::gamma(4.0);

std::vector<double> draw(const FamilyModel& f, const std::vector<double>& params, SeededStream& rng) {
    std::vector<double> out;
    out.reserve(params.size());
    for (double p : params) out.push_back(sample(f, p, rng));
    return out;
}

EstimatorConfig at_t(double t) {
    EstimatorConfig cfg;
    cfg.t_override = t;
    return cfg;
}

}  // namespace

TEST(SpeedSchedule, LocationShift) {
    SpeedSchedule s;
    s.tag = ScheduleTag::LsBounded;
    EXPECT_NEAR(speed_t(s, 1000, kGauss), std::sqrt(0.99 * std::log(1000.0)), 1e-12);
    EXPECT_NEAR(speed_t(s, 1000, kGauss), 2.6153, 1e-3);
    EXPECT_NEAR(speed_t(s, 1000, FamilyModel::gaussian(2.0)), std::sqrt(0.99 * std::log(1000.0)) / 2.0, 1e-12);
    s.gamma = 0.3;
    EXPECT_NEAR(speed_t(s, 500, kGauss), std::sqrt(0.6 * std::log(500.0)), 1e-12);
}

TEST(SpeedSchedule, GammaForms) {
    const double lnm = std::log(1000.0);
    const double u3 = 0.2 / std::log(lnm);
    SpeedSchedule bounded;
    bounded.tag = ScheduleTag::GammaBounded;
    bounded.protocol_sqrt = false;
    EXPECT_NEAR(speed_t(bounded, 1000, kGamma), u3 * lnm / 16.0, 1e-12);
    bounded.protocol_sqrt = true;
    EXPECT_NEAR(speed_t(bounded, 1000, kGamma), std::sqrt(0.25 / 4.0 * u3 * lnm), 1e-12);
    SpeedSchedule onesided;
    onesided.tag = ScheduleTag::GammaOnesided;
    EXPECT_NEAR(speed_t(onesided, 1000, kGamma), std::pow(2.0, -1.25) * 0.5 * std::sqrt(u3 * lnm), 1e-12);
    onesided.protocol_sqrt = false;
    EXPECT_NEAR(speed_t(onesided, 1000, kGamma), u3 * lnm / (4.0 * std::sqrt(2.0) * 4.0), 1e-12);
    SpeedSchedule small;
    small.tag = ScheduleTag::GammaBounded;
    small.protocol_sqrt = false;
    EXPECT_NEAR(speed_t(small, 1000, FamilyModel::gamma(0.5)), 0.25 * u3 * lnm, 1e-12);
}

TEST(SpeedSchedule, Errors) {
    SpeedSchedule s;
    EXPECT_THROW(speed_t(s, 1, kGauss), DomainError);
    s.tag = ScheduleTag::GammaBounded;
    EXPECT_THROW(speed_t(s, 2, kGamma), DomainError);
    EXPECT_THROW(speed_t(s, 1000, kGauss), ConfigError);
    s.tag = ScheduleTag::LsBounded;
    EXPECT_THROW(speed_t(s, 1000, kGamma), ConfigError);
    s.gamma = -1.0;
    EXPECT_THROW(speed_t(s, 1000, kGauss), ConfigError);
    EXPECT_EQ(parse_schedule_tag("GAMMA_ONESIDED"), ScheduleTag::GammaOnesided);
    EXPECT_THROW(parse_schedule_tag("FAST"), ConfigError);
}

TEST(EstimatePi1, SingleNullObservation) {
    const std::vector<double> z{0.3};
    const auto rep = estimate_pi1(z, kGauss, NullSpec::point(0.3), at_t(0.01));
    EXPECT_NEAR(rep.estimate, 0.0, 1e-4);
    EXPECT_EQ(rep.m, 1u);
    EXPECT_DOUBLE_EQ(rep.t_used, 0.01);
}

TEST(EstimatePi1, DualityAndDefaults) {
    SeededStream rng(3);
    const auto z = draw(kGauss, std::vector<double>(300, 0.5), rng);
    const auto rep = estimate_pi1(z, kGauss, NullSpec::bounded(-1.0, 2.0), EstimatorConfig{});
    ASSERT_TRUE(rep.null_estimate.has_value());
    EXPECT_EQ(*rep.null_estimate, 1.0 - rep.estimate);
    EXPECT_NEAR(rep.t_used, std::sqrt(0.99 * std::log(300.0)), 1e-12);
    ASSERT_TRUE(rep.variance.has_value());
    EXPECT_TRUE(rep.variance->value.has_value());
    EXPECT_THROW(estimate_pi1(std::vector<double>{}, kGauss, NullSpec::bounded(-1.0, 2.0), EstimatorConfig{}),
                 DomainError);
}

TEST(EstimatePi1, FarAlternativesGiveOne) {
    SeededStream rng(4);
    const std::vector<double> mu(2000, 8.0);
    const auto z = draw(kGauss, mu, rng);
    const auto cfg = at_t(3.0);
    const auto rep = estimate_pi1(z, kGauss, NullSpec::bounded(-1.0, 2.0), cfg);
    const double oracle_value = oracle_pi1(mu, kGauss, NullSpec::bounded(-1.0, 2.0), cfg);
    EXPECT_NEAR(oracle_value, 1.0, 0.05);
    EXPECT_NEAR(rep.estimate, oracle_value, 0.1);
}

TEST(EstimatePi1, OverflowNamesT) {
    const std::vector<double> z{0.0, 1.0};
    try {
        estimate_pi1(z, kGauss, NullSpec::bounded(-1.0, 2.0), at_t(60.0));
        FAIL() << "expected RangeError";
    } catch (const RangeError& e) {
        EXPECT_NE(std::string(e.what()).find("t = 60"), std::string::npos) << e.what();
    }
}

TEST(EstimatePi1, UnsupportedPairPropagates) {
    const std::vector<double> z{0.0, 1.0};
    EXPECT_THROW(estimate_pi1(z, FamilyModel::cauchy(1.0), NullSpec::one_sided(0.0), EstimatorConfig{}),
                 UnsupportedConstruction);
}

TEST(OraclePi1, LargeSpeedLimits) {
    const NullSpec null = NullSpec::bounded(-1.0, 2.0);
    EXPECT_NEAR(oracle_pi1(std::vector<double>(10, 0.5), kGauss, null, {}, 300.0), 0.0, 0.02);
    std::vector<double> mixed(50, 0.5);
    mixed.insert(mixed.end(), 50, 6.0);
    EXPECT_NEAR(oracle_pi1(mixed, kGauss, null, {}, 300.0), 0.5, 0.02);
}

TEST(OraclePi1, DistanceToProportionWithinRate) {
    const WeightFunction w = WeightFunction::triangular();
    const double c = 4.0 * (w.total_variation() + w.sup_norm());
    struct Case {
        NullSpec null;
        std::vector<double> mu;
        double pi1;
        std::vector<double> boundary;
    };
    const std::vector<Case> cases{
        {NullSpec::bounded(-1.0, 2.0), {0.0, 0.5, 1.5, 2.4, -1.3, 3.0, -1.0, 2.0}, 5.0 / 8.0, {-1.0, 2.0}},
        {NullSpec::bounded(0.0, 1.0), {0.2, 0.8, 1.5, -0.5}, 0.5, {0.0, 1.0}},
        {NullSpec::one_sided(0.0), {-2.0, -0.4, 0.0, 0.6, 1.2}, 3.0 / 5.0, {0.0}},
    };
    for (const auto& cs : cases) {
        const double u = boundary_gap(cs.mu, cs.boundary);
        for (double t : {5.0, 20.0, 80.0}) {
            const double gap = std::abs(oracle_pi1(cs.mu, kGauss, cs.null, {}, t) - cs.pi1);
            EXPECT_LE(gap, 6.0 * kPi / t + c / (t * u)) << cs.null.to_string() << " t=" << t;
        }
    }
}

TEST(EstimatePi1, MeanOverReplicationsMatchesOracle) {
    struct Case {
        FamilyModel family;
        NullSpec null;
        std::vector<double> params;
        double t;
    };
    const std::vector<Case> cases{
        {kGauss, NullSpec::bounded(-1.0, 2.0), {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 4.5}, 2.0},
        {kGauss, NullSpec::one_sided(0.0), {-2.0, -0.5, 0.0, 0.5, 1.0, 2.5}, 1.5},
        {kGamma, NullSpec::bounded(4.0, 4.0 / 0.65), {-0.2, 0.0, 0.1, 0.2, 0.35, 0.5}, 0.3},
        {kGamma, NullSpec::one_sided(4.0 / 0.65), {-0.2, 0.1, 0.35, 0.45, 0.55}, 0.3},
    };
    const int reps = 300;
    for (const auto& cs : cases) {
        std::vector<double> params;
        for (int k = 0; k < 20; ++k) params.insert(params.end(), cs.params.begin(), cs.params.end());
        const auto cfg = at_t(cs.t);
        const double target = oracle_pi1(params, cs.family, cs.null, cfg);
        SeededStream rng(17);
        double s = 0.0, s2 = 0.0;
        for (int r = 0; r < reps; ++r) {
            const double e = estimate_pi1(draw(cs.family, params, rng), cs.family, cs.null, cfg).estimate;
            s += e;
            s2 += e * e;
        }
        const double mean = s / reps;
        const double se = std::sqrt((s2 / reps - mean * mean) / (reps - 1));
        EXPECT_LE(std::abs(mean - target), 5.0 * se) << cs.family.name() << ' ' << cs.null.to_string();
    }
}

TEST(Functional, ConstantWeightAndZeroWeight) {
    SeededStream rng(21);
    const std::vector<double> mu(1000, 0.5);
    const auto z = draw(kGauss, mu, rng);
    const auto one = FunctionalSpec::constant(1.0, -1.0, 2.0);
    const auto cfg = at_t(2.5);
    const auto rep = estimate_functional(z, kGauss, one, true, cfg);
    const double target = oracle_functional(mu, kGauss, one, true, cfg);
    const auto values = compose_functional_kernel(one, kGauss, cfg.omega, true).at(2.5).evaluate(z);
    double s2 = 0.0;
    for (double v : values) s2 += (v - rep.estimate) * (v - rep.estimate);
    const double se = std::sqrt(s2 / (values.size() - 1) / values.size());
    EXPECT_LE(std::abs(rep.estimate - target), 5.0 * se);
    EXPECT_NEAR(oracle_functional(mu, kGauss, one, true, {}, 300.0), 1.0, 0.02);
    const auto zero = FunctionalSpec::constant(0.0, -1.0, 2.0);
    EXPECT_EQ(estimate_functional(z, kGauss, zero, false, cfg).estimate, 0.0);
}

TEST(Functional, TruthCountsBoundaryHalf) {
    const auto spec = FunctionalSpec::truncated_square(2.0);
    const std::vector<double> mu{0.0, 1.0, 2.0, -2.0, 3.0};
    EXPECT_NEAR(functional_truth(mu, spec), (0.0 + 1.0 + 2.0 + 2.0 + 0.0) / 5.0, 1e-15);
    EXPECT_THROW(functional_truth(std::vector<double>{}, spec), DomainError);
}

TEST(VarianceBound, LocationBranches) {
    const WeightFunction w = WeightFunction::triangular();
    const NullSpec bounded = NullSpec::bounded(-1.0, 2.0);
    EXPECT_NEAR(*variance_bound(kGauss, bounded, 0.0, 50, w, {}).value, 16.0 / 50.0, 1e-12);
    const double g2 = g_factor(kGauss, 2.0);
    EXPECT_NEAR(*variance_bound(kGauss, bounded, 2.0, 500, w, {}).value,
                g2 * g2 / 500.0 * (4.0 + 2.0 / (kPi * kPi) * 9.0 * 4.0), 1e-12);
    BoundExtras dm;
    dm.d_m = 1.0;
    const double g1 = g_factor(kGauss, 1.0);
    EXPECT_NEAR(*variance_bound(kGauss, NullSpec::one_sided(0.0), 1.0, 100, w, dm).value,
                2.0 * std::exp(1.0) / (kPi * kPi * 100.0) * 5.0 + 2.0 / 100.0 * g1 * g1, 1e-12);
    BoundExtras phi;
    phi.phi = FunctionalSpec::truncated_square(2.0);
    EXPECT_NEAR(*variance_bound(kGauss, bounded, 2.0, 500, w, phi).value,
                g2 * g2 / 500.0 * (4.0 + 2.0 * 4.0 / (kPi * kPi) * 16.0 * 4.0), 1e-12);
}

TEST(VarianceBound, UnsupportedAndTrendOnly) {
    const WeightFunction w = WeightFunction::triangular();
    EXPECT_THROW(variance_bound(kGauss, NullSpec::one_sided(0.0), 1.0, 100, w, {}), ConfigError);
    EXPECT_THROW(variance_bound(FamilyModel::laplace(1.0), NullSpec::one_sided(0.0), 1.0, 100, w, {}),
                 UnsupportedOperation);
    BoundExtras th;
    th.thetas = {0.1, 0.2, 0.3};
    const auto rep = variance_bound(kGamma, NullSpec::bounded(4.0, 8.0), 0.3, 3, w, th);
    EXPECT_TRUE(rep.trend_only);
    EXPECT_FALSE(rep.value.has_value());
    EXPECT_GT(rep.trend, 0.0);
    EXPECT_THROW(variance_bound(kGamma, NullSpec::bounded(4.0, 8.0), 0.3, 3, w, {}), ConfigError);
}

TEST(Concentration, HandArithmetic) {
    const WeightFunction w = WeightFunction::triangular();
    const auto rep = concentration_halfwidth(kGauss, NullSpec::bounded(-1.0, 2.0), 2.0, 10000, 3.0, w, {});
    EXPECT_NEAR(*rep.halfwidth, 3.0 / (2.0 * kPi) * 1e-2 * (2.0 * 3.0 + 2.0) * g_factor(kGauss, 2.0), 1e-12);
    EXPECT_NEAR(*rep.prob_floor, 1.0 - 4.0 * std::exp(-4.5), 1e-15);
    const auto zero = concentration_halfwidth(kGauss, NullSpec::bounded(-1.0, 2.0), 2.0, 10000, 0.0, w, {});
    EXPECT_EQ(*zero.halfwidth, 0.0);
    EXPECT_LE(*zero.prob_floor, -3.0);
    BoundExtras th;
    EXPECT_TRUE(concentration_halfwidth(kGamma, NullSpec::bounded(4.0, 8.0), 0.3, 10, 3.0, w, th).trend_only);
}

TEST(ClassMembership, LocationBoundedConstraints) {
    SpeedSchedule s;
    s.tag = ScheduleTag::LsBounded;
    s.gamma = 0.4;
    ClassExtras ex;
    ex.q = 1.0;
    ex.vartheta = 0.6;
    ex.vartheta_prime = 0.05;
    ex.rho = 3.0;
    ex.params = {0.0, 0.5, 3.0};
    const auto rep = class_membership(s, kGauss, NullSpec::bounded(-1.0, 2.0), 1000, 0.2, ex);
    bool found = false;
    for (const auto& p : rep.predicates) {
        if (p.name == "q*gamma > vartheta") {
            found = true;
            EXPECT_FALSE(p.satisfied);
        }
    }
    EXPECT_TRUE(found);
    EXPECT_FALSE(rep.all_satisfied());
    EXPECT_TRUE(rep.upsilon.has_value());
    EXPECT_TRUE(rep.p_star.has_value());
    ClassExtras missing;
    EXPECT_THROW(class_membership(s, kGauss, NullSpec::bounded(-1.0, 2.0), 1000, 0.2, missing), ConfigError);
}

TEST(ClassMembership, GaussianOnesidedSquareSum) {
    SpeedSchedule s;
    s.tag = ScheduleTag::LsOnesidedGauss;
    s.gamma = 0.4;
    ClassExtras ex;
    ex.gamma_prime = 0.45;
    ex.params = std::vector<double>(100, 0.0);
    const auto rep = class_membership(s, kGauss, NullSpec::one_sided(0.0), 1000, 0.2, ex);
    bool found = false;
    for (const auto& p : rep.predicates) {
        if (p.name.rfind("m^-1 sum mu_i^2", 0) == 0) {
            found = true;
            EXPECT_EQ(p.lhs, 0.0);
            EXPECT_TRUE(p.satisfied);
            EXPECT_TRUE(p.heuristic);
        }
    }
    EXPECT_TRUE(found);
}

TEST(ClassMembership, GammaShapeSelectsClass) {
    SpeedSchedule s;
    s.tag = ScheduleTag::GammaBounded;
    ClassExtras ex;
    ex.params = {0.0, 0.1, 0.4};
    const auto big = class_membership(s, kGamma, NullSpec::bounded(4.0, 4.0 / 0.65), 1000, 0.2, ex);
    EXPECT_EQ(big.class_name, "gamma bounded, sigma >= 11/4");
    const FamilyModel small = FamilyModel::gamma(0.5);
    const auto low = class_membership(s, small, NullSpec::bounded(0.5, 0.5 / 0.65), 1000, 0.2, ex);
    EXPECT_EQ(low.class_name, "gamma bounded, sigma <= 3/4");
    EXPECT_EQ(class_membership(s, FamilyModel::gamma(1.5), NullSpec::bounded(1.5, 3.0), 1000, 0.2, ex).class_name,
              "none");
}

TEST(BoundaryGap, SkipsBoundaryPoints) {
    EXPECT_NEAR(boundary_gap({-1.0, 0.0, 2.5}, {-1.0, 2.0}), 0.5, 1e-15);
    EXPECT_TRUE(std::isinf(boundary_gap({-1.0, 2.0}, {-1.0, 2.0})));
}
