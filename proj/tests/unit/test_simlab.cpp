#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "propest/errors.hpp"
#include "propest/simlab.hpp"

using namespace propest;

namespace {

ScenarioSpec make(ScenarioId id, std::size_t m, Sparsity s = Sparsity::Dense) {
    ScenarioSpec spec;
    spec.id = id;
    spec.m = m;
    spec.sparsity = s;
    return spec;
}

std::size_t count_in(const std::vector<double>& v, double lo, double hi) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](double x) { return x >= lo && x <= hi; }));
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("propest_" + name)).string();
}

}  // namespace

TEST(Scenario, S1DenseCounts) {
    const auto g = generate_scenario(make(ScenarioId::S1, 1000), 0);
    EXPECT_EQ(g.params.size(), 1000u);
    EXPECT_EQ(g.m0, 800u);
    EXPECT_EQ(g.m1, 200u);
    EXPECT_EQ(g.m11, 1u);
    EXPECT_EQ(g.at_a + g.at_b, 198u);
    EXPECT_DOUBLE_EQ(g.truth, 0.2);
    const double u = 1.0 / std::log(std::log(1000.0));
    EXPECT_EQ(count_in(g.params, -1.0 + u, 2.0 - u), 800u);
    EXPECT_EQ(std::count(g.params.begin(), g.params.end(), -1.0), 99);
}

TEST(Scenario, S2ModerateCounts) {
    const auto spec = make(ScenarioId::S2, 1000, Sparsity::Moderate);
    const double pi1 = 1.0 / std::log(std::log(1000.0));
    EXPECT_NEAR(spec.nominal_pi1(), pi1, 1e-15);
    const auto g = generate_scenario(spec, 3);
    const auto m1 = static_cast<std::size_t>(std::llround(pi1 * 1000.0));
    EXPECT_EQ(g.m1, m1);
    EXPECT_EQ(g.m0, 1000u - m1);
    EXPECT_EQ(g.at_b, m1 - static_cast<std::size_t>(std::floor(0.9 * m1)));
    EXPECT_EQ(static_cast<std::size_t>(std::count(g.params.begin(), g.params.end(), 0.0)), g.at_b);
    EXPECT_NEAR(g.truth, static_cast<double>(m1) / 1000.0, 1e-15);
}

TEST(Scenario, S3TruthRecomputed) {
    const auto g = generate_scenario(make(ScenarioId::S3, 400), 1);
    double s = 0.0;
    for (double mu : g.params) {
        if (std::abs(mu) < 2.0) s += mu * mu;
        else if (std::abs(mu) == 2.0) s += 2.0;
    }
    EXPECT_NEAR(g.truth, s / 400.0, 1e-12);
    EXPECT_GT(g.truth, 0.0);
}

TEST(Scenario, GammaDefaultsAndNull) {
    const auto spec = make(ScenarioId::S4, 200);
    const auto fam = spec.family();
    EXPECT_TRUE(fam.is_gamma());
    const auto g = generate_scenario(spec, 0);
    for (double th : g.params) {
        EXPECT_GE(th, -0.2);
        EXPECT_LE(th, 0.55);
    }
    const auto null5 = make(ScenarioId::S5, 200).null();
    EXPECT_NEAR(std::get<NullSpec::OneSided>(null5.value).b, fam.gamma_mean(0.35), 1e-12);
}

TEST(Scenario, Errors) {
    EXPECT_THROW(generate_scenario(make(ScenarioId::S1, 8), 0), DomainError);
    auto spec = make(ScenarioId::S1, 100);
    spec.reps = 0;
    EXPECT_THROW(spec.validate(), ConfigError);
    EXPECT_THROW(parse_scenario("S9"), ConfigError);
    EXPECT_THROW(parse_sparsity("sparse"), ConfigError);
}

TEST(Scenario, DeterministicPerRep) {
    const auto spec = make(ScenarioId::S1, 300);
    EXPECT_EQ(generate_scenario(spec, 4).params, generate_scenario(spec, 4).params);
    EXPECT_NE(generate_scenario(spec, 4).params, generate_scenario(spec, 5).params);
}

TEST(Aggregates, SingleRowAndOrder) {
    std::vector<RepRow> rows{{"proposed", 0, 0.3, 0.2, 0.5}};
    auto agg = aggregate_rows(rows);
    ASSERT_EQ(agg.size(), 1u);
    EXPECT_TRUE(agg[0].single_row);
    EXPECT_EQ(agg[0].sd_excess, 0.0);
    rows = {{"a", 0, 0, 0, 1.0}, {"b", 0, 0, 0, 2.0}, {"a", 1, 0, 0, 3.0}, {"b", 1, 0, 0, 2.0},
            {"a", 2, 0, 0, 5.0}, {"b", 2, 0, 0, std::nan(""), true}};
    agg = aggregate_rows(rows);
    ASSERT_EQ(agg.size(), 2u);
    EXPECT_EQ(agg[0].estimator, "a");
    EXPECT_DOUBLE_EQ(agg[0].mean_excess, 3.0);
    EXPECT_DOUBLE_EQ(agg[0].sd_excess, 2.0);
    EXPECT_EQ(agg[1].failed, 1u);
    EXPECT_EQ(agg[1].reps, 3u);
}

TEST(Experiment, RowLayoutAndRoundTrip) {
    auto spec = make(ScenarioId::S2, 200);
    spec.reps = 3;
    const auto res = run_experiment(spec);
    ASSERT_EQ(res.rows.size(), 9u);
    EXPECT_EQ(res.rows[0].estimator, "proposed");
    EXPECT_EQ(res.rows[1].estimator, "mr");
    EXPECT_EQ(res.rows[2].estimator, "storey");
    EXPECT_EQ(res.aggregates.size(), 3u);
    for (const auto& row : res.rows) EXPECT_NEAR(row.excess, row.estimate / row.truth - 1.0, 1e-12);

    const std::string path = temp_path("roundtrip.csv");
    write_results(res, path);
    const auto back = read_results(path);
    ASSERT_EQ(back.rows.size(), res.rows.size());
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        EXPECT_NEAR(back.rows[i].estimate, res.rows[i].estimate, 1e-9);
        EXPECT_EQ(back.rows[i].estimator, res.rows[i].estimator);
    }
    ASSERT_EQ(back.aggregates.size(), 3u);
    EXPECT_NEAR(back.aggregates[0].mean_excess, res.aggregates[0].mean_excess, 1e-9);
    std::remove(path.c_str());
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
    auto spec = make(ScenarioId::S1, 300);
    spec.reps = 4;
    const auto one = format_results(run_experiment(spec));
    spec.threads = 0;
    EXPECT_EQ(format_results(run_experiment(spec)), one);
}

TEST(Experiment, BaselinesOffAndSingleRep) {
    auto spec = make(ScenarioId::S1, 200);
    spec.reps = 1;
    const auto res = run_experiment(spec);
    ASSERT_EQ(res.rows.size(), 1u);
    ASSERT_EQ(res.aggregates.size(), 1u);
    EXPECT_TRUE(res.aggregates[0].single_row);
    EXPECT_EQ(res.aggregates[0].sd_excess, 0.0);
    EXPECT_EQ(result_filename(spec), "S1_200_dense_1.csv");
}

TEST(ResultsFile, EmptyIsHeaderOnlyAndBadInput) {
    ExperimentResult empty;
    const std::string text = format_results(empty);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    const std::string path = temp_path("bad.csv");
    {
        std::ofstream out(path);
        out << "not,a,header\n";
    }
    EXPECT_THROW(read_results(path), ParseError);
    std::remove(path.c_str());
    EXPECT_THROW(read_results(temp_path("missing_dir/none.csv")), IoError);
}
