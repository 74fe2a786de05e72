#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "propest/baselines.hpp"
#include "propest/estimators.hpp"
#include "propest/families.hpp"
#include "propest/kernels.hpp"

namespace propest {

enum class ScenarioId { S1, S2, S3, S4, S5 };
enum class Sparsity { Dense, Moderate };

std::string to_string(ScenarioId id);
std::string to_string(Sparsity s);
ScenarioId parse_scenario(const std::string& text);
Sparsity parse_sparsity(const std::string& text);

/// One simulation experiment.
///
///   S1  Gaussian, bounded null (-1, 2)
///   S2  Gaussian, one-sided null (-inf, 0); MR and Storey baselines
///   S3  Gaussian, phi(y) = y^2 1{|y| <= 2} on [-2, 2], plain K_1 target
///   S4  Gamma, bounded null theta in (0, 0.35)
///   S5  Gamma, one-sided null theta < 0.35; MR and Storey baselines
struct ScenarioSpec {
    ScenarioId id = ScenarioId::S1;
    std::size_t m = 1000;
    Sparsity sparsity = Sparsity::Dense;
    std::uint64_t seed = 1;
    std::size_t reps = 50;
    /// Scale (S1-S3, default 1) or shape (S4-S5, default 4).
    std::optional<double> sigma;
    EstimatorConfig estimator;
    bool baselines = true;
    std::vector<double> storey_grid = default_storey_grid();
    /// Threads across replications; 0 means all hardware threads.
    unsigned threads = 1;

    void validate() const;
    FamilyModel family() const;
    /// Nominal alternative proportion: 0.2 or 1 / ln ln m.
    double nominal_pi1() const;
    /// Null set used by the estimators (mean scale for Gamma).
    NullSpec null() const;
    /// Weight function of S3.
    static FunctionalSpec scenario3_phi();
};

struct GeneratedScenario {
    /// Means (S1-S3) or natural parameters (S4-S5).
    std::vector<double> params;
    /// Realized alternative proportion m1/m, or the S3 functional target.
    double truth = 0.0;
    std::size_t m0 = 0;
    std::size_t m1 = 0;
    std::size_t m11 = 0;
    std::size_t at_a = 0;
    std::size_t at_b = 0;
};

/// Draws the parameter vector for one replication.
GeneratedScenario generate_scenario(const ScenarioSpec& spec, std::size_t rep_index);

struct RepRow {
    std::string estimator;
    std::size_t rep = 0;
    double estimate = 0.0;
    double truth = 0.0;
    double excess = 0.0;
    bool failed = false;
    std::string error;
};

struct Aggregate {
    std::string estimator;
    std::size_t reps = 0;
    double mean_excess = 0.0;
    double sd_excess = 0.0;
    std::size_t failed = 0;
    bool single_row = false;
};

struct ExperimentResult {
    std::string scenario;
    std::size_t m = 0;
    std::string sparsity;
    std::uint64_t seed = 0;
    double nominal_pi1 = 0.0;
    std::vector<RepRow> rows;
    std::vector<Aggregate> aggregates;
    double runtime_seconds = 0.0;
};

/// Per-estimator mean and sample standard deviation of the excess over
/// successful rows, in order of first appearance.
std::vector<Aggregate> aggregate_rows(const std::vector<RepRow>& rows);

/// Runs every replication; the result depends only on the spec, not on the
/// thread count.
ExperimentResult run_experiment(const ScenarioSpec& spec);

/// "{scenario}_{m}_{sparsity}_{seed}.csv".
std::string result_filename(const ScenarioSpec& spec);

/// Data rows, then a blank line and the aggregate block. Runtime is not
/// written so that reruns are byte-identical.
void write_results(const ExperimentResult& result, const std::string& path);
std::string format_results(const ExperimentResult& result);
ExperimentResult read_results(const std::string& path);

}  // namespace propest
