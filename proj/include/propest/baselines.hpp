#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "propest/families.hpp"

namespace propest {

/// 1 - F_b(x), clamped to [0, 1].
double one_sided_pvalue(double x, const FamilyModel& family, double b);

struct MrResult {
    double estimate = 0.0;
    /// Ranks in 2..m-2 skipped because p_(i) = 1.
    std::vector<std::size_t> skipped;
};

/// Clamped maximum over i = 2..m-2 of
///   q_i = {i/m - p_(i) - b_m sqrt(p_(i)(1 - p_(i)))} / (1 - p_(i)),
/// b_m = m^{-1/2} sqrt(2 ln ln m). DomainError for m <= 4.
MrResult mr_estimate_detail(std::span<const double> pvalues);
double mr_estimate(std::span<const double> pvalues);

struct StoreyResult {
    double estimate = 0.0;
    double lambda = 0.0;
    /// (lambda, pi0_hat(lambda)) over the whole grid.
    std::vector<std::pair<double, double>> profile;
};

/// Default grid 0.05, 0.10, ..., 0.95.
std::vector<double> default_storey_grid();

/// pi0(l) = #{p > l} / (m (1 - l)); the estimate is 1 - min(1, pi0) at the
/// last lambda of the grid. ConfigError for an empty grid.
StoreyResult storey_estimate_detail(std::span<const double> pvalues, const std::vector<double>& lambdas);
double storey_estimate(std::span<const double> pvalues,
                       const std::vector<double>& lambdas = default_storey_grid());

}  // namespace propest
