#include "propest/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "propest/errors.hpp"

namespace propest {

namespace {

void check_pvalues(std::span<const double> p) {
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("p-values must lie in [0, 1], got " + std::to_string(v));
        }
    }
}

}  // namespace

double one_sided_pvalue(double x, const FamilyModel& family, double b) {
    double param = b;
    if (family.is_gamma()) param = family.gamma_theta(b);
    return std::clamp(1.0 - cdf(family, param, x), 0.0, 1.0);
}

MrResult mr_estimate_detail(std::span<const double> pvalues) {
    const std::size_t m = pvalues.size();
    if (m <= 4) throw DomainError("MR estimator needs m > 4, got " + std::to_string(m));
    check_pvalues(pvalues);
    std::vector<double> p(pvalues.begin(), pvalues.end());
    std::stable_sort(p.begin(), p.end());
    const double md = static_cast<double>(m);
    const double bm = std::sqrt(2.0 * std::log(std::log(md))) / std::sqrt(md);
    MrResult out;
    double best = 0.0;
    for (std::size_t i = 2; i <= m - 2; ++i) {
        const double pi = p[i - 1];
        if (pi == 1.0) {
            out.skipped.push_back(i);
            continue;
        }
        const double q = (static_cast<double>(i) / md - pi - bm * std::sqrt(pi * (1.0 - pi))) / (1.0 - pi);
        best = std::max(best, q);
    }
    out.estimate = std::min(1.0, best);
    return out;
}

double mr_estimate(std::span<const double> pvalues) { return mr_estimate_detail(pvalues).estimate; }

std::vector<double> default_storey_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
    return grid;
}

StoreyResult storey_estimate_detail(std::span<const double> pvalues, const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw ConfigError("Storey estimator needs a nonempty lambda grid");
    if (pvalues.empty()) throw DomainError("Storey estimator needs at least one p-value");
    check_pvalues(pvalues);
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] > 0.0 && lambdas[k] < 1.0)) throw ConfigError("Storey lambdas must lie in (0, 1)");
        if (k > 0 && lambdas[k] < lambdas[k - 1]) throw ConfigError("Storey lambda grid must be ascending");
    }
    const double md = static_cast<double>(pvalues.size());
    StoreyResult out;
    for (double lambda : lambdas) {
        const auto above = std::count_if(pvalues.begin(), pvalues.end(), [&](double v) { return v > lambda; });
        out.profile.emplace_back(lambda, static_cast<double>(above) / (md * (1.0 - lambda)));
    }
    out.lambda = out.profile.back().first;
    out.estimate = 1.0 - std::clamp(out.profile.back().second, 0.0, 1.0);
    return out;
}

double storey_estimate(std::span<const double> pvalues, const std::vector<double>& lambdas) {
    return storey_estimate_detail(pvalues, lambdas).estimate;
}

}  // namespace propest
