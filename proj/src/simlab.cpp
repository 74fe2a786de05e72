#include "propest/simlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "propest/baselines.hpp"
#include "propest/errors.hpp"
#include "propest/parallel.hpp"

namespace propest {

namespace {

constexpr double kThetaA = 0.0;
constexpr double kThetaB = 0.35;
constexpr double kThetaLow = -0.2;
constexpr double kThetaHigh = 0.55;

bool is_gamma_scenario(ScenarioId id) { return id == ScenarioId::S4 || id == ScenarioId::S5; }

double log_log(std::size_t m) { return std::log(std::log(static_cast<double>(m))); }

// Continuous uniform on [lo, hi].
void fill_uniform(std::vector<double>& out, std::size_t count, double lo, double hi, SeededStream& rng) {
    if (count > 0 && !(lo <= hi)) {
        throw DomainError("scenario range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is empty");
    }
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * rng.uniform());
}

void fill_constant(std::vector<double>& out, std::size_t count, double v) { out.insert(out.end(), count, v); }

std::size_t checked_rest(std::size_t m, std::size_t used, const char* what) {
    if (used > m) {
        throw DomainError(std::string("scenario counts exceed m: ") + what + " = " + std::to_string(used) +
                          " > m = " + std::to_string(m));
    }
    return m - used;
}

std::string fmt12(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("bad number '" + s + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

constexpr const char* kDataHeader = "scenario,m,sparsity,estimator,rep,estimate,truth,excess";
constexpr const char* kAggHeader = "scenario,m,sparsity,estimator,reps,mean_excess,sd_excess,failed,nominal_pi1";

}  // namespace

std::string to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::S1: return "S1";
        case ScenarioId::S2: return "S2";
        case ScenarioId::S3: return "S3";
        case ScenarioId::S4: return "S4";
        case ScenarioId::S5: return "S5";
    }
    return "S?";
}

std::string to_string(Sparsity s) { return s == Sparsity::Dense ? "dense" : "moderate"; }

ScenarioId parse_scenario(const std::string& text) {
    for (auto id : {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3, ScenarioId::S4, ScenarioId::S5}) {
        if (text == to_string(id)) return id;
    }
    throw ConfigError("unknown scenario '" + text + "' (expected S1..S5)");
}

Sparsity parse_sparsity(const std::string& text) {
    if (text == "dense") return Sparsity::Dense;
    if (text == "moderate") return Sparsity::Moderate;
    throw ConfigError("unknown sparsity '" + text + "' (expected dense or moderate)");
}

void ScenarioSpec::validate() const {
    if (m < 16) throw DomainError("scenario m must be at least 16");
    if (reps < 1) throw ConfigError("reps must be at least 1");
    if (sigma && !(*sigma > 0.0)) throw DomainError("sigma must be positive");
    estimator.validate();
}

FamilyModel ScenarioSpec::family() const {
    if (is_gamma_scenario(id)) return FamilyModel::gamma(sigma.value_or(4.0));
    return FamilyModel::gaussian(sigma.value_or(1.0));
}

double ScenarioSpec::nominal_pi1() const { return sparsity == Sparsity::Dense ? 0.2 : 1.0 / log_log(m); }

NullSpec ScenarioSpec::null() const {
    const FamilyModel fam = family();
    switch (id) {
        case ScenarioId::S1: return NullSpec::bounded(-1.0, 2.0);
        case ScenarioId::S2: return NullSpec::one_sided(0.0);
        case ScenarioId::S3: return NullSpec::bounded(-2.0, 2.0);
        case ScenarioId::S4: return NullSpec::bounded(fam.gamma_mean(kThetaA), fam.gamma_mean(kThetaB));
        case ScenarioId::S5: return NullSpec::one_sided(fam.gamma_mean(kThetaB));
    }
    return NullSpec{};
}

FunctionalSpec ScenarioSpec::scenario3_phi() { return FunctionalSpec::truncated_square(2.0); }

GeneratedScenario generate_scenario(const ScenarioSpec& spec, std::size_t rep_index) {
    spec.validate();
    SeededStream rng = SeededStream::for_replication(spec.seed, to_string(spec.id), rep_index).split(0);
    const std::size_t m = spec.m;
    const double lnln = log_log(m);
    GeneratedScenario g;
    g.m1 = static_cast<std::size_t>(std::llround(spec.nominal_pi1() * static_cast<double>(m)));
    g.m0 = m - g.m1;
    g.params.reserve(m);
    const long long m11_raw = static_cast<long long>(std::floor(0.5 * static_cast<double>(g.m1))) -
                              static_cast<long long>(std::floor(static_cast<double>(m) / lnln));
    const std::size_t m11 = static_cast<std::size_t>(std::max<long long>(1, m11_raw));

    switch (spec.id) {
        case ScenarioId::S1: {
            const double a = -1.0, b = 2.0, u = 1.0 / lnln;
            g.m11 = m11;
            const std::size_t rest = checked_rest(m, g.m0 + 2 * m11, "m0 + 2 m11");
            g.at_a = rest - rest / 2;
            g.at_b = rest / 2;
            fill_uniform(g.params, g.m0, a + u, b - u, rng);
            fill_uniform(g.params, m11, b + u, b + 6.0, rng);
            fill_uniform(g.params, m11, a - 4.0, a - u, rng);
            fill_constant(g.params, g.at_a, a);
            fill_constant(g.params, g.at_b, b);
            g.truth = static_cast<double>(m - g.m0) / static_cast<double>(m);
            break;
        }
        case ScenarioId::S2: {
            const double b = 0.0, u = 1.0 / lnln;
            const auto far = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(g.m1)));
            g.at_b = checked_rest(m, g.m0 + far, "m0 + floor(0.9 m1)");
            fill_uniform(g.params, g.m0, -4.0, b - u, rng);
            fill_uniform(g.params, far, b + u, b + 6.0, rng);
            fill_constant(g.params, g.at_b, b);
            g.truth = static_cast<double>(m - g.m0) / static_cast<double>(m);
            break;
        }
        case ScenarioId::S3: {
            const double a = -2.0, b = 2.0, u = 1.0 / lnln;
            const auto upper = static_cast<std::size_t>(std::floor(0.5 * static_cast<double>(g.m1)));
            const std::size_t lower = checked_rest(m, g.m0 + upper, "m0 + floor(0.5 m1)");
            fill_uniform(g.params, g.m0, a, b, rng);
            fill_uniform(g.params, upper, b + u, b + 6.0, rng);
            fill_uniform(g.params, lower, b - 4.0, b - u, rng);
            g.truth = functional_truth(g.params, ScenarioSpec::scenario3_phi());
            break;
        }
        case ScenarioId::S4: {
            const double u3 = 0.2 / lnln;
            g.m11 = m11;
            const std::size_t rest = checked_rest(m, g.m0 + 2 * m11, "m0 + 2 m11");
            g.at_a = rest - rest / 2;
            g.at_b = rest / 2;
            fill_uniform(g.params, g.m0, kThetaA + u3, kThetaB - u3, rng);
            fill_uniform(g.params, m11, kThetaB + u3, kThetaHigh, rng);
            fill_uniform(g.params, m11, kThetaLow, kThetaA - u3, rng);
            fill_constant(g.params, g.at_a, kThetaA);
            fill_constant(g.params, g.at_b, kThetaB);
            g.truth = static_cast<double>(m - g.m0) / static_cast<double>(m);
            break;
        }
        case ScenarioId::S5: {
            const double u3 = 0.2 / lnln;
            const auto far = static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(g.m1)));
            g.at_b = checked_rest(m, g.m0 + far, "m0 + floor(0.9 m1)");
            fill_uniform(g.params, g.m0, kThetaLow, kThetaB - u3, rng);
            fill_uniform(g.params, far, kThetaB + u3, kThetaHigh, rng);
            fill_constant(g.params, g.at_b, kThetaB);
            g.truth = static_cast<double>(m - g.m0) / static_cast<double>(m);
            break;
        }
    }
    return g;
}

std::vector<Aggregate> aggregate_rows(const std::vector<RepRow>& rows) {
    std::vector<Aggregate> out;
    std::vector<std::vector<double>> values;
    for (const auto& row : rows) {
        std::size_t k = 0;
        while (k < out.size() && out[k].estimator != row.estimator) ++k;
        if (k == out.size()) {
            out.push_back(Aggregate{row.estimator});
            values.emplace_back();
        }
        ++out[k].reps;
        if (row.failed || std::isnan(row.excess)) {
            ++out[k].failed;
        } else {
            values[k].push_back(row.excess);
        }
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto& v = values[k];
        if (v.empty()) {
            out[k].mean_excess = std::nan("");
            out[k].sd_excess = std::nan("");
            continue;
        }
        const double mean = pairwise_sum(v) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        out[k].mean_excess = mean;
        out[k].single_row = v.size() == 1;
        out[k].sd_excess = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    }
    return out;
}

ExperimentResult run_experiment(const ScenarioSpec& spec) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    const FamilyModel family = spec.family();
    const NullSpec null = spec.null();
    const bool with_baselines = spec.baselines && (spec.id == ScenarioId::S2 || spec.id == ScenarioId::S5);
    const std::size_t per_rep = with_baselines ? 3 : 1;
    EstimatorConfig est = spec.estimator;
    est.threads = 1;

    std::vector<RepRow> rows(spec.reps * per_rep);
    parallel_for(spec.reps, spec.threads, [&](std::size_t rep) {
        RepRow* slot = &rows[rep * per_rep];
        slot[0].estimator = "proposed";
        if (with_baselines) {
            slot[1].estimator = "mr";
            slot[2].estimator = "storey";
        }
        for (std::size_t k = 0; k < per_rep; ++k) slot[k].rep = rep;

        GeneratedScenario g;
        std::vector<double> data;
        try {
            g = generate_scenario(spec, rep);
            SeededStream rng = SeededStream::for_replication(spec.seed, to_string(spec.id), rep).split(1);
            data.reserve(g.params.size());
            for (double p : g.params) data.push_back(sample(family, p, rng));
        } catch (const Error& e) {
            for (std::size_t k = 0; k < per_rep; ++k) {
                slot[k].failed = true;
                slot[k].error = e.what();
                slot[k].estimate = slot[k].excess = slot[k].truth = std::nan("");
            }
            return;
        }

        auto record = [&](RepRow& row, auto&& compute) {
            row.truth = g.truth;
            try {
                row.estimate = compute();
                row.excess = row.estimate / g.truth - 1.0;
            } catch (const Error& e) {
                row.failed = true;
                row.error = e.what();
                row.estimate = row.excess = std::nan("");
            }
        };
        record(slot[0], [&] {
            if (spec.id == ScenarioId::S3) {
                return estimate_functional(data, family, ScenarioSpec::scenario3_phi(), false, est).estimate;
            }
            return estimate_pi1(data, family, null, est).estimate;
        });
        if (with_baselines) {
            std::vector<double> pvalues(data.size());
            const double b = std::get<NullSpec::OneSided>(null.value).b;
            for (std::size_t i = 0; i < data.size(); ++i) pvalues[i] = one_sided_pvalue(data[i], family, b);
            record(slot[1], [&] { return mr_estimate(pvalues); });
            record(slot[2], [&] { return storey_estimate(pvalues, spec.storey_grid); });
        }
    });

    if (std::all_of(rows.begin(), rows.end(), [](const RepRow& r) { return r.failed; })) {
        throw Error("every replication failed: " + rows.front().error);
    }

    ExperimentResult result;
    result.scenario = to_string(spec.id);
    result.m = spec.m;
    result.sparsity = to_string(spec.sparsity);
    result.seed = spec.seed;
    result.nominal_pi1 = spec.nominal_pi1();
    result.rows = std::move(rows);
    result.aggregates = aggregate_rows(result.rows);
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string result_filename(const ScenarioSpec& spec) {
    return to_string(spec.id) + "_" + std::to_string(spec.m) + "_" + to_string(spec.sparsity) + "_" +
           std::to_string(spec.seed) + ".csv";
}

std::string format_results(const ExperimentResult& result) {
    std::ostringstream os;
    os << kDataHeader << '\n';
    const std::string prefix = result.scenario + "," + std::to_string(result.m) + "," + result.sparsity + ",";
    for (const auto& row : result.rows) {
        os << prefix << row.estimator << ',' << row.rep << ',' << fmt12(row.estimate) << ','
           << fmt12(row.truth) << ',' << fmt12(row.excess) << '\n';
    }
    if (!result.aggregates.empty()) {
        os << '\n' << kAggHeader << '\n';
        for (const auto& agg : result.aggregates) {
            os << prefix << agg.estimator << ',' << agg.reps << ',' << fmt12(agg.mean_excess) << ','
               << fmt12(agg.sd_excess) << ',' << agg.failed << ',' << fmt12(result.nominal_pi1) << '\n';
        }
    }
    return os.str();
}

void write_results(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << format_results(result);
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

ExperimentResult read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    ExperimentResult result;
    std::string line;
    if (!std::getline(in, line) || line != kDataHeader) {
        throw ParseError("'" + path + "' does not start with the results header");
    }
    bool in_aggregates = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line == kAggHeader) {
            in_aggregates = true;
            continue;
        }
        const auto cells = split_csv(line);
        try {
            if (!in_aggregates) {
                if (cells.size() != 8) throw ParseError("expected 8 fields");
                result.scenario = cells[0];
                result.m = std::stoull(cells[1]);
                result.sparsity = cells[2];
                RepRow row;
                row.estimator = cells[3];
                row.rep = std::stoull(cells[4]);
                row.estimate = parse_double(cells[5]);
                row.truth = parse_double(cells[6]);
                row.excess = parse_double(cells[7]);
                row.failed = std::isnan(row.estimate);
                result.rows.push_back(row);
            } else {
                if (cells.size() != 9) throw ParseError("expected 9 fields");
                Aggregate agg;
                agg.estimator = cells[3];
                agg.reps = std::stoull(cells[4]);
                agg.mean_excess = parse_double(cells[5]);
                agg.sd_excess = parse_double(cells[6]);
                agg.failed = std::stoull(cells[7]);
                agg.single_row = agg.reps - agg.failed == 1;
                result.nominal_pi1 = parse_double(cells[8]);
                result.aggregates.push_back(agg);
            }
        } catch (const std::exception& e) {
            throw ParseError("'" + path + "' line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return result;
}

}  // namespace propest
