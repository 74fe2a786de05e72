#include "propest/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "propest/diagnostics.hpp"
#include "propest/errors.hpp"
#include "propest/estimators.hpp"
#include "propest/families.hpp"
#include "propest/kernels.hpp"
#include "propest/simlab.hpp"

namespace propest {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

FamilyModel family_of(const CliConfig& cfg) {
    const double fallback = cfg.family == "gamma" ? 4.0 : 1.0;
    return FamilyModel::parse(cfg.family, cfg.sigma.value_or(fallback));
}

EstimatorConfig estimator_of(const CliConfig& cfg) {
    EstimatorConfig est;
    est.omega = WeightFunction::by_name(cfg.omega);
    est.quadrature.partition_norm = cfg.h;
    est.series.truncation = cfg.series_n;
    est.schedule.gamma = cfg.gamma;
    est.schedule.protocol_sqrt = !cfg.linear_schedule;
    est.t_override = cfg.t;
    est.lambda = cfg.lambda;
    est.threads = cfg.threads;
    est.validate();
    return est;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        cell = cell.substr(first, cell.find_last_not_of(" \t") - first + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != cell.size() || !std::isfinite(v)) throw ParseError("bad grid value '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

void print_bounds(std::ostream& out, const std::optional<BoundReport>& var,
                  const std::optional<ConcentrationReport>& conc) {
    if (var) {
        out << "variance_branch=" << var->branch << '\n';
        if (var->value) out << "variance_bound=" << num(*var->value) << '\n';
        out << "variance_trend=" << num(var->trend) << '\n';
    }
    if (conc) {
        out << "concentration_branch=" << conc->branch << '\n';
        if (conc->halfwidth) out << "halfwidth=" << num(*conc->halfwidth) << '\n';
        if (conc->prob_floor) out << "prob_floor=" << num(*conc->prob_floor) << '\n';
    }
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const IoError*>(&e)) return kExitInput;
    if (dynamic_cast<const RangeError*>(&e)) return kExitRange;
    if (dynamic_cast<const Error*>(&e)) return kExitUnsupported;
    return kExitInput;
}

std::vector<double> read_data_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open data file '" + path + "'");
    std::vector<double> data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string cell = line.substr(first, last - first + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != cell.size() || !std::isfinite(v)) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": not a finite decimal: '" + cell + "'");
        }
        data.push_back(v);
    }
    return data;
}

std::string format_config(const CliConfig& cfg) {
    std::ostringstream os;
    const FamilyModel fam = family_of(cfg);
    os << "# subcommand " << cfg.subcommand << '\n';
    os << "family = " << cfg.family << '\n';
    os << "sigma = " << num(fam.sigma()) << '\n';
    os << "null = \"" << cfg.null << "\"\n";
    os << "omega = " << cfg.omega << '\n';
    if (cfg.gamma) {
        os << "gamma = " << num(*cfg.gamma) << '\n';
    } else {
        os << "# gamma = schedule default (0.495 location, 1 Gamma)\n";
    }
    os << "h = " << num(cfg.h) << '\n';
    os << "series-n = " << cfg.series_n << '\n';
    os << "linear-schedule = " << (cfg.linear_schedule ? "true" : "false") << '\n';
    if (cfg.t) os << "t = " << num(*cfg.t) << '\n';
    os << "lambda = " << num(cfg.lambda) << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "reps = " << cfg.reps << '\n';
    os << "scenario = " << cfg.scenario << '\n';
    os << "m = " << cfg.m << '\n';
    os << "sparsity = " << cfg.sparsity << '\n';
    os << "threads = " << cfg.threads << '\n';
    if (!cfg.in.empty()) os << "in = \"" << cfg.in << "\"\n";
    if (!cfg.out.empty()) os << "out = \"" << cfg.out << "\"\n";
    if (!cfg.grid.empty()) os << "grid = \"" << cfg.grid << "\"\n";
    return os.str();
}

int cmd_estimate(const CliConfig& cfg, std::ostream& out) {
    if (cfg.in.empty()) throw ParseError("estimate needs --in <data file>");
    const FamilyModel family = family_of(cfg);
    const NullSpec null = NullSpec::parse(cfg.null);
    const EstimatorConfig est = estimator_of(cfg);
    // Compose first so unsupported pairs fail before the data is read.
    compose_full_kernel(null, family, est.omega, est.series, est.quadrature);
    const std::vector<double> data = read_data_file(cfg.in);
    const EstimateReport rep = estimate_pi1(data, family, null, est);
    out << "estimate=" << num(rep.estimate) << '\n';
    if (rep.null_estimate) out << "null_estimate=" << num(*rep.null_estimate) << '\n';
    out << "t_used=" << num(rep.t_used) << '\n';
    out << "m=" << rep.m << '\n';
    out << "kernel=" << rep.kernel << '\n';
    print_bounds(out, rep.variance, rep.concentration);
    for (const auto& note : rep.notes) out << "note=" << note << '\n';
    return kExitOk;
}

int cmd_simulate(const CliConfig& cfg, std::ostream& out) {
    ScenarioSpec spec;
    spec.id = parse_scenario(cfg.scenario);
    spec.m = cfg.m;
    spec.sparsity = parse_sparsity(cfg.sparsity);
    spec.seed = cfg.seed;
    spec.reps = cfg.reps;
    spec.sigma = cfg.sigma;
    spec.estimator = estimator_of(cfg);
    spec.estimator.threads = 1;
    spec.threads = cfg.threads;
    const ExperimentResult result = run_experiment(spec);

    namespace fs = std::filesystem;
    fs::path path = cfg.out.empty() ? fs::path(result_filename(spec)) : fs::path(cfg.out);
    if (fs::is_directory(path) || (!cfg.out.empty() && (cfg.out.back() == '/' || cfg.out.back() == '\\'))) {
        path /= result_filename(spec);
    }
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    write_results(result, path.string());
    for (const auto& agg : result.aggregates) {
        out << "estimator=" << agg.estimator << " reps=" << agg.reps << " mean_excess=" << num(agg.mean_excess)
            << " sd_excess=" << num(agg.sd_excess) << " failed=" << agg.failed << '\n';
    }
    out << "csv=" << path.string() << '\n';
    return kExitOk;
}

int cmd_oracle(const CliConfig& cfg, std::ostream& out) {
    const FamilyModel family = family_of(cfg);
    const NullSpec null = NullSpec::parse(cfg.null);
    const EstimatorConfig est = estimator_of(cfg);
    const ComposedKernel pair = compose_full_kernel(null, family, est.omega, est.series, est.quadrature);
    std::vector<double> grid = parse_grid(cfg.grid);
    if (!cfg.in.empty()) {
        const auto more = read_data_file(cfg.in);
        grid.insert(grid.end(), more.begin(), more.end());
    }
    const double t = resolve_t(est, cfg.m, family, null);
    out << "# t=" << num(t) << '\n';
    out << "param,psi,one_minus_psi\n";
    for (double p : grid) {
        const double psi = pair.psi(t, p) + 0.0;
        out << num(p) << ',' << num(psi) << ',' << num(1.0 - psi) << '\n';
    }
    return kExitOk;
}

int cmd_diagnose(const CliConfig& cfg, std::ostream& out) {
    const FamilyModel family = family_of(cfg);
    const NullSpec null = NullSpec::parse(cfg.null);
    const EstimatorConfig est = estimator_of(cfg);
    std::size_t m = cfg.m;
    BoundExtras extras;
    if (!cfg.in.empty()) {
        const auto data = read_data_file(cfg.in);
        if (data.empty()) throw ParseError("data file '" + cfg.in + "' is empty");
        m = data.size();
        if (family.is_location_shift() && null.is_one_sided()) {
            const double b = std::get<NullSpec::OneSided>(null.value).b;
            double s = 0.0;
            for (double z : data) s += (z - b) * (z - b);
            extras.d_m = s / static_cast<double>(m);
        }
    }
    const double t = resolve_t(est, m, family, null);
    out << "t_used=" << num(t) << '\n';
    out << "m=" << m << '\n';
    if (family.is_location_shift()) out << "g_factor=" << num(g_factor(family, t, est.quadrature)) << '\n';
    try {
        const BoundReport var = variance_bound(family, null, t, m, est.omega, extras, est.quadrature);
        const ConcentrationReport conc =
            concentration_halfwidth(family, null, t, m, est.lambda, est.omega, extras, est.quadrature);
        print_bounds(out, var, conc);
    } catch (const UnsupportedOperation& e) {
        out << "note=" << e.what() << '\n';
    } catch (const ConfigError& e) {
        out << "note=" << e.what() << '\n';
    }
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    CLI::App app{"Estimate the proportion of alternatives under composite nulls", "propest"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_config("--config", "", "Flat 'key = value' file; flags override it");
    app.require_subcommand(1);
    app.add_option("--family", cfg.family, "gaussian|laplace|logistic|cauchy|hsecant|gamma")
        ->capture_default_str();
    app.add_option("--sigma", cfg.sigma, "Scale, or shape for gamma");
    app.add_option("--null", cfg.null, "point:mu0 | bounded:a,b | onesided:b")
        ->capture_default_str()
        ->join(',');
    app.add_option("--omega", cfg.omega, "triangular|uniform")->capture_default_str();
    app.add_option("--gamma", cfg.gamma, "Schedule constant");
    app.add_option("--h", cfg.h, "Partition norm")->capture_default_str();
    app.add_option("--series-n", cfg.series_n, "Gamma series truncation")->capture_default_str();
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--reps", cfg.reps)->capture_default_str();
    app.add_option("--scenario", cfg.scenario, "S1..S5")->capture_default_str();
    app.add_option("--m", cfg.m, "Number of hypotheses (simulate, oracle, diagnose)")->capture_default_str();
    app.add_option("--sparsity", cfg.sparsity, "dense|moderate")->capture_default_str();
    app.add_option("--in", cfg.in, "Data file, one decimal per line");
    app.add_option("--out", cfg.out, "Output CSV path or directory");
    app.add_option("--t", cfg.t, "Fixed t instead of the schedule");
    app.add_option("--lambda", cfg.lambda, "Concentration lambda")->capture_default_str();
    app.add_option("--grid", cfg.grid, "Comma-separated parameter grid (oracle)")->join(',');
    app.add_option("--threads", cfg.threads, "Worker threads, 0 = all")->capture_default_str();
    app.add_flag("--linear-schedule", cfg.linear_schedule, "Gamma schedule without the square root");
    app.add_flag("--print-config", cfg.print_config, "Echo the resolved configuration");
    const std::pair<const char*, const char*> subcommands[] = {
        {"estimate", "Estimate the alternative proportion from --in"},
        {"simulate", "Run a scenario and write the results CSV"},
        {"oracle", "Tabulate psi over a parameter grid"},
        {"diagnose", "Print the schedule and closed-form bounds"},
    };
    for (const auto& [name, about] : subcommands) {
        app.add_subcommand(name, about)->fallthrough()->set_help_flag("--help", "Print this help message and exit");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInput;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();

    try {
        if (cfg.print_config) out << format_config(cfg);
        if (cfg.subcommand == "estimate") return cmd_estimate(cfg, out);
        if (cfg.subcommand == "simulate") return cmd_simulate(cfg, out);
        if (cfg.subcommand == "oracle") return cmd_oracle(cfg, out);
        return cmd_diagnose(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace propest
