#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace propest {

enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 2,
    kExitUnsupported = 3,
    kExitRange = 4,
};

/// Fully resolved command-line configuration. Defaults are the simulation
/// protocol values.
struct CliConfig {
    std::string subcommand;
    std::string family = "gaussian";
    /// Scale or Gamma shape; empty means the family default (1, or 4 for the
    /// Gamma scenarios).
    std::optional<double> sigma;
    std::string null = "bounded:-1,2";
    std::string omega = "triangular";
    std::optional<double> gamma;
    double h = 0.01;
    int series_n = 25;
    std::uint64_t seed = 1;
    std::size_t reps = 50;
    std::string scenario = "S1";
    std::size_t m = 1000;
    std::string sparsity = "dense";
    std::string in;
    std::string out;
    std::optional<double> t;
    double lambda = 3.0;
    std::string grid;
    unsigned threads = 1;
    bool linear_schedule = false;
    bool print_config = false;
    std::string config_file;
};

/// Maps a library exception onto the exit-code contract.
int exit_code_for(const std::exception& e);

/// Reads "one decimal per line"; blank lines and '#' comments are skipped.
std::vector<double> read_data_file(const std::string& path);

/// Resolved configuration as "key = value" lines, readable by --config.
std::string format_config(const CliConfig& cfg);

int cmd_estimate(const CliConfig& cfg, std::ostream& out);
int cmd_simulate(const CliConfig& cfg, std::ostream& out);
int cmd_oracle(const CliConfig& cfg, std::ostream& out);
int cmd_diagnose(const CliConfig& cfg, std::ostream& out);

/// Parses argv, dispatches and returns the process exit code. Errors are
/// reported on err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace propest
