#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tvfbe/analysis.hpp"
#include "tvfbe/benchmark.hpp"

namespace tvfbe::cli {

// Config/argument rejection carrying every problem found, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& problems);
    std::vector<std::string> problems_;
};

// Read and validate the experiment config (JSON). Missing fields, type
// mismatches and constraint violations are all collected into one
// ConfigError naming each field and its constraint. A file containing only
// whitespace is treated as an empty object, so it reports every required
// field as missing.
ExperimentConfig parse_config(const std::string& path);

struct Overrides {
    std::optional<int> P, C;
    std::optional<double> Ts, alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> solver;
};

// Command-line overrides win over file values; constraint checks re-run.
void apply_overrides(ExperimentConfig& cfg, const Overrides& ov);

// Map a solver name (qn-ls | qn | grad) onto the two phase solvers: the
// prediction model is strongly convex, so prediction keeps plain quasi-Newton
// unless the gradient variant was requested, in which case both phases use
// it. The inverse mapping reconstructs the name for echoing.
void select_solver(PCConfig& pc, const std::string& name);
std::string solver_name(const PCConfig& pc);

// Canonical double formatting for all text output (%.17g: value-preserving,
// hence byte-identical reruns).
std::string format_double(double v);

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRecord>& records);
std::string format_summary(const ExperimentReport& rep, const ExperimentConfig& cfg);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Run one experiment into out_dir: config_effective.json, trajectory.csv,
// summary.txt. Returns 0, or 1 when the run aborted (partial CSV is kept).
int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir);

struct SweepAxis {
    std::string name;                 // P | Ts | solver
    std::vector<std::string> values;  // as given on the command line
};

// Parse "P=0,1,3,5,10" style axis specs; empty value lists are rejected.
SweepAxis parse_axis(const std::string& spec);

// One run per axis value, each into its own subdirectory, plus
// sweep_summary.csv. Cells run in parallel; a failing cell is recorded in the
// summary and does not stop the others. Returns 0, or 1 if any cell failed.
int cmd_sweep(const ExperimentConfig& cfg, const SweepAxis& axis, const std::string& out_dir);

struct BoundsArgs {
    double m = 0.0, L = 0.0, gamma = 0.0;
    double C0 = 0.0, C1 = 0.0, C2 = 0.0, C3 = 0.0;
    int P = 0, C = 1;
    double tau = 0.0, Ts = 0.0;
    std::string out_dir = ".";
};

// Print the full constants report as aligned key-value text and write
// bounds.json. Precondition violations surface as exceptions for the caller
// to turn into exit code 2.
int cmd_bounds(const BoundsArgs& args, std::ostream& out);

// Full argument parsing and dispatch. Exit codes: 0 success, 1 runtime
// failure (solver abort, failed sweep cell), 2 invalid input.
int run_cli(int argc, const char* const* argv);

}  // namespace tvfbe::cli
