#pragma once

// Subcommands behind the `cch` executable. Each returns a process exit code
// and throws cch::Error for failures that map to an error category.

#include "cch/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cch {

struct CommandOptions {
    std::string config_path;
    std::string checkpoint_path;
    std::string csv_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::pair<double, double>> window;
    std::optional<int> level;
    std::optional<std::vector<double>> s;
    std::optional<std::vector<double>> p;
    std::optional<std::string> column;
    std::optional<int> dim;
    std::optional<double> amplitude;
    std::optional<double> width;
};

/// Applies --seed, --out-dir, --level (diag.N), --s and --p to a loaded config.
void apply_overrides(ExperimentConfig& cfg, const CommandOptions& opts);

int cmd_run(const CommandOptions& opts, std::ostream& out);
int cmd_resume(const CommandOptions& opts, std::ostream& out);
int cmd_fit(const CommandOptions& opts, std::ostream& out);
int cmd_check_inequalities(const CommandOptions& opts, std::ostream& out);
int cmd_oracle(const CommandOptions& opts, std::ostream& out);
int cmd_local_solve(const CommandOptions& opts, std::ostream& out);

struct InequalityCheck {
    std::string name;
    bool pass = false;
    /// Worst observed quantity for the check (relative gap, ratio change, ...).
    double value = 0.0;
    std::string detail;
};

/// Interpolation gap over `fields` seeded mean-zero random fields for
/// (l,k,s) in {(0,1,1/2), (1,1,1/2), (0,2,1/2)}, plus finiteness, amplitude
/// invariance and grid-doubling stability of the Gagliardo-Nirenberg and
/// Hardy-Littlewood-Sobolev ratios on Gaussian data.
std::vector<InequalityCheck> run_inequality_suite(std::uint64_t seed, int fields);

} // namespace cch
