#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fbsde/bench.hpp"
#include "fbsde/problems.hpp"
#include "fbsde/real.hpp"
#include "fbsde/scheme.hpp"

namespace fbsde {

/// Everything a command-line run needs. Unset optionals take the defaults
/// documented on the effective_* accessors and on the problem.
struct CliConfig {
  std::string problem = "ex1";
  int k = 1;
  int ng = 10;
  std::optional<int> ni;  // default max(5, k+2)
  std::optional<int> r;   // default ni
  Real lo = -20;
  Real hi = 20;
  std::optional<Real> t0;
  std::optional<Real> x0;
  std::optional<Real> horizon;
  std::vector<int> ns{32, 64, 128, 256, 512};
  YSolver y_solver = YSolver::Picard;
  std::optional<Real> epsilon0;
  int max_iters = 200;
  BoundaryPolicy boundary = BoundaryPolicy::Extrapolate;
  std::optional<std::string> output;
  ReportFormat format = ReportFormat::Markdown;
  bool strict = false;
  ProblemParams params;

  std::vector<std::string> warnings;  // not compared

  int effective_ni() const;
  int effective_r() const;
  Real effective_epsilon0() const;

  bool operator==(const CliConfig& other) const;
};

/// Parses flags (program name excluded). Both "-name" and "--name" spellings
/// are accepted. "--config FILE" is applied first; the other flags override
/// it. Throws Usage naming the offending flag, Io if the config file cannot
/// be read.
CliConfig parse_args(std::span<const std::string> args);

/// "key = value" lines with the flag names as keys; '#' starts a comment.
CliConfig parse_config_text(std::string_view text);

/// Config-file text that parse_config_text maps back to an equal config.
std::string serialize(const CliConfig& cfg);

/// Throws Usage when a field is out of range or the problem is unknown.
void validate(const CliConfig& cfg);

SolverConfig solver_config(const CliConfig& cfg);
ProblemSpec problem_for(const CliConfig& cfg);

std::string usage();

/// Runs the sweep, prints the table to out and writes --out if given.
/// Returns 0, or 1 when --strict is set and some row failed. Errors propagate.
int run_main(const CliConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run_main with errors mapped to exit codes:
/// 2 usage or invalid argument, 3 I/O, 4 anything else.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace fbsde
