#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbsde/problems.hpp"
#include "fbsde/real.hpp"
#include "fbsde/scheme.hpp"

namespace fbsde {

enum class RowStatus { Ok, Diverged, NonConvergence };

std::string_view to_string(RowStatus status);

/// One solver run of a sweep. Errors are |numeric - exact| at (t0, x0) and
/// NaN when the run did not finish.
struct SweepRow {
  int n_steps = 0;
  RowStatus status = RowStatus::Ok;
  std::string message;  // failure description for non-Ok rows
  Real err_y = 0;
  Real err_z = 0;
  Real err_gamma = 0;
  Real err_a = 0;
  std::optional<Real> err_control;  // |alpha^0 - alpha*| for control problems
  IterationStats stats;
  std::size_t grid_points = 0;
  Real spacing = 0;
  double seconds = 0;
};

/// Fitted convergence rates; unset when fewer than two usable errors.
struct Rates {
  std::optional<Real> y;
  std::optional<Real> z;
  std::optional<Real> gamma;
  std::optional<Real> a;
  std::optional<Real> control;
};

struct RunReport {
  std::string problem;
  int k = 1;
  Real t0 = 0;
  Real x0 = 0;
  bool has_control = false;
  std::vector<SweepRow> rows;  // ascending N
  Rates rates;
  double seconds = 0;  // whole sweep

  bool all_ok() const;
};

/// Truncation box for the space grid.
struct Box {
  Real lo = -20;
  Real hi = 20;
};

/// One run per N (strictly ascending, each >= k+1), grid rebuilt per run
/// with h = dt^((k+1)/(r+1)) around problem.x0. Diverged and NonConvergence
/// are recorded in the row; any other error propagates.
RunReport sweep(const ProblemSpec& problem, const SolverConfig& cfg, std::span<const int> ns,
                const Box& box = {});

/// Negated least-squares slope of ln(err) against ln(N). Unset when there
/// are fewer than two points or any error is zero or non-finite.
std::optional<Real> fit_rate(std::span<const Real> errors, std::span<const int> ns);

enum class ReportFormat { Csv, Markdown };

/// CSV: header "k,N,errY,errZ,errGamma,errA,seconds", one row per N.
std::string render_csv(const RunReport& report);

/// Table with one row per N, a CR footer row and the sweep time.
std::string render_markdown(const RunReport& report);

std::string render(const RunReport& report, ReportFormat format);

/// Throws Io naming the path when the file cannot be written.
void write_report(const RunReport& report, const std::string& path, ReportFormat format);

}  // namespace fbsde
