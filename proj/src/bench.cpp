#include "fbsde/bench.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fbsde/error.hpp"
#include "fbsde/grid.hpp"

namespace fbsde {

std::string_view to_string(RowStatus status) {
  switch (status) {
    case RowStatus::Ok: return "ok";
    case RowStatus::Diverged: return "diverged";
    case RowStatus::NonConvergence: return "no convergence";
  }
  return "unknown";
}

bool RunReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const SweepRow& r) { return r.status == RowStatus::Ok; });
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

SweepRow run_one(const ProblemSpec& problem, const SolverConfig& cfg, int n_steps,
                 const Box& box) {
  const auto start = Clock::now();
  SweepRow row;
  row.n_steps = n_steps;
  const TimeGrid tgrid{problem.t0, problem.horizon, n_steps};
  const SpaceGrid grid = build_grid(problem.x0, tgrid.dt(), cfg.k, cfg.r, box.lo, box.hi);
  row.grid_points = grid.size();
  row.spacing = grid.spacing();
  try {
    const RunResult run = run_backward(problem, cfg, grid, tgrid);
    const auto& ex = *problem.exact;
    const Real t = problem.t0, x = problem.x0;
    row.err_y = std::fabs(run.at_x0.y - ex.y(t, x));
    row.err_z = std::fabs(run.at_x0.z - ex.z(t, x));
    row.err_gamma = std::fabs(run.at_x0.gamma - ex.gamma(t, x));
    row.err_a = std::fabs(run.at_x0.a - ex.a(t, x));
    if (problem.feedback)
      row.err_control =
          std::fabs(problem.feedback->recover(run.at_x0.z) - problem.feedback->exact(t, x));
    row.stats = run.stats;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Diverged && e.code() != ErrorCode::NonConvergence) throw;
    const Real nan = std::numeric_limits<Real>::quiet_NaN();
    row.status = e.code() == ErrorCode::Diverged ? RowStatus::Diverged : RowStatus::NonConvergence;
    row.message = e.what();
    row.err_y = row.err_z = row.err_gamma = row.err_a = nan;
    if (problem.feedback) row.err_control = nan;
  }
  row.seconds = elapsed(start);
  return row;
}

template <class Get>
std::optional<Real> column_rate(const RunReport& report, Get get) {
  std::vector<Real> errs;
  std::vector<int> ns;
  for (const auto& row : report.rows) {
    errs.push_back(get(row));
    ns.push_back(row.n_steps);
  }
  return fit_rate(errs, ns);
}

// Locale-independent scientific notation with `digits` after the point.
std::string sci(Real v, int digits, bool upper) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, digits);
  std::string s(buf, res.ptr);
  if (upper)
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::string fixed(double v, int digits) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string rate_cell(const std::optional<Real>& r) {
  return r ? fixed(static_cast<double>(*r), 2) : "NaN";
}

}  // namespace

std::optional<Real> fit_rate(std::span<const Real> errors, std::span<const int> ns) {
  require(errors.size() == ns.size(), "fit_rate needs one error per N");
  if (errors.size() < 2) return std::nullopt;
  Real sx = 0, sy = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!is_finite(errors[i]) || !(errors[i] > 0) || ns[i] <= 0) return std::nullopt;
    sx += std::log(static_cast<Real>(ns[i]));
    sy += std::log(errors[i]);
  }
  const Real m = static_cast<Real>(errors.size());
  const Real mx = sx / m, my = sy / m;
  Real sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const Real dx = std::log(static_cast<Real>(ns[i])) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (!(sxx > 0)) return std::nullopt;  // all N equal
  return -sxy / sxx;
}

RunReport sweep(const ProblemSpec& problem, const SolverConfig& cfg, std::span<const int> ns,
                const Box& box) {
  validate(cfg, problem);
  if (!problem.exact)
    fail(ErrorCode::MissingExact, "problem '" + problem.name + "' has no exact solution to measure against");
  require(!ns.empty(), "sweep needs at least one N");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    require(ns[i] >= cfg.k + 1,
            "each N must be at least k+1, got " + std::to_string(ns[i]));
    require(i == 0 || ns[i] > ns[i - 1], "N values must be strictly ascending");
  }

  const auto start = Clock::now();
  RunReport report;
  report.problem = problem.name;
  report.k = cfg.k;
  report.t0 = problem.t0;
  report.x0 = problem.x0;
  report.has_control = static_cast<bool>(problem.feedback);
  for (int n : ns) report.rows.push_back(run_one(problem, cfg, n, box));

  report.rates.y = column_rate(report, [](const SweepRow& r) { return r.err_y; });
  report.rates.z = column_rate(report, [](const SweepRow& r) { return r.err_z; });
  report.rates.gamma = column_rate(report, [](const SweepRow& r) { return r.err_gamma; });
  report.rates.a = column_rate(report, [](const SweepRow& r) { return r.err_a; });
  if (report.has_control)
    report.rates.control = column_rate(report, [](const SweepRow& r) { return *r.err_control; });
  report.seconds = elapsed(start);
  return report;
}

std::string render_csv(const RunReport& report) {
  std::string out = "k,N,errY,errZ,errGamma,errA,seconds\n";
  for (const auto& row : report.rows) {
    out += std::to_string(report.k) + ',' + std::to_string(row.n_steps) + ',' +
           sci(row.err_y, 6, false) + ',' + sci(row.err_z, 6, false) + ',' +
           sci(row.err_gamma, 6, false) + ',' + sci(row.err_a, 6, false) + ',' +
           fixed(row.seconds, 3) + '\n';
  }
  return out;
}

std::string render_markdown(const RunReport& report) {
  std::ostringstream os;
  os << "| STEP | N | \\|Y^0-Y_0\\| | \\|Z^0-Z_0\\| | \\|Gamma^0-Gamma_0\\| | \\|A^0-A_0\\| |";
  if (report.has_control) os << " \\|alpha^0-alpha*\\| |";
  os << " T_rn |\n|---|---:|---:|---:|---:|---:|";
  if (report.has_control) os << "---:|";
  os << "---:|\n";
  bool first = true;
  for (const auto& row : report.rows) {
    os << "| " << (first ? "K=" + std::to_string(report.k) : std::string()) << " | "
       << row.n_steps << " | " << sci(row.err_y, 3, true) << " | " << sci(row.err_z, 3, true)
       << " | " << sci(row.err_gamma, 3, true) << " | " << sci(row.err_a, 3, true) << " |";
    if (report.has_control) os << ' ' << sci(row.err_control.value_or(0), 3, true) << " |";
    os << ' ' << (row.status == RowStatus::Ok ? std::string() : std::string(to_string(row.status)))
       << " |\n";
    first = false;
  }
  os << "| CR |  | " << rate_cell(report.rates.y) << " | " << rate_cell(report.rates.z) << " | "
     << rate_cell(report.rates.gamma) << " | " << rate_cell(report.rates.a) << " |";
  if (report.has_control) os << ' ' << rate_cell(report.rates.control) << " |";
  os << ' ' << fixed(report.seconds, 2) << "s |\n";
  return os.str();
}

std::string render(const RunReport& report, ReportFormat format) {
  return format == ReportFormat::Csv ? render_csv(report) : render_markdown(report);
}

void write_report(const RunReport& report, const std::string& path, ReportFormat format) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  file << render(report, format);
  file.flush();
  if (!file) fail(ErrorCode::Io, "failed writing '" + path + "'");
}

}  // namespace fbsde
