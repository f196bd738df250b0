#include "fbsde/fbsde.h"

#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "fbsde/bench.hpp"
#include "fbsde/cli.hpp"
#include "fbsde/coeffs.hpp"
#include "fbsde/error.hpp"
#include "fbsde/quadrature.hpp"

struct fbsde_config {
  fbsde::CliConfig cfg;
};

struct fbsde_report {
  fbsde::RunReport report;
};

namespace {

thread_local std::string g_last_error;

fbsde_status to_status(fbsde::ErrorCode code) {
  using fbsde::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return FBSDE_ERR_INVALID_ARGUMENT;
    case ErrorCode::OutOfDomain: return FBSDE_ERR_OUT_OF_DOMAIN;
    case ErrorCode::Diverged: return FBSDE_ERR_DIVERGED;
    case ErrorCode::NonConvergence: return FBSDE_ERR_NON_CONVERGENCE;
    case ErrorCode::SingularDenominator: return FBSDE_ERR_SINGULAR;
    case ErrorCode::MissingExact: return FBSDE_ERR_MISSING_EXACT;
    case ErrorCode::Io: return FBSDE_ERR_IO;
    case ErrorCode::Usage: return FBSDE_ERR_USAGE;
  }
  return FBSDE_ERR_INTERNAL;
}

fbsde_status set_error(fbsde_status status, std::string msg) {
  g_last_error = std::move(msg);
  return status;
}

// Runs body, translating exceptions into status codes.
template <class Body>
fbsde_status guarded(Body&& body) {
  try {
    body();
    g_last_error.clear();
    return FBSDE_OK;
  } catch (const fbsde::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(FBSDE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(FBSDE_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(FBSDE_ERR_INTERNAL, "unknown failure");
  }
}

fbsde_status null_arg(const char* what) {
  return set_error(FBSDE_ERR_INVALID_ARGUMENT, std::string(what) + " must not be NULL");
}

fbsde_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (!buf) return FBSDE_OK;
  if (cap < text.size() + 1)
    return set_error(FBSDE_ERR_INVALID_ARGUMENT, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return FBSDE_OK;
}

double to_c(fbsde::Real v) { return static_cast<double>(v); }

double rate_or_nan(const std::optional<fbsde::Real>& r) {
  return r ? to_c(*r) : std::numeric_limits<double>::quiet_NaN();
}

fbsde::ReportFormat to_format(fbsde_format f) {
  return f == FBSDE_FORMAT_CSV ? fbsde::ReportFormat::Csv : fbsde::ReportFormat::Markdown;
}

std::vector<std::string> to_args(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 0; i < argc; ++i) args.emplace_back(argv[i] ? argv[i] : "");
  return args;
}

}  // namespace

extern "C" {

const char* fbsde_last_error(void) { return g_last_error.c_str(); }

const char* fbsde_status_string(fbsde_status status) {
  switch (status) {
    case FBSDE_OK: return "ok";
    case FBSDE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FBSDE_ERR_OUT_OF_DOMAIN: return "out of domain";
    case FBSDE_ERR_DIVERGED: return "diverged";
    case FBSDE_ERR_NON_CONVERGENCE: return "no convergence";
    case FBSDE_ERR_SINGULAR: return "singular denominator";
    case FBSDE_ERR_MISSING_EXACT: return "missing exact solution";
    case FBSDE_ERR_IO: return "i/o error";
    case FBSDE_ERR_USAGE: return "usage error";
    case FBSDE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int fbsde_precision_bits(void) { return std::numeric_limits<fbsde::Real>::digits; }

fbsde_status fbsde_coefficients(int k, double* out, size_t len) {
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto c = fbsde::compute_coefficients(k);
    fbsde::require(len >= c.scaled().size(), "output needs k+1 slots");
    for (std::size_t i = 0; i < c.scaled().size(); ++i) out[i] = to_c(c.scaled()[i]);
  });
}

fbsde_status fbsde_gauss_hermite(int ng, double* nodes, double* weights, size_t len) {
  if (!nodes || !weights) return null_arg("nodes and weights");
  return guarded([&] {
    const auto rule = fbsde::gauss_hermite(ng);
    fbsde::require(len >= rule.nodes.size(), "output needs ng slots");
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      nodes[i] = to_c(rule.nodes[i]);
      weights[i] = to_c(rule.weights[i]);
    }
  });
}

fbsde_status fbsde_config_parse(int argc, const char* const* argv, fbsde_config** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (argc < 0 || (argc > 0 && !argv)) return null_arg("argv");
  return guarded([&] {
    const auto args = to_args(argc, argv);
    *out = new fbsde_config{fbsde::parse_args(args)};
  });
}

fbsde_status fbsde_config_from_text(const char* text, fbsde_config** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!text) return null_arg("text");
  return guarded([&] {
    auto cfg = fbsde::parse_config_text(text);
    fbsde::validate(cfg);
    *out = new fbsde_config{std::move(cfg)};
  });
}

void fbsde_config_free(fbsde_config* cfg) { delete cfg; }

size_t fbsde_config_warning_count(const fbsde_config* cfg) {
  return cfg ? cfg->cfg.warnings.size() : 0;
}

const char* fbsde_config_warning(const fbsde_config* cfg, size_t i) {
  if (!cfg || i >= cfg->cfg.warnings.size()) return nullptr;
  return cfg->cfg.warnings[i].c_str();
}

int fbsde_config_equal(const fbsde_config* a, const fbsde_config* b) {
  return a && b && a->cfg == b->cfg;
}

fbsde_status fbsde_config_serialize(const fbsde_config* cfg, char* buf, size_t cap,
                                    size_t* needed) {
  if (!cfg) return null_arg("cfg");
  fbsde_status status = FBSDE_OK;
  const fbsde_status guard = guarded([&] { status = copy_out(fbsde::serialize(cfg->cfg), buf, cap, needed); });
  return guard != FBSDE_OK ? guard : status;
}

fbsde_status fbsde_solve(const fbsde_config* cfg, int n_steps, fbsde_values* numeric,
                         fbsde_values* exact) {
  if (!cfg) return null_arg("cfg");
  if (!numeric) return null_arg("numeric");
  return guarded([&] {
    const auto problem = fbsde::problem_for(cfg->cfg);
    const auto scfg = fbsde::solver_config(cfg->cfg);
    fbsde::require(n_steps >= scfg.k + 1, "n_steps must be at least k+1");
    const fbsde::TimeGrid tgrid{problem.t0, problem.horizon, n_steps};
    const auto grid =
        fbsde::build_grid(problem.x0, tgrid.dt(), scfg.k, scfg.r, cfg->cfg.lo, cfg->cfg.hi);
    const auto run = fbsde::run_backward(problem, scfg, grid, tgrid);
    *numeric = {to_c(run.at_x0.y), to_c(run.at_x0.z), to_c(run.at_x0.gamma), to_c(run.at_x0.a)};
    if (exact) {
      if (!problem.exact)
        fbsde::fail(fbsde::ErrorCode::MissingExact, "problem has no exact solution");
      const auto& ex = *problem.exact;
      const auto t = problem.t0, x = problem.x0;
      *exact = {to_c(ex.y(t, x)), to_c(ex.z(t, x)), to_c(ex.gamma(t, x)), to_c(ex.a(t, x))};
    }
  });
}

fbsde_status fbsde_sweep(const fbsde_config* cfg, fbsde_report** out) {
  if (!cfg) return null_arg("cfg");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    fbsde::validate(cfg->cfg);
    const auto problem = fbsde::problem_for(cfg->cfg);
    auto report = fbsde::sweep(problem, fbsde::solver_config(cfg->cfg), cfg->cfg.ns,
                               fbsde::Box{cfg->cfg.lo, cfg->cfg.hi});
    *out = new fbsde_report{std::move(report)};
  });
}

void fbsde_report_free(fbsde_report* report) { delete report; }

size_t fbsde_report_row_count(const fbsde_report* report) {
  return report ? report->report.rows.size() : 0;
}

fbsde_status fbsde_report_row(const fbsde_report* report, size_t i, fbsde_row* out) {
  if (!report) return null_arg("report");
  if (!out) return null_arg("out");
  if (i >= report->report.rows.size())
    return set_error(FBSDE_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = report->report.rows[i];
  out->k = report->report.k;
  out->n_steps = r.n_steps;
  out->status = r.status == fbsde::RowStatus::Ok         ? FBSDE_ROW_OK
                : r.status == fbsde::RowStatus::Diverged ? FBSDE_ROW_DIVERGED
                                                         : FBSDE_ROW_NON_CONVERGENCE;
  out->err_y = to_c(r.err_y);
  out->err_z = to_c(r.err_z);
  out->err_gamma = to_c(r.err_gamma);
  out->err_a = to_c(r.err_a);
  out->has_control = r.err_control.has_value();
  out->err_control = r.err_control ? to_c(*r.err_control) : 0.0;
  out->grid_points = r.grid_points;
  out->seconds = r.seconds;
  g_last_error.clear();
  return FBSDE_OK;
}

fbsde_status fbsde_report_rates(const fbsde_report* report, fbsde_rates* out) {
  if (!report) return null_arg("report");
  if (!out) return null_arg("out");
  const auto& r = report->report.rates;
  *out = {rate_or_nan(r.y), rate_or_nan(r.z), rate_or_nan(r.gamma), rate_or_nan(r.a),
          rate_or_nan(r.control)};
  g_last_error.clear();
  return FBSDE_OK;
}

fbsde_status fbsde_report_render(const fbsde_report* report, fbsde_format format, char* buf,
                                 size_t cap, size_t* needed) {
  if (!report) return null_arg("report");
  fbsde_status status = FBSDE_OK;
  const fbsde_status guard = guarded(
      [&] { status = copy_out(fbsde::render(report->report, to_format(format)), buf, cap, needed); });
  return guard != FBSDE_OK ? guard : status;
}

fbsde_status fbsde_report_write(const fbsde_report* report, const char* path,
                                fbsde_format format) {
  if (!report) return null_arg("report");
  if (!path) return null_arg("path");
  return guarded([&] { fbsde::write_report(report->report, path, to_format(format)); });
}

fbsde_status fbsde_fit_rate(const double* errors, const int* ns, size_t len, double* rate) {
  if (!errors || !ns || !rate) return null_arg("errors, ns and rate");
  fbsde_status status = FBSDE_OK;
  const fbsde_status guard = guarded([&] {
    std::vector<fbsde::Real> errs(errors, errors + len);
    const auto r = fbsde::fit_rate(errs, std::span<const int>(ns, len));
    if (!r) {
      status = FBSDE_ERR_INVALID_ARGUMENT;
      return;
    }
    *rate = to_c(*r);
  });
  if (guard != FBSDE_OK) return guard;
  if (status != FBSDE_OK) return set_error(status, "rate undefined: need two positive finite errors");
  return FBSDE_OK;
}

int fbsde_cli_main(int argc, const char* const* argv) {
  try {
    const auto args = to_args(argc, argv);
    return fbsde::cli_main(args, std::cout, std::cerr);
  } catch (...) {
    return 4;
  }
}

}  // extern "C"
