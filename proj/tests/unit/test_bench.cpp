#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fbsde/bench.hpp"
#include "fbsde/control.hpp"

using namespace fbsde;

namespace {

const std::vector<int> kNs{32, 64, 128, 256, 512};

SolverConfig config(int k, int ni = 5) {
  SolverConfig cfg;
  cfg.k = k;
  cfg.ni = ni;
  cfg.r = ni;
  return cfg;
}

}  // namespace

TEST_CASE("fit_rate recovers an exact power law") {
  std::vector<Real> errs;
  for (int n : kNs) errs.push_back(3 / (Real(n) * n));
  const auto r = fit_rate(errs, kNs);
  REQUIRE(r);
  CHECK(std::fabs(*r - 2) < 1e-14);
}

TEST_CASE("fit_rate is invariant under scaling the errors") {
  const std::vector<Real> errs{Real(8.1e-3), Real(2.2e-3), Real(4.9e-4), Real(1.3e-4), Real(3.0e-5)};
  for (Real s : {Real(1e-9), Real(0.5), Real(1e7)}) {
    std::vector<Real> scaled;
    for (Real e : errs) scaled.push_back(e * s);
    CHECK(std::fabs(*fit_rate(errs, kNs) - *fit_rate(scaled, kNs)) < 1e-12);
  }
}

TEST_CASE("fit_rate on a fourth-order error column") {
  const std::vector<Real> errs{Real(2.853e-7), Real(1.843e-8), Real(1.161e-9), Real(7.271e-11), Real(4.545e-12)};
  const auto r = fit_rate(errs, kNs);
  REQUIRE(r);
  CHECK(std::fabs(static_cast<double>(*r) - 3.99) < 0.005);
}

TEST_CASE("fit_rate is undefined without two usable points") {
  const std::vector<int> one{32};
  CHECK_FALSE(fit_rate(std::vector<Real>{Real(1e-3)}, one));
  const std::vector<int> two{32, 64};
  CHECK_FALSE(fit_rate(std::vector<Real>{Real(1e-3), 0}, two));
  CHECK_FALSE(fit_rate(std::vector<Real>{Real(1e-3), Real(NAN)}, two));
  CHECK_FALSE(fit_rate(std::vector<Real>{Real(1e-3), Real(1e-4)}, std::vector<int>{32, 32}));
  CHECK_THROWS_AS(fit_rate(std::vector<Real>{Real(1e-3)}, two), Error);
}

TEST_CASE("sweep measures errors at the anchor point") {
  const auto p = make_problem("ex1");
  const std::vector<int> ns{8, 16, 32};
  const auto rep = sweep(p, config(2), ns, Box{-10, 10});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.all_ok());
  CHECK(rep.problem == "ex1");
  CHECK(rep.k == 2);
  CHECK_FALSE(rep.has_control);
  for (const auto& row : rep.rows) {
    CHECK(row.err_y > 0);
    CHECK(row.grid_points > 0);
    CHECK(row.spacing == doctest::Approx(std::pow(1.0 / row.n_steps, 0.5)));
  }
  REQUIRE(rep.rates.y);
  CHECK(*rep.rates.y > 1);
}

TEST_CASE("sweep rejects bad N lists and problems without an exact solution") {
  const auto p = make_problem("ex1");
  CHECK_THROWS_AS(sweep(p, config(2), std::vector<int>{}), Error);
  CHECK_THROWS_AS(sweep(p, config(2), std::vector<int>{64, 32}), Error);
  CHECK_THROWS_AS(sweep(p, config(3), std::vector<int>{3, 8}), Error);
  auto q = p;
  q.exact.reset();
  try {
    sweep(q, config(1), std::vector<int>{8, 16});
    FAIL("expected MissingExact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingExact);
  }
}

TEST_CASE("diverged runs become rows with NaN errors") {
  auto p = make_problem("ex1");
  p.generator = [](Real, Real, Real y, Real, Real) { return 1e4000L * (1 + y * y); };
  const auto rep = sweep(p, config(1), std::vector<int>{8, 16}, Box{-5, 5});
  REQUIRE(rep.rows.size() == 2);
  CHECK_FALSE(rep.all_ok());
  CHECK(rep.rows[0].status == RowStatus::Diverged);
  CHECK(std::isnan(static_cast<double>(rep.rows[0].err_y)));
  CHECK_FALSE(rep.rates.y);
  CHECK(render_markdown(rep).find("diverged") != std::string::npos);
  CHECK(render_csv(rep).find("NaN") != std::string::npos);
}

TEST_CASE("control sweeps report the control error") {
  const auto p = build_control_problem(ControlParams{});
  const auto rep = sweep(p, config(1, 8), std::vector<int>{8, 16});
  CHECK(rep.has_control);
  REQUIRE(rep.rows[0].err_control);
  CHECK(*rep.rows[0].err_control > 0);
  CHECK(rep.rates.control);
  CHECK(render_markdown(rep).find("alpha") != std::string::npos);
}

TEST_CASE("renderers") {
  RunReport rep;
  rep.problem = "ex1";
  rep.k = 3;
  SweepRow a;
  a.n_steps = 32;
  a.err_y = Real(1.2346e-4);
  a.err_z = Real(2e-5);
  a.err_gamma = Real(3e-6);
  a.err_a = Real(4e-7);
  a.seconds = 0.5;
  SweepRow b = a;
  b.n_steps = 64;
  b.err_y = Real(1.5e-5);
  rep.rows = {a, b};
  rep.rates.y = Real(3.04);

  const auto csv = render_csv(rep);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,N,errY,errZ,errGamma,errA,seconds");
  std::getline(in, line);
  CHECK(line == "3,32,1.234600e-04,2.000000e-05,3.000000e-06,4.000000e-07,0.500");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  const auto md = render_markdown(rep);
  CHECK(md.find("| K=3 | 32 | 1.235E-04 |") != std::string::npos);
  CHECK(md.find("| CR |  | 3.04 | NaN |") != std::string::npos);
  CHECK(render(rep, ReportFormat::Csv) == csv);
}

TEST_CASE("write_report reports unwritable paths") {
  RunReport rep;
  const auto dir = std::filesystem::temp_directory_path() / "fbsde_bench_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "r.csv").string();
  write_report(rep, path, ReportFormat::Csv);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "k,N,errY,errZ,errGamma,errA,seconds");
  try {
    write_report(rep, (dir / "missing" / "r.csv").string(), ReportFormat::Csv);
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
