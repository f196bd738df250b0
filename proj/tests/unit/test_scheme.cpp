#include <cmath>
#include <cstdlib>
#include <limits>

#include "doctest.h"
#include "fbsde/problems.hpp"
#include "fbsde/scheme.hpp"

using namespace fbsde;

namespace {

// 1 in extended precision, about 2048 in float64.
const Real kSlack = std::numeric_limits<Real>::epsilon() / std::numeric_limits<long double>::epsilon();

SolverConfig config(int k, int ni = 5) {
  SolverConfig cfg;
  cfg.k = k;
  cfg.ni = ni;
  cfg.r = ni;
  return cfg;
}

ProblemSpec linear_problem(Real b, Real s, std::function<Real(Real)> g, Field y) {
  ProblemSpec p;
  p.name = "linear";
  p.drift = [b](Real, Real, Real, Real, Real) { return b; };
  p.diffusion = [s](Real, Real, Real, Real, Real) { return s; };
  p.generator = [](Real, Real, Real, Real, Real) { return Real(0); };
  p.generator_dy = p.generator;
  p.terminal = std::move(g);
  const Field zero = [](Real, Real) { return Real(0); };
  p.exact = ExactSolution{std::move(y), zero, zero, zero};
  p.x0 = Real(0.5);
  return p;
}

}  // namespace

TEST_CASE("solve_y: linear generator has a closed form") {
  // -alpha0 y = rhs + c y + d  =>  y = -(rhs + d) / (alpha0 + c)
  const Real alpha0 = -Real(1.5) * 32, rhs = Real(3.2), c = Real(0.7), d = Real(-0.4);
  const Real want = -(rhs + d) / (alpha0 + c);
  for (auto solver : {YSolver::Picard, YSolver::Newton}) {
    SolverConfig cfg;
    cfg.y_solver = solver;
    const auto r = solve_y(cfg, alpha0, rhs, [&](Real y) { return c * y + d; }, [&](Real) { return c; }, Real(0));
    CHECK(std::fabs(r.y - want) < 1e-15 * kSlack);
    if (solver == YSolver::Newton) CHECK(r.iterations <= 2);
  }
}

TEST_CASE("solve_y: Newton handles a quadratic generator") {
  // -alpha0 y = rhs + y^2 with alpha0 = -10, rhs = 1: y^2 - 10 y + 1 = 0, small root.
  SolverConfig cfg;
  cfg.y_solver = YSolver::Newton;
  const auto r = solve_y(cfg, Real(-10), Real(1), [](Real y) { return y * y; }, [](Real y) { return 2 * y; }, Real(0));
  CHECK(std::fabs(r.y - (5 - std::sqrt(Real(24)))) < 1e-15 * kSlack);
}

TEST_CASE("solve_y failure modes") {
  SolverConfig cfg;
  cfg.y_solver = YSolver::Newton;
  try {
    solve_y(cfg, Real(-2), Real(1), [](Real y) { return 2 * y; }, [](Real) { return Real(2); }, Real(0));
    FAIL("expected SingularDenominator");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularDenominator);
  }
  cfg.y_solver = YSolver::Picard;
  cfg.max_iters = 3;
  try {
    solve_y(cfg, Real(-1), Real(1), [](Real y) { return Real(0.9) * y; }, [](Real) { return Real(0.9); }, Real(0));
    FAIL("expected NonConvergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergence);
  }
  cfg.max_iters = 200;
  try {
    solve_y(cfg, Real(-1), Real(1), [](Real y) { return y * y * y * 1e200L; }, [](Real) { return Real(0); }, Real(2));
    FAIL("expected Diverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Diverged);
  }
}

TEST_CASE("constant terminal value is a fixed point at every level") {
  auto p = linear_problem(Real(0.3), Real(0.7), [](Real) { return Real(3); }, [](Real, Real) { return Real(3); });
  for (bool coupled : {false, true}) {
    p.coupled = coupled;
    for (int k = 1; k <= 4; ++k) {
      const auto cfg = config(k);
      const TimeGrid tg{0, 1, 12};
      const auto grid = build_grid(p.x0, tg.dt(), k, cfg.r, -4, 4);
      const auto run = run_backward(p, cfg, grid, tg, RunOptions{true});
      REQUIRE(run.history.size() == 13);
      for (const auto& lvl : run.history)
        for (std::size_t i = 0; i < grid.size(); ++i) {
          CHECK(std::fabs(lvl.y.values[i] - 3) < 1e-12 * kSlack);
          CHECK(std::fabs(lvl.z.values[i]) < 1e-10 * kSlack);
          CHECK(std::fabs(lvl.gamma.values[i]) < 1e-10 * kSlack);
          CHECK(std::fabs(lvl.a.values[i]) < 1e-10 * kSlack);
        }
    }
  }
}

TEST_CASE("one k=1 step: Z equals 1 for g(x) = x, b = 0, sigma = 1") {
  const auto p = linear_problem(0, 1, [](Real x) { return x; }, [](Real, Real x) { return x; });
  const auto cfg = config(1, 3);
  const TimeGrid tg{0, 1, 8};
  const auto grid = build_grid(p.x0, tg.dt(), 1, cfg.r, -3, 3);
  const auto top = warm_start(p, grid, tg, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0].n == 8);
  const auto lvl = decoupled_step(p, cfg, grid, top, tg, 7);
  CHECK(lvl.n == 7);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::fabs(lvl.z.values[i] - 1) < 1e-13 * kSlack);
    CHECK(std::fabs(lvl.y.values[i] - grid.point(i)) < 1e-13 * kSlack);
    CHECK(std::fabs(lvl.gamma.values[i]) < 1e-12 * kSlack);
  }
}

TEST_CASE("coupled iteration on a decoupled problem matches the direct scheme bit for bit") {
  for (int k = 1; k <= 3; ++k) {
    const auto plain = example1();
    auto forced = plain;
    forced.coupled = true;
    const auto cfg = config(k);
    const TimeGrid tg{0, 1, 24};
    const auto grid = build_grid(plain.x0, tg.dt(), k, cfg.r, -20, 20);
    const auto a = run_backward(plain, cfg, grid, tg);
    const auto b = run_backward(forced, cfg, grid, tg);
    CHECK(a.level0.y.values == b.level0.y.values);
    CHECK(a.level0.z.values == b.level0.z.values);
    CHECK(a.level0.gamma.values == b.level0.gamma.values);
    CHECK(a.level0.a.values == b.level0.a.values);
    CHECK(b.stats.outer_max == 2);
  }
}

TEST_CASE("reruns are bit-identical for any worker count") {
  const auto p = example4();
  const auto cfg = config(2, 6);
  const TimeGrid tg{0, 1, 16};
  const auto grid = build_grid(p.x0, tg.dt(), 2, cfg.r, -10, 10);
  setenv("FBSDE_THREADS", "1", 1);
  const auto a = run_backward(p, cfg, grid, tg);
  setenv("FBSDE_THREADS", "4", 1);
  const auto b = run_backward(p, cfg, grid, tg);
  unsetenv("FBSDE_THREADS");
  CHECK(a.level0.y.values == b.level0.y.values);
  CHECK(a.level0.z.values == b.level0.z.values);
  CHECK(a.level0.gamma.values == b.level0.gamma.values);
  CHECK(a.level0.a.values == b.level0.a.values);
}

TEST_CASE("errors shrink with N for every example") {
  for (const char* name : {"ex1", "ex2", "ex3", "ex4"}) {
    const auto p = make_problem(name);
    auto cfg = config(2, 6);
    if (std::string(name) == "ex2") cfg.y_solver = YSolver::Newton;
    Real prev = INFINITY;
    for (int n : {8, 16, 32}) {
      const TimeGrid tg{p.t0, p.horizon, n};
      const auto grid = build_grid(p.x0, tg.dt(), 2, cfg.r, -10, 10);
      const auto run = run_backward(p, cfg, grid, tg);
      const Real err = std::fabs(run.at_x0.y - p.exact->y(p.t0, p.x0));
      INFO(name << " N=" << n);
      CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("configuration and history are validated") {
  const auto p = example1();
  auto cfg = config(1);
  cfg.k = 0;
  CHECK_THROWS_AS(validate(cfg, p), Error);
  cfg = config(1);
  cfg.ng = 0;
  CHECK_THROWS_AS(validate(cfg, p), Error);
  cfg = config(1);
  cfg.epsilon0 = 0;
  CHECK_THROWS_AS(validate(cfg, p), Error);

  auto no_dy = p;
  no_dy.generator_dy = nullptr;
  cfg = config(1);
  cfg.y_solver = YSolver::Newton;
  CHECK_THROWS_AS(validate(cfg, no_dy), Error);

  auto no_exact = p;
  no_exact.exact.reset();
  const TimeGrid tg{0, 1, 8};
  const auto grid = build_grid(p.x0, tg.dt(), 2, 5, -5, 5);
  try {
    warm_start(no_exact, grid, tg, 2);
    FAIL("expected MissingExact");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingExact);
  }

  auto top = warm_start(p, grid, tg, 2);
  std::swap(top[0], top[1]);
  CHECK_THROWS_AS(decoupled_step(p, config(2), grid, top, tg, 6), Error);
  CHECK_THROWS_AS(coupled_step(example3(), config(2), grid, warm_start(p, grid, tg, 1), tg, 6), Error);
}

TEST_CASE("a non-finite generator is reported as divergence with its location") {
  auto p = example1();
  p.generator = [](Real, Real x, Real, Real, Real) { return x > 1 ? Real(INFINITY) : Real(0); };
  const TimeGrid tg{0, 1, 8};
  const auto grid = build_grid(p.x0, tg.dt(), 1, 5, -3, 3);
  try {
    run_backward(p, config(1), grid, tg);
    FAIL("expected Diverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Diverged);
    CHECK(std::string(e.what()).find("level 7") != std::string::npos);
  }
}
