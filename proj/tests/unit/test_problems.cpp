#include <cmath>

#include "doctest.h"
#include "fbsde/error.hpp"
#include "fbsde/problems.hpp"

using namespace fbsde;

namespace {

constexpr Real kH = Real(1e-3);

Real dx(const Field& f, Real t, Real x) { return (f(t, x + kH) - f(t, x - kH)) / (2 * kH); }
Real dxx(const Field& f, Real t, Real x) { return (f(t, x + kH) - 2 * f(t, x) + f(t, x - kH)) / (kH * kH); }
Real dt(const Field& f, Real t, Real x) { return (f(t + kH, x) - f(t - kH, x)) / (2 * kH); }

// Checks the exact solution against the PDE system by finite differences:
//   Y_t + b Y_x + s^2/2 Y_xx + f = 0, Z = s Y_x, Gamma = s Z_x,
//   A = Z_t + b Z_x + s^2/2 Z_xx, Y(T, x) = g(x).
void check_residuals(const ProblemSpec& p, std::initializer_list<Real> xs) {
  REQUIRE(p.exact);
  const auto& e = *p.exact;
  for (Real t : {Real(0.1), Real(0.45), Real(0.8)}) {
    for (Real x : xs) {
      const Real y = e.y(t, x), z = e.z(t, x), g = e.gamma(t, x), a = e.a(t, x);
      const Real b = p.drift(t, x, y, z, g), s = p.diffusion(t, x, y, z, g);
      const Real scale = 1 + std::fabs(y) + std::fabs(z) + std::fabs(g) + std::fabs(a);
      const Real tol = Real(2e-5) * scale;
      INFO(p.name << " t=" << static_cast<double>(t) << " x=" << static_cast<double>(x));
      CHECK(std::fabs(dt(e.y, t, x) + b * dx(e.y, t, x) + s * s / 2 * dxx(e.y, t, x) + p.generator(t, x, y, z, g)) < tol);
      CHECK(std::fabs(z - s * dx(e.y, t, x)) < tol);
      CHECK(std::fabs(g - s * dx(e.z, t, x)) < tol);
      CHECK(std::fabs(a - (dt(e.z, t, x) + b * dx(e.z, t, x) + s * s / 2 * dxx(e.z, t, x))) < tol);
    }
  }
  for (Real x : xs) CHECK(std::fabs(p.terminal(x) - e.y(p.horizon, x)) < 1e-15 * (1 + std::fabs(p.terminal(x))));
}

}  // namespace

TEST_CASE("exact solutions satisfy the PDE system") {
  check_residuals(example1(), {Real(-1), Real(0.5), Real(1.7)});
  check_residuals(example2(), {Real(-1), Real(0.5), Real(1.5), Real(2.5)});
  check_residuals(example3(), {Real(-1), Real(0.5), Real(1.7)});
  check_residuals(example4(), {Real(-1), Real(0.5), Real(1.7)});
  check_residuals(make_problem("control"), {Real(-2), Real(1), Real(5)});
}

TEST_CASE("parameter overrides keep the solutions exact") {
  check_residuals(example1(Real(0.3), 2), {Real(0.2), Real(1)});
  check_residuals(example2(Real(0.1), Real(0.05), 2), {Real(0.4), Real(1.5)});
  check_residuals(example3(Real(0.25)), {Real(0.2), Real(1)});
  ProblemParams pp;
  pp.beta = 2;
  pp.sigma = Real(0.3);
  pp.horizon = Real(1.5);
  check_residuals(make_problem("control", pp), {Real(-1), Real(2)});
}

TEST_CASE("generator derivatives match finite differences") {
  for (const auto& name : problem_names()) {
    const auto p = make_problem(name);
    REQUIRE(p.has_generator_dy());
    const Real t = Real(0.3), x = Real(0.7), y = Real(0.4), z = Real(0.2), g = Real(-0.1);
    const Real fd = (p.generator(t, x, y + kH, z, g) - p.generator(t, x, y - kH, z, g)) / (2 * kH);
    CHECK(std::fabs(p.generator_dy(t, x, y, z, g) - fd) < 1e-6);
  }
}

TEST_CASE("registry and coupling flags") {
  CHECK(problem_names().size() == 5);
  CHECK(is_registered_problem("ex3"));
  CHECK_FALSE(is_registered_problem("ex9"));
  CHECK_THROWS_AS(make_problem("nope"), Error);
  for (const auto& name : problem_names()) {
    const auto p = make_problem(name);
    CHECK(p.name == name);
    CHECK(probe_coupling(p) == p.coupled);
  }
  CHECK(make_problem("ex3").coupled);
  CHECK(make_problem("ex4").coupled);
  CHECK(make_problem("ex1").x0 == Real(0.5));
  CHECK(make_problem("ex2").x0 == Real(1.5));
  CHECK(make_problem("ex3").x0 == 1);
  ProblemParams pp;
  pp.horizon = 3;
  CHECK(make_problem("ex4", pp).horizon == 3);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(example1(0), Error);
  CHECK_THROWS_AS(example2(Real(0.2), Real(0.01), 0), Error);
  CHECK_THROWS_AS(example3(0), Error);
  CHECK_THROWS_AS(example4(-1), Error);
}
