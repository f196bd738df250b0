#include "fbsde/problems.hpp"

#include <algorithm>
#include <cmath>

#include "fbsde/control.hpp"
#include "fbsde/error.hpp"

namespace fbsde {

using std::cos;
using std::exp;
using std::sin;

ProblemSpec example1(Real c, Real horizon) {
  require(c != 0, "example 1 requires c != 0");
  require(horizon > 0, "horizon must be positive");
  ProblemSpec p;
  p.horizon = horizon;
  p.name = "ex1";
  p.x0 = Real(0.5);
  p.drift = [](Real t, Real x, Real, Real, Real) { return sin(t + x); };
  p.diffusion = [c](Real t, Real x, Real, Real, Real) { return c * cos(t + x); };
  p.generator = [c](Real t, Real x, Real y, Real z, Real g) {
    const Real co = cos(t + x);
    return -co * z / c - co * (y * y + y) - g / 4;
  };
  p.generator_dy = [](Real t, Real x, Real y, Real, Real) { return -cos(t + x) * (2 * y + 1); };
  p.terminal = [T = p.horizon](Real x) { return sin(T + x); };
  p.exact = ExactSolution{
      [](Real t, Real x) { return sin(t + x); },
      [c](Real t, Real x) { return c * cos(t + x) * cos(t + x); },
      [c](Real t, Real x) { return -2 * c * c * sin(t + x) * cos(t + x) * cos(t + x); },
      [c](Real t, Real x) {
        const Real s = sin(t + x), co = cos(t + x);
        return -c * sin(2 * t + 2 * x) * (1 + s) - c * c * c * cos(2 * t + 2 * x) * co * co;
      },
  };
  return p;
}

ProblemSpec example2(Real rate, Real c, Real M, Real horizon) {
  require(M > 0, "example 2 requires M > 0");
  require(horizon > 0, "horizon must be positive");
  ProblemSpec p;
  p.horizon = horizon;
  p.name = "ex2";
  p.x0 = Real(1.5);
  p.drift = [rate](Real, Real x, Real, Real, Real) { return rate * x; };
  p.diffusion = [c](Real, Real x, Real, Real, Real) { return c * x; };
  p.generator = [rate, c, M](Real, Real x, Real y, Real z, Real g) {
    return -exp(-x * x / M) + 2 / M * rate * x * x * y - g / 2 + c / 2 * z;
  };
  p.generator_dy = [rate, M](Real, Real x, Real, Real, Real) { return 2 / M * rate * x * x; };
  p.terminal = [T = p.horizon, M](Real x) { return T * exp(-x * x / M); };
  // A is the drift of Z = sigma u_x, i.e. (d/dt + L)(sigma u_x).
  p.exact = ExactSolution{
      [M](Real t, Real x) { return t * exp(-x * x / M); },
      [c, M](Real t, Real x) { return -2 * c / M * t * x * x * exp(-x * x / M); },
      [c, M](Real t, Real x) {
        return 4 * c * c / (M * M) * t * x * x * exp(-x * x / M) * (x * x - M);
      },
      [rate, c, M](Real t, Real x) {
        const Real x2 = x * x;
        const Real bracket = 1 + 2 * rate * t + c * c * t - (2 * rate + 5 * c * c) * t * x2 / M +
                             2 * c * c * t * x2 * x2 / (M * M);
        return -2 * c / M * exp(-x2 / M) * x2 * bracket;
      },
  };
  return p;
}

ProblemSpec example3(Real c, Real horizon) {
  require(c != 0, "example 3 requires c != 0");
  ProblemSpec p = example1(c, horizon);
  p.name = "ex3";
  p.x0 = 1;
  p.coupled = true;
  p.drift = [c](Real t, Real x, Real y, Real z, Real) {
    const Real s = sin(t + x);
    return s + z / c + s * y - 1;
  };
  p.diffusion = [c](Real t, Real x, Real y, Real, Real) {
    const Real s = sin(t + x), co = cos(t + x);
    return c * co - c + c * co * co + c * s * y;
  };
  return p;
}

ProblemSpec example4(Real horizon) {
  require(horizon > 0, "horizon must be positive");
  ProblemSpec p;
  p.horizon = horizon;
  p.name = "ex4";
  p.x0 = Real(0.5);
  p.coupled = true;
  p.drift = [](Real t, Real x, Real y, Real, Real) {
    return 1 / ((1 + exp(t + x)) * (1 + y));
  };
  p.diffusion = [](Real, Real, Real y, Real, Real) { return y; };
  p.generator = [](Real t, Real x, Real y, Real z, Real g) {
    const Real e = exp(t + x);
    return -2 * y / (1 + 2 * e) - (g - y * z / (1 + e)) / 2;
  };
  p.generator_dy = [](Real t, Real x, Real, Real z, Real) {
    const Real e = exp(t + x);
    return -2 / (1 + 2 * e) + z / (2 * (1 + e));
  };
  p.terminal = [T = p.horizon](Real x) {
    const Real e = exp(T + x);
    return e / (1 + e);
  };
  p.exact = ExactSolution{
      [](Real t, Real x) {
        const Real e = exp(t + x);
        return e / (1 + e);
      },
      [](Real t, Real x) {
        const Real e = exp(t + x);
        return e * e / std::pow(1 + e, 3);
      },
      [](Real t, Real x) {
        const Real e = exp(t + x);
        return e * e * e * (2 - e) / std::pow(1 + e, 5);
      },
      [](Real t, Real x) {
        const Real e = exp(t + x);
        return 2 * e * e * (2 - e) / (std::pow(1 + e, 3) * (1 + 2 * e)) +
               std::pow(e, 4) * (e * e - 7 * e + 4) / (2 * std::pow(1 + e, 7));
      },
  };
  return p;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"ex1", "ex2", "ex3", "ex4", "control"};
  return names;
}

bool is_registered_problem(std::string_view name) {
  const auto& names = problem_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ProblemSpec make_problem(std::string_view name, const ProblemParams& params) {
  const Real T = params.horizon.value_or(1);
  if (name == "ex1") return example1(params.c.value_or(Real(0.1)), T);
  if (name == "ex2")
    return example2(params.rate.value_or(Real(0.2)), params.c.value_or(Real(0.01)),
                    params.m.value_or(4), T);
  if (name == "ex3") return example3(params.c.value_or(Real(0.1)), T);
  if (name == "ex4") return example4(T);
  if (name == "control") {
    ControlParams cp;
    if (params.beta) cp.beta = *params.beta;
    if (params.sigma) cp.sigma = *params.sigma;
    if (params.p) cp.p = *params.p;
    if (params.q) cp.q = *params.q;
    if (params.control_c) cp.c = *params.control_c;
    cp.horizon = T;
    return build_control_problem(cp);
  }
  fail(ErrorCode::InvalidArgument, "unknown problem '" + std::string(name) + "'");
}

bool probe_coupling(const ProblemSpec& spec) {
  const Real probes[][2] = {{0, Real(0.3)}, {Real(0.5), -1}, {Real(0.9), 2}};
  for (const auto& pt : probes) {
    const Real t = pt[0], x = pt[1];
    const Real b0 = spec.drift(t, x, Real(0.2), Real(0.1), Real(0.05));
    const Real s0 = spec.diffusion(t, x, Real(0.2), Real(0.1), Real(0.05));
    const Real deltas[][3] = {{Real(0.1), 0, 0}, {0, Real(0.1), 0}, {0, 0, Real(0.1)}};
    for (const auto& d : deltas) {
      const Real y = Real(0.2) + d[0], z = Real(0.1) + d[1], g = Real(0.05) + d[2];
      if (spec.drift(t, x, y, z, g) != b0 || spec.diffusion(t, x, y, z, g) != s0) return true;
    }
  }
  return false;
}

}  // namespace fbsde
