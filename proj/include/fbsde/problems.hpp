#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fbsde/real.hpp"

namespace fbsde {

/// Coefficient of the forward or backward equation, (t, x, y, z, gamma) -> R.
using Coefficient = std::function<Real(Real t, Real x, Real y, Real z, Real gamma)>;
/// Space-time field (t, x) -> R.
using Field = std::function<Real(Real t, Real x)>;

struct ExactSolution {
  Field y;
  Field z;
  Field gamma;
  Field a;
};

/// Feedback control recovered from Z, with its exact counterpart, for
/// problems that come from a stochastic control formulation.
struct FeedbackControl {
  std::function<Real(Real z)> recover;
  Field exact;
};

/// A scalar second-order FBSDE
///   dX = b dt + sigma dW,  -dY = f dt - Z dW,  dZ = A dt + Gamma dW,
/// with Y_T = g(X_T) and X_{t0} = x0.
struct ProblemSpec {
  std::string name;
  Coefficient drift;
  Coefficient diffusion;
  Coefficient generator;
  Coefficient generator_dy;  // empty when df/dy is not supplied
  std::function<Real(Real x)> terminal;
  bool coupled = false;
  std::optional<ExactSolution> exact;
  std::optional<FeedbackControl> feedback;
  Real horizon = 1;
  Real t0 = 0;
  Real x0 = 0;

  bool has_generator_dy() const { return static_cast<bool>(generator_dy); }
};

/// dX = sin(t+X) dt + c cos(t+X) dW with Y = sin(t+X). Requires c != 0.
ProblemSpec example1(Real c = Real(0.1), Real horizon = 1);

/// Geometric Brownian motion forward, Y = t exp(-X^2/M). Requires M > 0.
ProblemSpec example2(Real rate = Real(0.2), Real c = Real(0.01), Real M = 4, Real horizon = 1);

/// Coupled variant of example 1 (same exact solution). Requires c != 0.
ProblemSpec example3(Real c = Real(0.1), Real horizon = 1);

/// Coupled logistic system, Y = e^{t+X} / (1 + e^{t+X}).
ProblemSpec example4(Real horizon = 1);

/// Optional parameter overrides for registry lookups; unset fields take the
/// per-problem defaults above (and the control defaults in control.hpp).
struct ProblemParams {
  std::optional<Real> c;
  std::optional<Real> rate;
  std::optional<Real> m;
  std::optional<Real> beta;
  std::optional<Real> sigma;
  std::optional<Real> p;
  std::optional<Real> q;
  std::optional<Real> control_c;
  std::optional<Real> horizon;
};

/// Registered names: "ex1", "ex2", "ex3", "ex4", "control".
const std::vector<std::string>& problem_names();
bool is_registered_problem(std::string_view name);
ProblemSpec make_problem(std::string_view name, const ProblemParams& params = {});

/// True if drift and diffusion change when (y, z, gamma) are perturbed at
/// any of a few probe points.
bool probe_coupling(const ProblemSpec& spec);

}  // namespace fbsde
