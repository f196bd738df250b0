#pragma once

#include "fbsde/problems.hpp"
#include "fbsde/real.hpp"

namespace fbsde {

/// Linear-quadratic tracking problem dX = beta*alpha dt + sigma dW with cost
/// E[p int X^2 + q int alpha^2]. `c` is the constant control used to build the
/// forward SDE of the associated 2FBSDE, dX = beta*c dt + sigma dW.
struct ControlParams {
  Real beta = 1;
  Real sigma = Real(0.5);
  Real p = 1;
  Real q = 1;
  Real c = Real(0.1);
  Real x0 = 5;
  Real horizon = 1;
};

void validate(const ControlParams& params);

/// Value function V(t, x) = a(t) x^2 + d(t) of the Bellman equation
///   V_t + sigma^2/2 V_xx - beta^2/(4q) V_x^2 + p x^2 = 0,  V(T, .) = 0,
/// with a' = beta^2 a^2 / q - p and d' = -sigma^2 a.
class RiccatiSolution {
 public:
  explicit RiccatiSolution(const ControlParams& params);

  Real a(Real t) const;
  Real a_dot(Real t) const;
  Real d(Real t) const;
  Real value(Real t, Real x) const { return a(t) * x * x + d(t); }
  Real value_dx(Real t, Real x) const { return 2 * a(t) * x; }

 private:
  ControlParams params_;
  Real omega_;  // |beta| sqrt(p/q)
};

/// Decoupled 2FBSDE whose Y is the value function:
///   b = beta c, sigma const, f = -beta^2/(4 q sigma^2) Z^2 - (beta c/sigma) Z + p x^2, g = 0.
/// Exact (Y, Z, Gamma, A) come from the Riccati solution.
ProblemSpec build_control_problem(const ControlParams& params);

/// alpha = -beta/(2 q sigma) z.
Real recover_control(Real z, const ControlParams& params);

/// alpha*(t, x) = -beta/(2q) V_x(t, x).
Real optimal_control(Real t, Real x, const ControlParams& params);

}  // namespace fbsde
