#include "fbsde/control.hpp"

#include <cmath>
#include <numbers>

#include "fbsde/error.hpp"

namespace fbsde {

namespace {

Real log_cosh(Real u) {
  const Real a = std::fabs(u);
  return a + std::log1p(std::exp(-2 * a)) - std::numbers::ln2_v<Real>;
}

}  // namespace

void validate(const ControlParams& params) {
  require(params.q > 0, "control cost weight q must be positive");
  require(params.sigma > 0, "control diffusion sigma must be positive");
  require(params.p > 0, "control tracking weight p must be positive");
  require(params.horizon > 0, "control horizon must be positive");
}

RiccatiSolution::RiccatiSolution(const ControlParams& params)
    : params_(params), omega_(std::fabs(params.beta) * std::sqrt(params.p / params.q)) {
  validate(params);
}

Real RiccatiSolution::a(Real t) const {
  const Real tau = params_.horizon - t;
  if (params_.beta == 0) return params_.p * tau;
  return std::sqrt(params_.p * params_.q) / std::fabs(params_.beta) * std::tanh(omega_ * tau);
}

Real RiccatiSolution::a_dot(Real t) const {
  if (params_.beta == 0) return -params_.p;
  const Real ch = std::cosh(omega_ * (params_.horizon - t));
  return -params_.p / (ch * ch);
}

Real RiccatiSolution::d(Real t) const {
  const Real tau = params_.horizon - t;
  const Real s2 = params_.sigma * params_.sigma;
  if (params_.beta == 0) return s2 * params_.p * tau * tau / 2;
  return s2 * params_.q / (params_.beta * params_.beta) * log_cosh(omega_ * tau);
}

ProblemSpec build_control_problem(const ControlParams& params) {
  validate(params);
  const Real beta = params.beta, sigma = params.sigma, p = params.p, q = params.q, c = params.c;
  const RiccatiSolution riccati(params);

  ProblemSpec spec;
  spec.name = "control";
  spec.horizon = params.horizon;
  spec.x0 = params.x0;
  spec.drift = [beta, c](Real, Real, Real, Real, Real) { return beta * c; };
  spec.diffusion = [sigma](Real, Real, Real, Real, Real) { return sigma; };
  spec.generator = [=](Real, Real x, Real, Real z, Real) {
    return -beta * beta / (4 * q * sigma * sigma) * z * z - beta * c / sigma * z + p * x * x;
  };
  spec.generator_dy = [](Real, Real, Real, Real, Real) { return Real(0); };
  spec.terminal = [](Real) { return Real(0); };
  spec.exact = ExactSolution{
      [riccati](Real t, Real x) { return riccati.value(t, x); },
      [riccati, sigma](Real t, Real x) { return 2 * sigma * riccati.a(t) * x; },
      [riccati, sigma](Real t, Real) { return 2 * sigma * sigma * riccati.a(t); },
      [riccati, sigma, beta, c](Real t, Real x) {
        return 2 * sigma * riccati.a_dot(t) * x + 2 * sigma * beta * c * riccati.a(t);
      },
  };
  spec.feedback = FeedbackControl{
      [params](Real z) { return recover_control(z, params); },
      [params](Real t, Real x) { return optimal_control(t, x, params); },
  };
  return spec;
}

Real recover_control(Real z, const ControlParams& params) {
  return -params.beta / (2 * params.q * params.sigma) * z;
}

Real optimal_control(Real t, Real x, const ControlParams& params) {
  return -params.beta / (2 * params.q) * RiccatiSolution(params).value_dx(t, x);
}

}  // namespace fbsde
