#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "fbsde/error.hpp"
#include "fbsde/real.hpp"

namespace fbsde {

inline constexpr int kMaxQuadratureNodes = 64;

/// Gauss-Hermite rule for the weight exp(-x^2): nodes ascending, weights
/// summing to sqrt(pi).
struct QuadratureRule {
  int ng = 0;
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix of
/// the Hermite recurrence, polished by Newton on the orthonormal polynomial,
/// with weights from the Christoffel function. 1 <= ng <= 64.
QuadratureRule gauss_hermite(int ng);

namespace detail {

inline void accumulate(Real& acc, Real w, Real v) { acc += w * v; }

template <std::size_t N>
void accumulate(std::array<Real, N>& acc, Real w, const std::array<Real, N>& v) {
  for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
}

inline void scale(Real& acc, Real s) { acc *= s; }

template <std::size_t N>
void scale(std::array<Real, N>& acc, Real s) {
  for (auto& a : acc) a *= s;
}

}  // namespace detail

/// E[payoff(dW)] for dW ~ N(0, dt), approximated as
///   sum_a w_a * payoff(sqrt(2 dt) x_a) / sqrt(pi).
/// The payoff returns a Real or a std::array<Real, N>; arrays are accumulated
/// componentwise so one sweep over the nodes serves several expectations.
/// An Error thrown by the payoff is rethrown with the node index attached.
template <class Payoff>
auto expect_increment(const QuadratureRule& rule, Real dt, Payoff&& payoff) {
  using Value = std::decay_t<std::invoke_result_t<Payoff&, Real>>;
  require(dt > 0, "expectation time step must be positive");
  const Real spread = std::sqrt(2 * dt);
  Value acc{};
  for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
    try {
      detail::accumulate(acc, rule.weights[a], payoff(spread * rule.nodes[a]));
    } catch (const Error& e) {
      throw e.with_context("quadrature node " + std::to_string(a));
    }
  }
  detail::scale(acc, Real(1) / std::sqrt(std::numbers::pi_v<Real>));
  return acc;
}

}  // namespace fbsde
