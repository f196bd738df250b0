#pragma once

#include <span>
#include <vector>

#include "fbsde/real.hpp"

namespace fbsde {

inline constexpr int kMinSteps = 1;
inline constexpr int kMaxSteps = 8;

/// Backward-difference weights approximating d/dt at the left end of a
/// uniform k-step stencil t_i = t_0 + i*dt. Entry i of `scaled()` is
/// alpha_{k,i}*dt, so the weights themselves are scaled()[i] / dt.
class MultistepCoefficients {
 public:
  int k() const { return k_; }
  std::span<const Real> scaled() const { return scaled_; }
  Real operator[](int i) const { return scaled_[static_cast<std::size_t>(i)]; }

 private:
  friend MultistepCoefficients compute_coefficients(int k);
  MultistepCoefficients(int k, std::vector<Real> scaled) : k_(k), scaled_(std::move(scaled)) {}

  int k_;
  std::vector<Real> scaled_;
};

/// Solves sum_i i^j c_i = [j == 1], j = 0..k, exactly in rational arithmetic.
/// Throws InvalidArgument unless 1 <= k <= 8.
MultistepCoefficients compute_coefficients(int k);

/// alpha_{k,i} = scaled[i] / dt. Throws InvalidArgument for dt <= 0.
std::vector<Real> unscale(const MultistepCoefficients& coeffs, Real dt);

}  // namespace fbsde
