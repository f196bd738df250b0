#include "fbsde/coeffs.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "fbsde/error.hpp"

namespace fbsde {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Gauss-Jordan on the (k+1)x(k+1) moment matrix V[j][i] = i^j.
std::vector<Rational> solve_moment_system(int k) {
  const int n = k + 1;
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m[j][i] = Rational(boost::multiprecision::pow(boost::multiprecision::cpp_int(i),
                                                    static_cast<unsigned>(j)));
    }
    m[j][n] = (j == 1) ? 1 : 0;
  }
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (m[pivot][col] == 0) ++pivot;
    std::swap(m[pivot], m[col]);
    const Rational inv = 1 / m[col][col];
    for (int c = col; c <= n; ++c) m[col][c] *= inv;
    for (int row = 0; row < n; ++row) {
      if (row == col || m[row][col] == 0) continue;
      const Rational factor = m[row][col];
      for (int c = col; c <= n; ++c) m[row][c] -= factor * m[col][c];
    }
  }
  std::vector<Rational> x(n);
  for (int i = 0; i < n; ++i) x[i] = m[i][n];
  return x;
}

Real to_real(const Rational& q) {
  // Numerator and denominator stay far below 2^64 for k <= 8, so the
  // quotient is correctly rounded in the working precision.
  return boost::multiprecision::numerator(q).convert_to<Real>() /
         boost::multiprecision::denominator(q).convert_to<Real>();
}

}  // namespace

MultistepCoefficients compute_coefficients(int k) {
  require(k >= kMinSteps && k <= kMaxSteps,
          "step count k must lie in [1, 8], got " + std::to_string(k));
  const auto exact = solve_moment_system(k);
  std::vector<Real> scaled;
  scaled.reserve(exact.size());
  for (const auto& q : exact) scaled.push_back(to_real(q));
  return MultistepCoefficients(k, std::move(scaled));
}

std::vector<Real> unscale(const MultistepCoefficients& coeffs, Real dt) {
  require(dt > 0, "time step must be positive");
  std::vector<Real> out;
  out.reserve(coeffs.scaled().size());
  for (Real c : coeffs.scaled()) out.push_back(c / dt);
  return out;
}

}  // namespace fbsde
