#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "doctest.h"
#include "fbsde/coeffs.hpp"
#include "fbsde/error.hpp"

using namespace fbsde;
using Rational = boost::multiprecision::cpp_rational;

namespace {

// alpha_{k,0} dt = -H_k, alpha_{k,i} dt = (-1)^(i+1) C(k,i) / i.
Rational closed_form(int k, int i) {
  if (i == 0) {
    Rational h = 0;
    for (int j = 1; j <= k; ++j) h += Rational(1, j);
    return -h;
  }
  boost::multiprecision::cpp_int binom = 1;
  for (int j = 1; j <= i; ++j) binom = binom * (k - j + 1) / j;
  Rational v(binom, i);
  return i % 2 ? v : Rational(-v);
}

}  // namespace

TEST_CASE("coefficients match the closed form for every supported k") {
  for (int k = kMinSteps; k <= kMaxSteps; ++k) {
    const auto c = compute_coefficients(k);
    REQUIRE(c.k() == k);
    REQUIRE(c.scaled().size() == static_cast<std::size_t>(k + 1));
    for (int i = 0; i <= k; ++i) {
      const Real want = static_cast<Real>(closed_form(k, i).convert_to<long double>());
      CHECK(std::fabs(c[i] - want) <= 1e-13 * std::max<Real>(1, std::fabs(want)));
    }
  }
}

TEST_CASE("coefficients match the standard backward-difference table") {
  const std::vector<std::vector<double>> table{
      {-1, 1},
      {-1.5, 2, -0.5},
      {-11.0 / 6, 3, -1.5, 1.0 / 3},
      {-25.0 / 12, 4, -3, 4.0 / 3, -0.25},
      {-137.0 / 60, 5, -5, 10.0 / 3, -1.25, 0.2},
      {-49.0 / 20, 6, -7.5, 20.0 / 3, -3.75, 1.2, -1.0 / 6},
  };
  for (int k = 1; k <= 6; ++k)
    for (int i = 0; i <= k; ++i)
      CHECK(std::fabs(static_cast<double>(compute_coefficients(k)[i]) - table[k - 1][i]) < 1e-12);
}

TEST_CASE("moment conditions hold: sum i^j c_i = [j == 1]") {
  for (int k = 1; k <= kMaxSteps; ++k) {
    const auto c = compute_coefficients(k);
    for (int j = 0; j <= k; ++j) {
      Real s = 0;
      for (int i = 0; i <= k; ++i) s += std::pow(Real(i), j) * c[i];
      CHECK(std::fabs(s - (j == 1 ? 1 : 0)) < 1e-9);
    }
  }
}

TEST_CASE("out-of-range k is rejected") {
  CHECK_THROWS_AS(compute_coefficients(0), Error);
  CHECK_THROWS_AS(compute_coefficients(9), Error);
  try {
    compute_coefficients(-1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("unscale divides by dt") {
  const auto c = compute_coefficients(3);
  const auto a = unscale(c, Real(0.25));
  REQUIRE(a.size() == 4);
  for (int i = 0; i <= 3; ++i) CHECK(a[i] == doctest::Approx(static_cast<double>(c[i] * 4)));
  CHECK_THROWS_AS(unscale(c, 0), Error);
  CHECK_THROWS_AS(unscale(c, -1), Error);
}
