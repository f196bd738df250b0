#include "fbsde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbsde {

namespace {

// Implicit-shift QL on a symmetric tridiagonal matrix, eigenvalues only.
// diag[i] is the diagonal, off[i] couples rows i and i+1 (off[n-1] unused).
void tridiagonal_eigenvalues(std::vector<Real>& diag, std::vector<Real>& off) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return;
  off[n - 1] = 0;
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int l = 0; l < n; ++l) {
    int iterations = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const Real dd = std::fabs(diag[m]) + std::fabs(diag[m + 1]);
        if (std::fabs(off[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++iterations > 100) fail(ErrorCode::NonConvergence, "tridiagonal QL did not converge");

      Real g = (diag[l + 1] - diag[l]) / (2 * off[l]);
      Real r = std::hypot(g, Real(1));
      g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
      Real s = 1, c = 1, p = 0;
      bool deflated = false;
      for (int i = m - 1; i >= l; --i) {
        const Real f = s * off[i];
        const Real b = c * off[i];
        r = std::hypot(f, g);
        off[i + 1] = r;
        if (r == 0) {
          diag[i + 1] -= p;
          off[m] = 0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
      }
      if (deflated) continue;
      diag[l] -= p;
      off[l] = g;
      off[m] = 0;
    } while (m != l);
  }
}

struct HermiteEval {
  Real value;       // orthonormal phi_n(x)
  Real derivative;  // phi_n'(x) = sqrt(2n) phi_{n-1}(x)
  Real christoffel; // sum_{j<n} phi_j(x)^2
};

// Orthonormal Hermite polynomials for the weight exp(-x^2):
// phi_0 = pi^{-1/4}, phi_{j+1} = sqrt(2/(j+1)) x phi_j - sqrt(j/(j+1)) phi_{j-1}.
HermiteEval evaluate_hermite(int n, Real x) {
  Real prev = 0;
  Real cur = 1 / std::sqrt(std::sqrt(std::numbers::pi_v<Real>));
  Real sum_sq = 0;
  for (int j = 0; j < n; ++j) {
    sum_sq += cur * cur;
    const Real next = std::sqrt(Real(2) / (j + 1)) * x * cur -
                      std::sqrt(Real(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return {cur, std::sqrt(Real(2) * n) * prev, sum_sq};
}

}  // namespace

QuadratureRule gauss_hermite(int ng) {
  require(ng >= 1 && ng <= kMaxQuadratureNodes,
          "Gauss-Hermite order must lie in [1, 64], got " + std::to_string(ng));

  std::vector<Real> diag(ng, 0);
  std::vector<Real> off(ng, 0);
  for (int i = 0; i + 1 < ng; ++i) off[i] = std::sqrt(Real(i + 1) / 2);
  tridiagonal_eigenvalues(diag, off);
  std::sort(diag.begin(), diag.end());

  QuadratureRule rule;
  rule.ng = ng;
  rule.nodes.resize(ng);
  rule.weights.resize(ng);
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int i = 0; i < ng; ++i) {
    Real x = diag[i];
    for (int it = 0; it < 8; ++it) {
      const auto h = evaluate_hermite(ng, x);
      const Real step = h.value / h.derivative;
      x -= step;
      if (std::fabs(step) <= 4 * eps * std::max(Real(1), std::fabs(x))) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1 / evaluate_hermite(ng, x).christoffel;
  }

  // Enforce exact mirror symmetry.
  for (int i = 0; i < ng / 2; ++i) {
    const int j = ng - 1 - i;
    const Real x = (rule.nodes[j] - rule.nodes[i]) / 2;
    const Real w = (rule.weights[i] + rule.weights[j]) / 2;
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (ng % 2 == 1) rule.nodes[ng / 2] = 0;
  return rule;
}

}  // namespace fbsde
