#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fbsde/real.hpp"

namespace fbsde {

inline constexpr int kMaxInterpolationDegree = 32;

/// Uniform partition x_j = anchor + j*h restricted to a truncation box.
/// Stored indices run 0..size()-1; the anchor sits at anchor_index().
class SpaceGrid {
 public:
  SpaceGrid() = default;
  SpaceGrid(Real anchor, Real spacing, long first_offset, std::size_t count);

  Real anchor() const { return anchor_; }
  Real spacing() const { return spacing_; }
  std::size_t size() const { return count_; }
  Real point(std::size_t i) const {
    return anchor_ + static_cast<Real>(first_offset_ + static_cast<long>(i)) * spacing_;
  }
  Real lo() const { return point(0); }
  Real hi() const { return point(count_ - 1); }
  std::size_t anchor_index() const { return static_cast<std::size_t>(-first_offset_); }

  bool operator==(const SpaceGrid&) const = default;

 private:
  Real anchor_ = 0;
  Real spacing_ = 1;
  long first_offset_ = 0;  // j of the first stored point (<= 0)
  std::size_t count_ = 0;
};

/// Grid with spacing h anchored at x0, covering [lo, hi] snapped outward to
/// whole multiples of h. Requires lo < x0 < hi and at least min_points points.
SpaceGrid make_grid(Real x0, Real h, Real lo, Real hi, std::size_t min_points);

/// h = dt^((k+1)/(r+1)); see make_grid. Needs dt in (0,1), r >= k, and
/// at least r+1 points in the box.
SpaceGrid build_grid(Real x0, Real dt, int k, int r, Real lo, Real hi);

/// Sampled values of one unknown on a grid.
struct GridFunction {
  SpaceGrid grid;
  std::vector<Real> values;

  GridFunction() = default;
  explicit GridFunction(const SpaceGrid& g, Real fill = 0) : grid(g), values(g.size(), fill) {}

  /// Index of the first non-finite entry, or size() if all are finite.
  std::size_t first_non_finite() const;
};

struct IndexRange {
  std::size_t first = 0;
  std::size_t count = 0;
  bool operator==(const IndexRange&) const = default;
};

/// ni+1 contiguous indices nearest to x, clamped into the grid. For odd ni
/// the stencil is centred on x's cell; for even ni on the nearest point,
/// ties going left.
IndexRange neighbor_stencil(const SpaceGrid& grid, Real x, int ni);

enum class BoundaryPolicy {
  Extrapolate,  // the edge stencil's polynomial is evaluated past the box
  Clamp,        // query points outside [lo, hi] are moved onto the nearest edge
  Strict,       // points beyond [lo - h, hi + h] raise OutOfDomain
};

/// Lagrange basis values on a stencil; apply() contracts them with samples.
struct StencilWeights {
  IndexRange range;
  std::array<Real, kMaxInterpolationDegree + 1> w{};

  Real apply(std::span<const Real> values) const {
    Real s = 0;
    for (std::size_t i = 0; i < range.count; ++i) s += w[i] * values[range.first + i];
    return s;
  }
};

/// Local Lagrange interpolation of fixed degree over one grid (barycentric
/// form with the equispaced weights (-1)^i C(ni, i)).
class LagrangeInterpolator {
 public:
  LagrangeInterpolator(const SpaceGrid& grid, int ni, BoundaryPolicy policy = BoundaryPolicy::Strict);

  StencilWeights weights_at(Real x) const;
  Real operator()(const GridFunction& f, Real x) const { return weights_at(x).apply(f.values); }

  int degree() const { return ni_; }
  const SpaceGrid& grid() const { return grid_; }

 private:
  SpaceGrid grid_;
  int ni_;
  BoundaryPolicy policy_;
  std::array<Real, kMaxInterpolationDegree + 1> bary_{};
};

/// Degree-ni interpolant of f through neighbor_stencil(x), evaluated at x.
/// Throws OutOfDomain outside [lo - h, hi + h].
Real interpolate(const GridFunction& f, Real x, int ni);

}  // namespace fbsde
