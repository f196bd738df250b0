#include "fbsde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fbsde/error.hpp"

namespace fbsde {

SpaceGrid::SpaceGrid(Real anchor, Real spacing, long first_offset, std::size_t count)
    : anchor_(anchor), spacing_(spacing), first_offset_(first_offset), count_(count) {}

SpaceGrid make_grid(Real x0, Real h, Real lo, Real hi, std::size_t min_points) {
  require(h > 0 && is_finite(h), "grid spacing must be positive");
  require(lo < hi, "grid bounds must satisfy lo < hi");
  // Tolerate bounds that sit on a grid line up to rounding.
  const Real slack = 64 * std::numeric_limits<Real>::epsilon();
  const long first = static_cast<long>(std::floor((lo - x0) / h + slack));
  const long last = static_cast<long>(std::ceil((hi - x0) / h - slack));
  const std::size_t count = last >= first ? static_cast<std::size_t>(last - first + 1) : 0;
  if (count < min_points) {
    std::ostringstream msg;
    msg << "too few grid points: bounds [" << lo << ", " << hi << "] with spacing " << h
        << " give " << count << ", need " << min_points;
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  require(lo < x0 && x0 < hi, "anchor x0 must lie strictly inside the bounds");
  return SpaceGrid(x0, h, first, count);
}

SpaceGrid build_grid(Real x0, Real dt, int k, int r, Real lo, Real hi) {
  require(dt > 0 && dt < 1, "time step must lie in (0, 1) for the balanced spacing");
  require(k >= 1, "step count must be positive");
  require(r >= k, "interpolation degree r must be at least k");
  const Real h = std::pow(dt, Real(k + 1) / Real(r + 1));
  return make_grid(x0, h, lo, hi, static_cast<std::size_t>(r) + 1);
}

std::size_t GridFunction::first_non_finite() const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!is_finite(values[i])) return i;
  return values.size();
}

IndexRange neighbor_stencil(const SpaceGrid& grid, Real x, int ni) {
  require(ni >= 0 && ni <= kMaxInterpolationDegree, "interpolation degree out of range");
  const std::size_t count = static_cast<std::size_t>(ni) + 1;
  require(count <= grid.size(), "stencil larger than the grid");
  const long max_start = static_cast<long>(grid.size() - count);

  Real u = (x - grid.lo()) / grid.spacing();
  u = std::clamp(u, Real(-1), static_cast<Real>(grid.size()));  // keeps the cast defined
  long start = 0;
  if (ni % 2 == 1) {
    const long cell = static_cast<long>(std::floor(u));
    start = cell - (ni - 1) / 2;
  } else {
    const long nearest = static_cast<long>(std::ceil(u - Real(0.5)));
    start = nearest - ni / 2;
  }
  start = std::clamp(start, 0L, max_start);
  return {static_cast<std::size_t>(start), count};
}

LagrangeInterpolator::LagrangeInterpolator(const SpaceGrid& grid, int ni, BoundaryPolicy policy)
    : grid_(grid), ni_(ni), policy_(policy) {
  require(ni >= 0 && ni <= kMaxInterpolationDegree, "interpolation degree out of range");
  require(static_cast<std::size_t>(ni) + 1 <= grid.size(), "grid has fewer points than the stencil");
  Real binom = 1;  // C(ni, i)
  for (int i = 0; i <= ni; ++i) {
    bary_[i] = (i % 2 == 0) ? binom : -binom;
    binom = binom * (ni - i) / (i + 1);
  }
}

StencilWeights LagrangeInterpolator::weights_at(Real x) const {
  if (!is_finite(x)) fail(ErrorCode::Diverged, "non-finite interpolation point");
  if (policy_ == BoundaryPolicy::Clamp) {
    x = std::clamp(x, grid_.lo(), grid_.hi());
  } else if (policy_ == BoundaryPolicy::Strict &&
             !(x >= grid_.lo() - grid_.spacing() && x <= grid_.hi() + grid_.spacing())) {
    std::ostringstream msg;
    msg << "interpolation point " << x << " outside [" << grid_.lo() - grid_.spacing() << ", "
        << grid_.hi() + grid_.spacing() << "]";
    fail(ErrorCode::OutOfDomain, msg.str());
  }

  StencilWeights out;
  out.range = neighbor_stencil(grid_, x, ni_);
  Real diffs[kMaxInterpolationDegree + 1];
  for (std::size_t i = 0; i < out.range.count; ++i) {
    diffs[i] = x - grid_.point(out.range.first + i);
    if (diffs[i] == 0) {
      out.w[i] = 1;
      return out;
    }
  }
  Real sum = 0;
  for (std::size_t i = 0; i < out.range.count; ++i) {
    out.w[i] = bary_[i] / diffs[i];
    sum += out.w[i];
  }
  for (std::size_t i = 0; i < out.range.count; ++i) out.w[i] /= sum;
  return out;
}

Real interpolate(const GridFunction& f, Real x, int ni) {
  return LagrangeInterpolator(f.grid, ni, BoundaryPolicy::Strict)(f, x);
}

}  // namespace fbsde
