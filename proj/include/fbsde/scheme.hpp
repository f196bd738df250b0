#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fbsde/coeffs.hpp"
#include "fbsde/error.hpp"
#include "fbsde/grid.hpp"
#include "fbsde/problems.hpp"
#include "fbsde/quadrature.hpp"
#include "fbsde/real.hpp"

namespace fbsde {

enum class YSolver { Picard, Newton };

struct SolverConfig {
  int k = 1;         // steps in the backward stencil
  int ng = 10;       // Gauss-Hermite nodes
  int ni = 5;        // Lagrange degree (stencil of ni+1 points)
  int r = 5;         // degree used to balance h = dt^((k+1)/(r+1))
  Real epsilon0 = kDefaultEpsilon0;
  int max_iters = 200;
  YSolver y_solver = YSolver::Picard;
  BoundaryPolicy boundary = BoundaryPolicy::Extrapolate;
};

/// Throws InvalidArgument on an out-of-range field, or when Newton is chosen
/// for a problem without df/dy.
void validate(const SolverConfig& cfg, const ProblemSpec& problem);

/// Uniform partition t_n = t0 + n*dt, dt = (horizon - t0)/steps.
struct TimeGrid {
  Real t0 = 0;
  Real horizon = 1;
  int steps = 1;

  Real dt() const { return (horizon - t0) / steps; }
  Real at(int n) const { return n == steps ? horizon : t0 + n * dt(); }
};

/// The four unknowns sampled on the space grid at time level n.
struct LevelState {
  int n = 0;
  GridFunction y;
  GridFunction z;
  GridFunction a;
  GridFunction gamma;
};

struct PointValues {
  Real y = 0;
  Real z = 0;
  Real gamma = 0;
  Real a = 0;
};

struct IterationStats {
  long outer_total = 0;  // coupled fixed-point sweeps
  int outer_max = 0;
  long y_total = 0;      // implicit Y updates
  int y_max = 0;
  long points = 0;

  void merge(const IterationStats& other);
};

/// Levels N-k+1..N (ascending n) sampled from the exact solution.
/// Throws MissingExact if the problem has none.
std::vector<LevelState> warm_start(const ProblemSpec& problem, const SpaceGrid& grid,
                                   const TimeGrid& tgrid, int k);

struct YSolveResult {
  Real y = 0;
  int iterations = 0;
};

/// Solves -alpha0 * y = rhs_known + f(y) for y.
///   Picard: alpha0 y_{l+1} = -rhs_known - f(y_l)
///   Newton: y_{l+1} = y_l - (alpha0 y_l + rhs_known + f(y_l)) / (alpha0 + f_y(y_l))
/// stopping once |y_{l+1} - y_l| <= epsilon0 + 64 ulp(y_{l+1}).
/// Throws NonConvergence after max_iters, SingularDenominator when
/// |alpha0 + f_y| < 1e-14, Diverged on a non-finite iterate.
template <class F, class Fy>
YSolveResult solve_y(const SolverConfig& cfg, Real alpha0, Real rhs_known, F&& f, Fy&& f_dy,
                     Real y_init) {
  Real y = y_init;
  for (int l = 1; l <= cfg.max_iters; ++l) {
    Real next;
    if (cfg.y_solver == YSolver::Newton) {
      const Real den = alpha0 + f_dy(y);
      if (!(std::fabs(den) >= Real(1e-14)))
        fail(ErrorCode::SingularDenominator, "Newton denominator alpha0 + f_y vanished");
      next = y - (alpha0 * y + rhs_known + f(y)) / den;
    } else {
      next = -(rhs_known + f(y)) / alpha0;
    }
    if (!is_finite(next)) fail(ErrorCode::Diverged, "implicit Y iterate is not finite");
    const Real delta = std::fabs(next - y);
    y = next;
    if (delta <= cfg.epsilon0 + 64 * std::numeric_limits<Real>::epsilon() * std::fabs(y))
      return {y, l};
  }
  fail(ErrorCode::NonConvergence,
       "implicit Y solve did not converge in " + std::to_string(cfg.max_iters) + " iterations");
}

/// Precomputed state for stepping one problem on one space-time partition.
class BackwardStepper {
 public:
  BackwardStepper(const ProblemSpec& problem, const SolverConfig& cfg, const SpaceGrid& grid,
                  const TimeGrid& tgrid);

  /// history[j-1] holds level n+j, j = 1..k.
  LevelState decoupled_step(std::span<const LevelState> history, int n,
                            IterationStats* stats = nullptr) const;
  LevelState coupled_step(std::span<const LevelState> history, int n,
                          IterationStats* stats = nullptr) const;

  const SpaceGrid& grid() const { return grid_; }
  std::span<const Real> alpha() const { return alpha_; }

 private:
  struct Expectations;

  void check_history(std::span<const LevelState> history, int n) const;
  void gather(std::span<const LevelState> history, Real x, Real drift, Real diffusion,
              Expectations& out) const;

  ProblemSpec problem_;
  SolverConfig cfg_;
  SpaceGrid grid_;
  TimeGrid tgrid_;
  QuadratureRule rule_;
  LagrangeInterpolator interp_;
  std::vector<Real> alpha_;  // unscaled alpha_{k,i}
};

/// One level of the decoupled scheme (Euler-propagated nodes, Gauss-Hermite
/// expectations, Lagrange interpolation, implicit Y solve).
LevelState decoupled_step(const ProblemSpec& problem, const SolverConfig& cfg,
                          const SpaceGrid& grid, std::span<const LevelState> history,
                          const TimeGrid& tgrid, int n);

/// One level of the coupled fixed-point scheme.
LevelState coupled_step(const ProblemSpec& problem, const SolverConfig& cfg,
                        const SpaceGrid& grid, std::span<const LevelState> history,
                        const TimeGrid& tgrid, int n);

struct RunOptions {
  bool keep_history = false;
};

struct RunResult {
  LevelState level0;
  PointValues at_x0;        // level-0 values at the grid anchor
  std::vector<LevelState> history;  // levels 0..N when keep_history is set
  IterationStats stats;
};

/// Warm-starts the top k levels from the exact solution and steps n = N-k..0,
/// using the coupled stepper when problem.coupled is set.
RunResult run_backward(const ProblemSpec& problem, const SolverConfig& cfg, const SpaceGrid& grid,
                       const TimeGrid& tgrid, const RunOptions& options = {});

}  // namespace fbsde
