#include "fbsde/scheme.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <limits>
#include <sstream>

#include "fbsde/parallel.hpp"

namespace fbsde {

void IterationStats::merge(const IterationStats& other) {
  outer_total += other.outer_total;
  outer_max = std::max(outer_max, other.outer_max);
  y_total += other.y_total;
  y_max = std::max(y_max, other.y_max);
  points += other.points;
}

void validate(const SolverConfig& cfg, const ProblemSpec& problem) {
  require(cfg.k >= kMinSteps && cfg.k <= kMaxSteps, "k must lie in [1, 8]");
  require(cfg.ng >= 2 && cfg.ng <= kMaxQuadratureNodes, "ng must lie in [2, 64]");
  require(cfg.ni >= 1 && cfg.ni <= kMaxInterpolationDegree, "ni must lie in [1, 32]");
  require(cfg.r >= 1, "balancing degree r must be positive");
  require(cfg.epsilon0 > 0, "epsilon0 must be positive");
  require(cfg.max_iters >= 1, "max_iters must be at least 1");
  require(cfg.y_solver != YSolver::Newton || problem.has_generator_dy(),
          "Newton Y-solve needs df/dy, which problem '" + problem.name + "' does not supply");
}

std::vector<LevelState> warm_start(const ProblemSpec& problem, const SpaceGrid& grid,
                                   const TimeGrid& tgrid, int k) {
  if (!problem.exact)
    fail(ErrorCode::MissingExact, "problem '" + problem.name + "' has no exact solution to warm-start from");
  require(k >= 1 && k <= tgrid.steps, "warm start needs 1 <= k <= N");
  const auto& ex = *problem.exact;
  std::vector<LevelState> levels;
  for (int n = tgrid.steps - k + 1; n <= tgrid.steps; ++n) {
    const Real t = tgrid.at(n);
    LevelState s{n, GridFunction(grid), GridFunction(grid), GridFunction(grid), GridFunction(grid)};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Real x = grid.point(i);
      s.y.values[i] = ex.y(t, x);
      s.z.values[i] = ex.z(t, x);
      s.a.values[i] = ex.a(t, x);
      s.gamma.values[i] = ex.gamma(t, x);
    }
    levels.push_back(std::move(s));
  }
  return levels;
}

struct BackwardStepper::Expectations {
  // Per j = 1..k: E[Y], E[Y dW], E[Z], E[Z dW] of the level n+j fields at
  // the propagated points, then the same four with absolute values inside.
  std::array<std::array<Real, 8>, kMaxSteps> moments{};
};

BackwardStepper::BackwardStepper(const ProblemSpec& problem, const SolverConfig& cfg,
                                 const SpaceGrid& grid, const TimeGrid& tgrid)
    : problem_(problem),
      cfg_(cfg),
      grid_(grid),
      tgrid_(tgrid),
      rule_(gauss_hermite(cfg.ng)),
      interp_(grid, cfg.ni, cfg.boundary),
      alpha_(unscale(compute_coefficients(cfg.k), tgrid.dt())) {
  validate(cfg, problem);
}

void BackwardStepper::check_history(std::span<const LevelState> history, int n) const {
  require(static_cast<int>(history.size()) >= cfg_.k, "history must hold k future levels");
  for (int j = 1; j <= cfg_.k; ++j) {
    const auto& lvl = history[static_cast<std::size_t>(j - 1)];
    require(lvl.n == n + j, "history out of order: expected level " + std::to_string(n + j));
    require(lvl.y.grid == grid_ && lvl.z.grid == grid_, "history level on a different grid");
  }
}

void BackwardStepper::gather(std::span<const LevelState> history, Real x, Real drift,
                             Real diffusion, Expectations& out) const {
  const Real dt = tgrid_.dt();
  for (int j = 1; j <= cfg_.k; ++j) {
    const auto& lvl = history[static_cast<std::size_t>(j - 1)];
    const Real dtj = j * dt;
    const Real center = x + drift * dtj;
    out.moments[j - 1] = expect_increment(rule_, dtj, [&](Real dw) {
      const StencilWeights sw = interp_.weights_at(center + diffusion * dw);
      const Real y = sw.apply(lvl.y.values);
      const Real z = sw.apply(lvl.z.values);
      const Real ay = std::fabs(y), az = std::fabs(z), adw = std::fabs(dw);
      return std::array<Real, 8>{y, y * dw, z, z * dw, ay, ay * adw, az, az * adw};
    });
  }
}

namespace {

// Iterates may stall this many ulps (of the summed terms) above epsilon0
// before they count as converged.
constexpr Real kRoundoffSlack = 1024;

struct Assembled {
  PointValues v;     // y left at 0, solved afterwards
  Real rhs = 0;      // sum_{j>=1} alpha_j E[Y]
  PointValues noise; // rounding floor of each component
};

Assembled assemble(std::span<const Real> alpha, int k,
                   const std::array<std::array<Real, 8>, kMaxSteps>& moments) {
  Assembled out;
  Real mass_y = 0;
  for (int j = 1; j <= k; ++j) {
    const auto& m = moments[static_cast<std::size_t>(j - 1)];
    const Real aj = alpha[static_cast<std::size_t>(j)];
    out.rhs += aj * m[0];
    out.v.z += aj * m[1];
    out.v.a += aj * m[2];
    out.v.gamma += aj * m[3];
    mass_y += std::fabs(aj) * m[4];
    out.noise.z += std::fabs(aj) * m[5];
    out.noise.a += std::fabs(aj) * m[6];
    out.noise.gamma += std::fabs(aj) * m[7];
  }
  // The j = 0 term of A sits at x itself and uses the Z just computed.
  out.v.a += alpha[0] * out.v.z;
  out.noise.a += std::fabs(alpha[0]) * out.noise.z;
  out.noise.y = mass_y / std::fabs(alpha[0]);
  const Real ulp = std::numeric_limits<Real>::epsilon() * kRoundoffSlack;
  out.noise.y *= ulp;
  out.noise.z *= ulp;
  out.noise.a *= ulp;
  out.noise.gamma *= ulp;
  return out;
}

Real ulp_of(Real v) { return kRoundoffSlack * std::numeric_limits<Real>::epsilon() * std::fabs(v); }

std::string point_context(int n, std::size_t i, Real x) {
  std::ostringstream os;
  os << "level " << n << ", grid point " << i << " (x = " << x << ")";
  return os.str();
}

void check_finite(const PointValues& v) {
  if (!is_finite(v.y) || !is_finite(v.z) || !is_finite(v.gamma) || !is_finite(v.a))
    fail(ErrorCode::Diverged, "non-finite solution value");
}

LevelState empty_level(int n, const SpaceGrid& grid) {
  return LevelState{n, GridFunction(grid), GridFunction(grid), GridFunction(grid), GridFunction(grid)};
}

void store(LevelState& s, std::size_t i, const PointValues& v) {
  s.y.values[i] = v.y;
  s.z.values[i] = v.z;
  s.a.values[i] = v.a;
  s.gamma.values[i] = v.gamma;
}

IterationStats reduce(const std::vector<int>& outer, const std::vector<int>& inner) {
  IterationStats st;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    st.outer_total += outer[i];
    st.outer_max = std::max(st.outer_max, outer[i]);
    st.y_total += inner[i];
    st.y_max = std::max(st.y_max, inner[i]);
  }
  st.points = static_cast<long>(inner.size());
  return st;
}

}  // namespace

LevelState BackwardStepper::decoupled_step(std::span<const LevelState> history, int n,
                                           IterationStats* stats) const {
  require(!problem_.coupled, "decoupled step called on coupled problem '" + problem_.name + "'");
  check_history(history, n);
  const Real t = tgrid_.at(n);
  const int k = cfg_.k;
  LevelState out = empty_level(n, grid_);
  std::vector<int> y_iters(grid_.size(), 0);
  const auto& next = history[0];

  parallel_for(grid_.size(), [&](std::size_t i) {
    const Real x = grid_.point(i);
    try {
      Expectations e;
      gather(history, x, problem_.drift(t, x, 0, 0, 0), problem_.diffusion(t, x, 0, 0, 0), e);
      const Assembled as = assemble(alpha_, k, e.moments);
      PointValues v = as.v;
      const Real rhs = as.rhs;
      const auto ys = solve_y(
          cfg_, alpha_[0], rhs,
          [&](Real y) { return problem_.generator(t, x, y, v.z, v.gamma); },
          [&](Real y) { return problem_.generator_dy(t, x, y, v.z, v.gamma); },
          next.y.values[i]);
      v.y = ys.y;
      y_iters[i] = ys.iterations;
      check_finite(v);
      store(out, i, v);
    } catch (const Error& err) {
      throw err.with_context(point_context(n, i, x));
    }
  });
  if (stats) stats->merge(reduce(std::vector<int>(grid_.size(), 0), y_iters));
  return out;
}

LevelState BackwardStepper::coupled_step(std::span<const LevelState> history, int n,
                                         IterationStats* stats) const {
  check_history(history, n);
  const Real t = tgrid_.at(n);
  const int k = cfg_.k;
  LevelState out = empty_level(n, grid_);
  std::vector<int> outer_iters(grid_.size(), 0);
  std::vector<int> y_iters(grid_.size(), 0);
  const auto& next = history[0];

  parallel_for(grid_.size(), [&](std::size_t i) {
    const Real x = grid_.point(i);
    try {
      PointValues cur{next.y.values[i], next.z.values[i], next.gamma.values[i], next.a.values[i]};
      for (int l = 1;; ++l) {
        if (l > cfg_.max_iters)
          fail(ErrorCode::NonConvergence, "coupled fixed point did not converge in " +
                                              std::to_string(cfg_.max_iters) + " sweeps");
        Expectations e;
        gather(history, x, problem_.drift(t, x, cur.y, cur.z, cur.gamma),
               problem_.diffusion(t, x, cur.y, cur.z, cur.gamma), e);
        const Assembled as = assemble(alpha_, k, e.moments);
        PointValues v = as.v;
        const Real rhs = as.rhs;
        const auto ys = solve_y(
            cfg_, alpha_[0], rhs,
            [&](Real y) { return problem_.generator(t, x, y, v.z, v.gamma); },
            [&](Real y) { return problem_.generator_dy(t, x, y, v.z, v.gamma); },
            next.y.values[i]);
        v.y = ys.y;
        y_iters[i] += ys.iterations;
        check_finite(v);
        const Real eps = cfg_.epsilon0;
        const bool settled = std::fabs(v.y - cur.y) < eps + as.noise.y + ulp_of(v.y) &&
                             std::fabs(v.z - cur.z) < eps + as.noise.z &&
                             std::fabs(v.a - cur.a) < eps + as.noise.a &&
                             std::fabs(v.gamma - cur.gamma) < eps + as.noise.gamma;
        cur = v;
        if (settled) {
          outer_iters[i] = l;
          break;
        }
      }
      store(out, i, cur);
    } catch (const Error& err) {
      throw err.with_context(point_context(n, i, x));
    }
  });
  if (stats) stats->merge(reduce(outer_iters, y_iters));
  return out;
}

LevelState decoupled_step(const ProblemSpec& problem, const SolverConfig& cfg,
                          const SpaceGrid& grid, std::span<const LevelState> history,
                          const TimeGrid& tgrid, int n) {
  return BackwardStepper(problem, cfg, grid, tgrid).decoupled_step(history, n);
}

LevelState coupled_step(const ProblemSpec& problem, const SolverConfig& cfg,
                        const SpaceGrid& grid, std::span<const LevelState> history,
                        const TimeGrid& tgrid, int n) {
  return BackwardStepper(problem, cfg, grid, tgrid).coupled_step(history, n);
}

RunResult run_backward(const ProblemSpec& problem, const SolverConfig& cfg, const SpaceGrid& grid,
                       const TimeGrid& tgrid, const RunOptions& options) {
  validate(cfg, problem);
  require(tgrid.steps >= cfg.k, "need at least k time steps");
  require(tgrid.horizon > tgrid.t0, "time horizon must exceed t0");

  const BackwardStepper stepper(problem, cfg, grid, tgrid);
  auto warm = warm_start(problem, grid, tgrid, cfg.k);

  RunResult result;
  // window[0] is level n+1, window[k-1] is level n+k.
  std::vector<LevelState> window(std::make_move_iterator(warm.begin()),
                                std::make_move_iterator(warm.end()));
  if (options.keep_history) {
    result.history.assign(window.rbegin(), window.rend());  // descending n while stepping
  }
  for (int n = tgrid.steps - cfg.k; n >= 0; --n) {
    LevelState level = problem.coupled ? stepper.coupled_step(window, n, &result.stats)
                                       : stepper.decoupled_step(window, n, &result.stats);
    if (options.keep_history) result.history.push_back(level);
    window.pop_back();
    window.insert(window.begin(), std::move(level));
  }
  if (options.keep_history) std::reverse(result.history.begin(), result.history.end());

  result.level0 = std::move(window.front());
  const std::size_t i0 = grid.anchor_index();
  result.at_x0 = {result.level0.y.values[i0], result.level0.z.values[i0],
                  result.level0.gamma.values[i0], result.level0.a.values[i0]};
  return result;
}

}  // namespace fbsde
