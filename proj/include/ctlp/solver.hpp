#ifndef CTLP_SOLVER_HPP
#define CTLP_SOLVER_HPP

// Pointwise solution of the continuous-time LP and its objective functionals.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ctlp/errors.hpp"
#include "ctlp/instance.hpp"
#include "ctlp/linalg.hpp"
#include "ctlp/simplex.hpp"
#include "ctlp/timefunc.hpp"

namespace ctlp {

struct SolveOptions {
  SimplexOptions lp{};
  /// Break ties on a degenerate optimal face by the one-sided Taylor
  /// expansion of c(t), so the chosen vertex is the limit of nearby optima.
  bool limit_consistent = true;
  double stage_slack = 1e-10;
  double pin_dual_tol = 1e-12;
};

/// Grid used by default: k nodes per breakpoint interval plus a left-limit
/// node at every interior breakpoint.
inline TimeGrid solver_grid(const CTLPInstance& inst, std::size_t nodes_per_interval) {
  if (nodes_per_interval < 1) throw InputError("nodes_per_interval must be at least 1");
  return refine_grid(inst.breakpoints(), nodes_per_interval).with_left_limits(inst.breakpoints());
}

/// Solves the finite LP at one node. Duals come from the plain LP; the point
/// may be moved along the optimal face by the tie-break stages.
inline LPSolution pointwise_lp(const CTLPInstance& inst, const GridNode& node, const SolveOptions& opt = {}) {
  const PointData p = inst.at(node);
  const FiniteLP base = p.lp();
  LPSolution first = solve_lp(base, opt.lp);
  if (first.status != LPStatus::Optimal || !opt.limit_consistent) return first;

  const std::size_t n = inst.n();
  const bool from_left = node.t == inst.breakpoints()[node.interval + 1] && node.interval + 1 < inst.breakpoints().size();
  const double s = from_left ? -1.0 : 1.0;

  // Each stage keeps the previous optimal face: rows with a positive stage
  // dual are held tight by a reversed copy with a small slack.
  FiniteLP stage = base;
  std::vector<bool> pinned(base.m(), false);
  auto pin = [&](const LPSolution& sol) {
    const std::size_t rows = stage.m();
    for (std::size_t r = 0; r < rows; ++r) {
      if (pinned[r] || sol.dual[r] <= opt.pin_dual_tol) continue;
      pinned[r] = true;
      DenseMatrix A(stage.m() + 1, n);
      for (std::size_t i = 0; i < stage.m(); ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) = stage.A(i, j);
      for (std::size_t j = 0; j < n; ++j) A(stage.m(), j) = -stage.A(r, j);
      stage.A = std::move(A);
      stage.b.push_back(-stage.b[r] + opt.stage_slack * (1.0 + std::abs(stage.b[r])));
      pinned.push_back(true);
    }
  };
  pin(first);

  Vector z = first.z;
  double sk = 1.0;
  for (std::size_t order = 1; order <= kMaxDataDegree; ++order) {
    sk *= s;
    Vector g = inst.c_derivative(node, order);
    if (norm_inf(g) == 0.0) continue;
    for (double& v : g) v *= sk;
    stage.c = g;
    const LPSolution next = solve_lp(stage, opt.lp);
    if (next.status != LPStatus::Optimal) break;
    z = next.z;
    pin(next);
  }

  first.z = z;
  first.objective = dot(p.c, z);
  first.active_rows = detail::active_rows_of(base, z, opt.lp.feas_tol);
  return first;
}

struct SolveResult {
  LPStatus status = LPStatus::Optimal;
  std::optional<std::size_t> witness_node;
  std::optional<Trajectory> z;
  std::optional<Trajectory> u;
  double objective = 0.0;
  std::vector<LPStatus> per_node_status;
  std::vector<double> node_costs;
  TimeGrid grid;

  bool ok() const noexcept { return status == LPStatus::Optimal; }
};

/// F(z) = integral of c(t)'z(t), with z interpolated per its convention and
/// the piecewise-polynomial product integrated exactly.
inline double objective_value(const CTLPInstance& inst, const Trajectory& z) {
  if (z.dim() != inst.n())
    throw InputError("objective_value: trajectory has dimension " + std::to_string(z.dim()) + ", expected " +
                     std::to_string(inst.n()));
  double total = 0.0;
  for (std::size_t j = 0; j < inst.n(); ++j) total += (inst.c(j) * z.component(j, inst.horizon())).integrate();
  return total;
}

/// G(w) = integral of b(t)'w(t).
inline double dual_objective_value(const CDPInstance& dual, const Trajectory& w) {
  const CTLPInstance& inst = dual.primal();
  if (w.dim() != inst.m())
    throw InputError("dual_objective_value: trajectory has dimension " + std::to_string(w.dim()) + ", expected " +
                     std::to_string(inst.m()));
  double total = 0.0;
  for (std::size_t i = 0; i < inst.m(); ++i) total += (inst.b(i) * w.component(i, inst.horizon())).integrate();
  return total;
}

inline SolveResult solve(const CTLPInstance& inst, const TimeGrid& grid, const SolveOptions& opt = {}) {
  if (grid.empty()) throw InputError("solve: empty grid");
  for (const auto& node : grid)
    if (!inst.breakpoints().contains(node.t)) throw InputError("solve: grid node outside [0, T]");
  if (!grid.contains_breakpoints(inst.breakpoints())) throw InputError("solve: grid must contain every breakpoint");

  SolveResult res;
  res.grid = grid;
  std::vector<Vector> zs, us;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const LPSolution sol = pointwise_lp(inst, grid[k], opt);
    res.per_node_status.push_back(sol.status);
    if (sol.status != LPStatus::Optimal) {
      if (!res.witness_node) {
        res.witness_node = k;
        res.status = sol.status;
      }
      continue;
    }
    zs.push_back(sol.z);
    us.push_back(sol.dual);
    res.node_costs.push_back(sol.objective);
  }
  if (!res.ok()) {
    res.node_costs.clear();
    return res;
  }
  res.z = Trajectory(grid, std::move(zs), Interpolation::PiecewiseLinear);
  res.u = Trajectory(grid, std::move(us), Interpolation::PiecewiseLinear);
  res.objective = objective_value(inst, *res.z);
  return res;
}

inline SolveResult solve(const CTLPInstance& inst, std::size_t nodes_per_interval, const SolveOptions& opt = {}) {
  return solve(inst, solver_grid(inst, nodes_per_interval), opt);
}

}  // namespace ctlp

#endif  // CTLP_SOLVER_HPP
