#ifndef CTLP_EXAMPLE1_HPP
#define CTLP_EXAMPLE1_HPP

// Worked example on [0, 2] with breakpoints {0, 1, 2}: m = 5, n = 2, optimal
// value -11/3. Indices are 0-based, so "row 3" here is the fourth constraint.

#include <cstddef>
#include <vector>

#include "ctlp/instance.hpp"
#include "ctlp/timefunc.hpp"

namespace ctlp::example1 {

inline const Breakpoints& breakpoints() {
  static const Breakpoints bp({0.0, 1.0, 2.0});
  return bp;
}

inline CTLPInstance instance() {
  const Breakpoints& bp = breakpoints();
  auto k = [&](double v) { return PiecewiseFn::constant(bp, v); };
  auto two = [&](Polynomial left, Polynomial right) { return PiecewiseFn(bp, {std::move(left), std::move(right)}); };
  std::vector<std::vector<PiecewiseFn>> A{
      {k(0), k(-1)},
      {k(-1), k(0)},
      {two({-1}, {1}), two({1}, {-1})},
      {k(1), k(1)},
      {k(0), k(1)},
  };
  std::vector<PiecewiseFn> b{k(0), k(0), k(0), k(3), PiecewiseFn(bp, {Polynomial({0.25, 0.625}), Polynomial({0.25, 0.625})})};
  std::vector<PiecewiseFn> c{two({-1, 1}, {1, -1}), k(-1)};
  return CTLPInstance(std::move(A), std::move(b), std::move(c));
}

inline constexpr double kOptimalValue = -11.0 / 3.0;

inline Vector zbar(const GridNode& node) {
  const double t = node.t;
  const double z2 = 0.25 + 0.625 * t;
  return node.interval == 0 ? Vector{2.75 - 0.625 * t, z2} : Vector{z2, z2};
}

/// Multipliers u >= 0 with c + A'u = 0.
inline Vector ubar(const GridNode& node) {
  const double t = node.t;
  Vector u(5, 0.0);
  if (node.interval == 0)
    u[3] = 1.0 - t;
  else
    u[2] = t - 1.0;
  u[4] = t;
  return u;
}

/// Dual solution w = -u.
inline Vector wbar(const GridNode& node) {
  Vector w = ubar(node);
  for (double& x : w) x = -x;
  return w;
}

/// Slack b - A zbar.
inline Vector ybar(const GridNode& node) {
  const Vector z = zbar(node);
  const double r3 = node.interval == 0 ? z[0] - z[1] : z[1] - z[0];
  return {z[1], z[0], r3, 3.0 - z[0] - z[1], 0.0};
}

template <class Fn>
Trajectory sample(const TimeGrid& grid, Fn fn) {
  std::vector<Vector> values;
  values.reserve(grid.size());
  for (const auto& node : grid) values.push_back(fn(node));
  return Trajectory(grid, std::move(values), Interpolation::PiecewiseLinear);
}

/// Grid with k nodes per interval and a left-limit node at t = 1.
inline TimeGrid grid(std::size_t nodes_per_interval) {
  return refine_grid(breakpoints(), nodes_per_interval).with_left_limits(breakpoints());
}

inline Trajectory zbar_on(const TimeGrid& g) { return sample(g, zbar); }
inline Trajectory ubar_on(const TimeGrid& g) { return sample(g, ubar); }
inline Trajectory wbar_on(const TimeGrid& g) { return sample(g, wbar); }

}  // namespace ctlp::example1

#endif  // CTLP_EXAMPLE1_HPP
