#ifndef CTLP_INSTANCE_HPP
#define CTLP_INSTANCE_HPP

// Continuous-time LP data  min ∫ c(t)^T z(t) dt  s.t.  A(t) z(t) <= b(t),
// its dual marker type, and sampled trajectories.
//
// "Almost everywhere" statements are checked on grid nodes only: every
// residual and certificate in this library is a statement about the nodes
// of some TimeGrid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctlp/errors.hpp"
#include "ctlp/linalg.hpp"
#include "ctlp/simplex.hpp"
#include "ctlp/timefunc.hpp"

namespace ctlp {

/// Problem data frozen at one time instant.
struct PointData {
  DenseMatrix A;
  Vector b;
  Vector c;

  FiniteLP lp() const { return FiniteLP{A, b, c}; }
};

class CTLPInstance {
 public:
  /// Validates dimensions, merges all breakpoint sets into one and computes
  /// the data bound K on an audit grid.
  CTLPInstance(std::vector<std::vector<PiecewiseFn>> A, std::vector<PiecewiseFn> b, std::vector<PiecewiseFn> c)
      : bp_(Breakpoints({0.0, 1.0})) {
    const std::size_t m = b.size();
    const std::size_t n = c.size();
    if (n == 0) throw InputError("instance: n must be positive");
    if (A.size() != m)
      throw InputError("instance: A has " + std::to_string(A.size()) + " rows, b has " + std::to_string(m));
    for (std::size_t i = 0; i < m; ++i)
      if (A[i].size() != n)
        throw InputError("instance: A row " + std::to_string(i) + " has " + std::to_string(A[i].size()) +
                         " entries, expected " + std::to_string(n));

    const double T = c.front().horizon();
    auto all = [&](auto&& fn) {
      for (auto& row : A)
        for (auto& f : row) fn(f);
      for (auto& f : b) fn(f);
      for (auto& f : c) fn(f);
    };
    std::optional<Breakpoints> merged;
    all([&](const PiecewiseFn& f) {
      if (f.horizon() != T) throw InputError("instance: entries disagree on the horizon T");
      if (f.max_degree() > kMaxDataDegree)
        throw InputError("instance: polynomial degree above " + std::to_string(kMaxDataDegree));
      merged = merged ? merge(*merged, f.breakpoints()) : f.breakpoints();
    });
    bp_ = *merged;
    all([&](PiecewiseFn& f) {
      if (!(f.breakpoints() == bp_)) f = f.refined(bp_);
    });
    A_ = std::move(A);
    b_ = std::move(b);
    c_ = std::move(c);
    data_bound_ = compute_data_bound();
  }

  double horizon() const noexcept { return bp_.horizon(); }
  std::size_t m() const noexcept { return b_.size(); }
  std::size_t n() const noexcept { return c_.size(); }
  const Breakpoints& breakpoints() const noexcept { return bp_; }
  const PiecewiseFn& a(std::size_t i, std::size_t j) const { return A_.at(i).at(j); }
  const PiecewiseFn& b(std::size_t i) const { return b_.at(i); }
  const PiecewiseFn& c(std::size_t j) const { return c_.at(j); }

  /// K with ||A(t)||, ||b(t)||, ||c(t)|| <= K (spectral / Euclidean norms)
  /// on the audit grid.
  double data_bound() const noexcept { return data_bound_; }

  PointData at(const GridNode& node) const {
    PointData p{DenseMatrix(m(), n()), Vector(m()), Vector(n())};
    for (std::size_t i = 0; i < m(); ++i) {
      for (std::size_t j = 0; j < n(); ++j) p.A(i, j) = A_[i][j].eval(node);
      p.b[i] = b_[i].eval(node);
    }
    for (std::size_t j = 0; j < n(); ++j) p.c[j] = c_[j].eval(node);
    return p;
  }

  PointData at(double t) const { return at(GridNode{t, bp_.locate(t)}); }

  /// k-th time derivative of c on the node's piece.
  Vector c_derivative(const GridNode& node, std::size_t order) const {
    Vector d(n());
    for (std::size_t j = 0; j < n(); ++j) d[j] = c_[j].derivative(node, order);
    return d;
  }

  /// Audit grid used for K: 16 nodes per interval, both sides of every jump.
  TimeGrid audit_grid() const { return refine_grid(bp_, 16).with_left_limits(bp_); }

 private:
  double compute_data_bound() const {
    double K = 0.0;
    for (const auto& node : audit_grid()) {
      const PointData p = at(node);
      K = std::max({K, spectral_norm(p.A), norm2(p.b), norm2(p.c)});
    }
    return K;
  }

  Breakpoints bp_;
  std::vector<std::vector<PiecewiseFn>> A_;
  std::vector<PiecewiseFn> b_;
  std::vector<PiecewiseFn> c_;
  double data_bound_ = 0.0;
};

/// The dual problem  max ∫ b^T w dt  s.t.  A(t)^T w(t) = c(t),  w(t) <= 0.
/// Shares the primal's data; w has dimension m, with n equality rows.
class CDPInstance {
 public:
  explicit CDPInstance(CTLPInstance primal) : primal_(std::move(primal)) {}

  const CTLPInstance& primal() const noexcept { return primal_; }
  std::size_t variables() const noexcept { return primal_.m(); }
  std::size_t equality_rows() const noexcept { return primal_.n(); }
  double horizon() const noexcept { return primal_.horizon(); }
  const Breakpoints& breakpoints() const noexcept { return primal_.breakpoints(); }

  /// Coefficient of w_i in equality row j, i.e. a_ij(t).
  const PiecewiseFn& coefficient(std::size_t row, std::size_t var) const { return primal_.a(var, row); }

 private:
  CTLPInstance primal_;
};

enum class Interpolation { PiecewiseLinear, PiecewiseConstantRight };

/// Vector-valued function of time given by node values on a TimeGrid.
/// A time listed twice (left-limit node, then right node) encodes a jump.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(TimeGrid grid, std::vector<Vector> values, Interpolation interp = Interpolation::PiecewiseLinear)
      : grid_(std::move(grid)), values_(std::move(values)), interp_(interp) {
    if (values_.size() != grid_.size())
      throw InputError("trajectory: " + std::to_string(values_.size()) + " values for " +
                       std::to_string(grid_.size()) + " grid nodes");
    if (values_.empty()) throw InputError("trajectory: empty grid");
    dim_ = values_.front().size();
    for (const auto& v : values_) {
      if (v.size() != dim_) throw InputError("trajectory: inconsistent value dimension");
      for (double x : v)
        if (!std::isfinite(x)) throw InputError("trajectory: non-finite value");
    }
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<Vector>& values() const noexcept { return values_; }
  const Vector& operator[](std::size_t k) const { return values_[k]; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return values_.size(); }
  Interpolation interpolation() const noexcept { return interp_; }

  /// Value at a node: the stored value on an exact match, otherwise the
  /// interpolant (left limit if the node samples the interval ending at t).
  Vector at(const GridNode& node) const {
    const auto& nodes = grid_.nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k] == node) return values_[k];
    const double t = node.t;
    if (t < nodes.front().t || t > nodes.back().t)
      throw DomainError("trajectory: t = " + std::to_string(t) + " outside the grid");
    // Nodes sharing this time, if any.
    std::size_t first = nodes.size(), last = nodes.size();
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].t == t) {
        if (first == nodes.size()) first = k;
        last = k;
      }
    if (first != nodes.size()) return node.interval < nodes[first].interval ? values_[first] : values_[last];
    std::size_t k = 0;
    while (nodes[k + 1].t < t) ++k;
    // nodes[k].t < t < nodes[k+1].t; use the last node at nodes[k].t.
    const double ta = nodes[k].t, tb = nodes[k + 1].t;
    const Vector& va = values_[k];
    if (interp_ == Interpolation::PiecewiseConstantRight) return va;
    const Vector& vb = values_[k + 1];
    Vector v(dim_);
    const double s = (t - ta) / (tb - ta);
    for (std::size_t j = 0; j < dim_; ++j) v[j] = va[j] + s * (vb[j] - va[j]);
    return v;
  }

  /// Component j as a piecewise polynomial over the grid's distinct times.
  /// Requires the grid to span [0, horizon].
  PiecewiseFn component(std::size_t j, double horizon) const {
    if (j >= dim_) throw InputError("trajectory: component index out of range");
    const auto& nodes = grid_.nodes();
    if (nodes.front().t != 0.0 || nodes.back().t != horizon)
      throw InputError("trajectory: grid must span [0, T]");
    std::vector<double> times;
    std::vector<Polynomial> pieces;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const double ta = nodes[k].t, tb = nodes[k + 1].t;
      if (tb == ta) continue;
      const double va = values_[k][j];
      const double vb = values_[k + 1][j];
      times.push_back(ta);
      if (interp_ == Interpolation::PiecewiseConstantRight) {
        pieces.push_back(Polynomial::constant(va));
      } else {
        const double slope = (vb - va) / (tb - ta);
        pieces.push_back(Polynomial({va - slope * ta, slope}));
      }
    }
    times.push_back(horizon);
    return PiecewiseFn(Breakpoints(std::move(times)), std::move(pieces));
  }

 private:
  TimeGrid grid_;
  std::vector<Vector> values_;
  Interpolation interp_;
  std::size_t dim_ = 0;
};

inline PointData eval_instance(const CTLPInstance& inst, double t) { return inst.at(t); }

/// sup over the trajectory's nodes of max(0, max_i a_i(t)^T z(t) - b_i(t)).
inline double feasibility_residual(const CTLPInstance& inst, const Trajectory& z) {
  if (z.dim() != inst.n())
    throw InputError("feasibility_residual: trajectory dimension " + std::to_string(z.dim()) + " != n = " +
                     std::to_string(inst.n()));
  double worst = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const PointData p = inst.at(z.grid()[k]);
    const Vector Az = p.A * z[k];
    for (std::size_t i = 0; i < inst.m(); ++i) worst = std::max(worst, Az[i] - p.b[i]);
  }
  return worst;
}

enum class BoundednessKind { Bounded, UnboundedAt, InfeasibleAt };

inline const char* to_string(BoundednessKind k) {
  switch (k) {
    case BoundednessKind::Bounded: return "Bounded";
    case BoundednessKind::UnboundedAt: return "UnboundedAt";
    case BoundednessKind::InfeasibleAt: return "InfeasibleAt";
  }
  return "?";
}

struct BoundednessVerdict {
  BoundednessKind kind = BoundednessKind::Bounded;
  std::size_t node = 0;
  double t = 0.0;
  Vector direction;  // UnboundedAt only
};

/// Checks each pointwise polyhedron by maximizing +z_j for all j, then -z_j.
/// A Bounded verdict is a statement about grid nodes, not a proof for a.e. t.
inline BoundednessVerdict boundedness_probe(const CTLPInstance& inst, const TimeGrid& grid) {
  const std::size_t n = inst.n();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PointData p = inst.at(grid[k]);
    for (double sgn : {1.0, -1.0})
      for (std::size_t j = 0; j < n; ++j) {
        FiniteLP lp{p.A, p.b, Vector(n, 0.0)};
        lp.c[j] = -sgn;  // maximize sgn * z_j
        const LPSolution s = solve_lp(lp);
        if (s.status == LPStatus::Infeasible) return {BoundednessKind::InfeasibleAt, k, grid[k].t, {}};
        if (s.status == LPStatus::Unbounded) {
          Vector d(n, 0.0);
          d[j] = sgn;
          return {BoundednessKind::UnboundedAt, k, grid[k].t, d};
        }
      }
  }
  return {};
}

}  // namespace ctlp

#endif  // CTLP_INSTANCE_HPP
