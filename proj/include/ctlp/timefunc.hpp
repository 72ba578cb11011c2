#ifndef CTLP_TIMEFUNC_HPP
#define CTLP_TIMEFUNC_HPP

// Piecewise-polynomial scalar functions of time on [0,T].
//
// Pieces own half-open intervals [t_i, t_{i+1}); the final piece also owns T.
// Coefficients are ascending-degree and expressed in absolute time t (not in a
// local coordinate), so c(t) = 1/4 + 5/8 t is stored as {0.25, 0.625}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctlp/errors.hpp"

namespace ctlp {

/// Maximum polynomial degree accepted for problem data.
inline constexpr std::size_t kMaxDataDegree = 3;

class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Polynomial constant(double v) { return Polynomial({v}); }

  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

  double operator()(double t) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
  }

  /// Antiderivative vanishing at t = 0.
  Polynomial antiderivative() const {
    std::vector<double> p(coeffs_.size() + 1, 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) p[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
    return Polynomial(std::move(p));
  }

  /// Exact integral over [a, b].
  double integrate(double a, double b) const {
    const Polynomial anti = antiderivative();
    return anti(b) - anti(a);
  }

  Polynomial& operator+=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    trim();
    return *this;
  }
  Polynomial& operator*=(double s) {
    for (double& v : coeffs_) v *= s;
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a += b * -1.0; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> p(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) p[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(p));
  }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  }

  std::vector<double> coeffs_;
};

/// Strictly increasing partition 0 = t_0 < t_1 < ... < t_N = T.
class Breakpoints {
 public:
  explicit Breakpoints(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw InputError("breakpoints: need at least two points");
    if (points_.front() != 0.0) throw InputError("breakpoints: first point must be 0");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i])) throw InputError("breakpoints: non-finite value");
      if (i > 0 && !(points_[i] > points_[i - 1]))
        throw InputError("breakpoints: not strictly increasing at index " + std::to_string(i));
    }
  }

  static Breakpoints uniform(double horizon, std::size_t intervals) {
    std::vector<double> p(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
      p[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
    p.back() = horizon;
    return Breakpoints(std::move(p));
  }

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t intervals() const noexcept { return points_.size() - 1; }
  double horizon() const noexcept { return points_.back(); }
  double operator[](std::size_t i) const { return points_[i]; }

  bool contains(double t) const noexcept { return t >= 0.0 && t <= horizon(); }

  /// Index of the interval owning t under the right-continuous convention.
  std::size_t locate(double t) const {
    if (!contains(t)) throw DomainError("t = " + std::to_string(t) + " outside [0, T]");
    auto it = std::upper_bound(points_.begin(), points_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - points_.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, intervals() - 1);
  }

  /// Sorted union of two partitions of the same horizon.
  friend Breakpoints merge(const Breakpoints& a, const Breakpoints& b) {
    if (a.horizon() != b.horizon()) throw InputError("breakpoints: cannot merge different horizons");
    std::vector<double> u;
    std::set_union(a.points_.begin(), a.points_.end(), b.points_.begin(), b.points_.end(),
                   std::back_inserter(u));
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return Breakpoints(std::move(u));
  }

  friend bool operator==(const Breakpoints&, const Breakpoints&) = default;

 private:
  std::vector<double> points_;
};

/// A time node tagged with the data interval it samples. Interior breakpoints
/// may appear twice in a grid: once tagged with the interval on the left (the
/// left limit) and once with the interval starting there.
struct GridNode {
  double t = 0.0;
  std::size_t interval = 0;

  friend bool operator==(const GridNode&, const GridNode&) = default;
};

class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<GridNode> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      const auto& p = nodes_[k - 1];
      const auto& q = nodes_[k];
      if (q.t < p.t || (q.t == p.t && q.interval <= p.interval))
        throw InputError("time grid: nodes out of order at index " + std::to_string(k));
    }
  }

  /// Tags each time with its right-continuous owning interval.
  static TimeGrid from_times(const Breakpoints& bp, std::span<const double> times) {
    std::vector<GridNode> nodes;
    nodes.reserve(times.size());
    for (double t : times) nodes.push_back({t, bp.locate(t)});
    return TimeGrid(std::move(nodes));
  }

  const std::vector<GridNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const GridNode& operator[](std::size_t k) const { return nodes_[k]; }
  auto begin() const noexcept { return nodes_.begin(); }
  auto end() const noexcept { return nodes_.end(); }

  std::vector<double> times() const {
    std::vector<double> ts;
    ts.reserve(nodes_.size());
    for (const auto& n : nodes_) ts.push_back(n.t);
    return ts;
  }

  bool contains_breakpoints(const Breakpoints& bp) const {
    return std::all_of(bp.points().begin(), bp.points().end(), [&](double b) {
      return std::any_of(nodes_.begin(), nodes_.end(), [b](const GridNode& n) { return n.t == b; });
    });
  }

  /// Inserts a left-limit node before every interior breakpoint node that
  /// lacks one, so piecewise data can be sampled on both sides of a jump.
  TimeGrid with_left_limits(const Breakpoints& bp) const {
    std::vector<GridNode> out;
    out.reserve(nodes_.size() + bp.intervals());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const auto& n = nodes_[k];
      const bool interior_start = n.interval > 0 && n.t == bp[n.interval];
      if (interior_start) {
        const GridNode left{n.t, n.interval - 1};
        if (out.empty() || !(out.back() == left)) out.push_back(left);
      }
      out.push_back(n);
    }
    return TimeGrid(std::move(out));
  }

 private:
  std::vector<GridNode> nodes_;
};

/// Every breakpoint plus `nodes_per_interval - 1` equally spaced interior
/// nodes per interval. Each time appears once.
inline TimeGrid refine_grid(const Breakpoints& bp, std::size_t nodes_per_interval) {
  if (nodes_per_interval < 1) throw InputError("refine_grid: nodes_per_interval must be >= 1");
  std::vector<GridNode> nodes;
  nodes.reserve(bp.intervals() * nodes_per_interval + 1);
  for (std::size_t i = 0; i < bp.intervals(); ++i) {
    const double a = bp[i];
    const double h = (bp[i + 1] - a) / static_cast<double>(nodes_per_interval);
    for (std::size_t j = 0; j < nodes_per_interval; ++j) nodes.push_back({a + static_cast<double>(j) * h, i});
  }
  nodes.push_back({bp.horizon(), bp.intervals() - 1});
  return TimeGrid(std::move(nodes));
}

class PiecewiseFn {
 public:
  PiecewiseFn(Breakpoints bp, std::vector<Polynomial> pieces) : bp_(std::move(bp)), pieces_(std::move(pieces)) {
    if (pieces_.size() != bp_.intervals())
      throw InputError("piecewise function: " + std::to_string(pieces_.size()) + " pieces for " +
                       std::to_string(bp_.intervals()) + " intervals");
    for (const auto& p : pieces_)
      for (double v : p.coeffs())
        if (!std::isfinite(v)) throw InputError("piecewise function: non-finite coefficient");
  }

  static PiecewiseFn constant(const Breakpoints& bp, double v) {
    return PiecewiseFn(bp, std::vector<Polynomial>(bp.intervals(), Polynomial::constant(v)));
  }
  static PiecewiseFn zero(const Breakpoints& bp) { return constant(bp, 0.0); }

  const Breakpoints& breakpoints() const noexcept { return bp_; }
  const std::vector<Polynomial>& pieces() const noexcept { return pieces_; }
  const Polynomial& piece(std::size_t i) const { return pieces_.at(i); }
  double horizon() const noexcept { return bp_.horizon(); }

  std::size_t max_degree() const noexcept {
    std::size_t d = 0;
    for (const auto& p : pieces_) d = std::max(d, p.degree());
    return d;
  }

  double eval(double t) const { return pieces_[bp_.locate(t)](t); }

  /// Evaluates the polynomial of a specific interval; at the interval's right
  /// end this is the left limit.
  double eval(const GridNode& node) const {
    if (node.interval >= pieces_.size()) throw DomainError("grid node interval out of range");
    if (node.t < bp_[node.interval] || node.t > bp_[node.interval + 1])
      throw DomainError("grid node t = " + std::to_string(node.t) + " not inside its interval");
    return pieces_[node.interval](node.t);
  }

  /// k-th time derivative of the piece owning the node.
  double derivative(const GridNode& node, std::size_t order) const {
    Polynomial p = pieces_.at(node.interval);
    for (std::size_t k = 0; k < order; ++k) p = p.derivative();
    return p(node.t);
  }

  double integrate(double a, double b) const {
    if (a > b) throw DomainError("integrate: a > b");
    if (!bp_.contains(a) || !bp_.contains(b)) throw DomainError("integrate: bounds outside [0, T]");
    double sum = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const double lo = std::max(a, bp_[i]);
      const double hi = std::min(b, bp_[i + 1]);
      if (hi > lo) sum += pieces_[i].integrate(lo, hi);
    }
    return sum;
  }

  double integrate() const { return integrate(0.0, horizon()); }

  /// Same function over a finer partition (which must contain every current
  /// breakpoint).
  PiecewiseFn refined(const Breakpoints& finer) const {
    if (finer.horizon() != horizon()) throw InputError("piecewise function: horizon mismatch on refine");
    for (double b : bp_.points())
      if (!std::binary_search(finer.points().begin(), finer.points().end(), b))
        throw InputError("piecewise function: refinement drops a breakpoint");
    std::vector<Polynomial> out;
    out.reserve(finer.intervals());
    for (std::size_t i = 0; i < finer.intervals(); ++i) out.push_back(pieces_[bp_.locate(finer[i])]);
    return PiecewiseFn(finer, std::move(out));
  }

  friend PiecewiseFn operator+(const PiecewiseFn& f, const PiecewiseFn& g) {
    return combine(f, g, [](const Polynomial& p, const Polynomial& q) { return p + q; });
  }
  friend PiecewiseFn operator*(const PiecewiseFn& f, const PiecewiseFn& g) {
    return combine(f, g, [](const Polynomial& p, const Polynomial& q) { return p * q; });
  }
  friend PiecewiseFn operator*(double s, PiecewiseFn f) {
    for (auto& p : f.pieces_) p *= s;
    return f;
  }

 private:
  template <class Op>
  static PiecewiseFn combine(const PiecewiseFn& f, const PiecewiseFn& g, Op op) {
    const Breakpoints bp = f.bp_ == g.bp_ ? f.bp_ : merge(f.bp_, g.bp_);
    const PiecewiseFn fr = f.bp_ == bp ? f : f.refined(bp);
    const PiecewiseFn gr = g.bp_ == bp ? g : g.refined(bp);
    std::vector<Polynomial> out;
    out.reserve(bp.intervals());
    for (std::size_t i = 0; i < bp.intervals(); ++i) out.push_back(op(fr.pieces_[i], gr.pieces_[i]));
    return PiecewiseFn(bp, std::move(out));
  }

  Breakpoints bp_;
  std::vector<Polynomial> pieces_;
};

inline double eval(const PiecewiseFn& f, double t) { return f.eval(t); }
inline double integrate(const PiecewiseFn& f, double a, double b) { return f.integrate(a, b); }

}  // namespace ctlp

#endif  // CTLP_TIMEFUNC_HPP
