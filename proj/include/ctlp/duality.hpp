#ifndef CTLP_DUALITY_HPP
#define CTLP_DUALITY_HPP

// Dual problem: maximize int b'w subject to A'w = c, w <= 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "ctlp/certify.hpp"
#include "ctlp/errors.hpp"
#include "ctlp/instance.hpp"
#include "ctlp/linalg.hpp"
#include "ctlp/solver.hpp"

namespace ctlp {

inline CDPInstance build_dual(const CTLPInstance& inst) { return CDPInstance(inst); }

struct DualFeasibility {
  double eq_residual = 0.0;     // sup ||A'w - c||_inf
  double sign_violation = 0.0;  // sup max(0, max_i w_i)
};

inline DualFeasibility dual_feasibility(const CDPInstance& dual, const Trajectory& w, const TimeGrid& grid) {
  const CTLPInstance& inst = dual.primal();
  if (w.dim() != inst.m()) throw InputError("dual_feasibility: trajectory dimension mismatch");
  DualFeasibility out;
  for (const auto& node : grid) {
    const PointData p = inst.at(node);
    const Vector wk = w.at(node);
    for (std::size_t j = 0; j < inst.n(); ++j) {
      double r = -p.c[j];
      for (std::size_t i = 0; i < inst.m(); ++i) r += p.A(i, j) * wk[i];
      out.eq_residual = std::max(out.eq_residual, std::abs(r));
    }
    for (double x : wk) out.sign_violation = std::max(out.sign_violation, x);
  }
  return out;
}

/// Lagrange multipliers u >= 0 give the dual point w = -u.
inline Trajectory multiplier_to_dual(const Trajectory& u) {
  std::vector<Vector> values = u.values();
  for (auto& v : values)
    for (double& x : v) x = -x;
  return Trajectory(u.grid(), std::move(values), u.interpolation());
}

inline bool certificate_supports_duality(const RegularityCertificate* cert) {
  if (cert == nullptr || !cert->holds()) return false;
  if (cert->kind == CertificateKind::BetaA || cert->kind == CertificateKind::BetaFR) return true;
  return cert->kind == CertificateKind::BetaRC && cert->isharp_in_I0;
}

enum class DualityVerdict { Withheld, WeakDualityViolated, WeakDualityHolds, StrongDualityCertified };

inline const char* to_string(DualityVerdict v) {
  switch (v) {
    case DualityVerdict::Withheld: return "Withheld";
    case DualityVerdict::WeakDualityViolated: return "WeakDualityViolated";
    case DualityVerdict::WeakDualityHolds: return "WeakDualityHolds";
    case DualityVerdict::StrongDualityCertified: return "StrongDualityCertified";
  }
  return "?";
}

struct DualityOptions {
  double gap_tol = 1e-7;
  double residual_tol = 1e-7;
};

struct DualityReport {
  double F = 0.0;
  double G = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_eq_residual = 0.0;
  double dual_sign_violation = 0.0;
  double cs_residual = 0.0;
  DualityVerdict verdict = DualityVerdict::Withheld;
};

inline double cs_residual(const CTLPInstance& inst, const Trajectory& z, const Trajectory& w, const TimeGrid& grid) {
  double worst = 0.0;
  for (const auto& node : grid) {
    const PointData p = inst.at(node);
    const Vector zk = z.at(node);
    const Vector wk = w.at(node);
    const Vector Az = inst.m() > 0 ? p.A * zk : Vector{};
    double s = 0.0;
    for (std::size_t i = 0; i < inst.m(); ++i) s += (p.b[i] - Az[i]) * wk[i];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

/// `cert` is the regularity certificate of z, if any; strong duality is
/// only claimed under beta-A.
inline DualityReport duality_report(const CTLPInstance& inst, const Trajectory& z, const Trajectory& w,
                                    const TimeGrid& grid, const RegularityCertificate* cert = nullptr,
                                    const DualityOptions& opt = {}) {
  if (z.dim() != inst.n() || w.dim() != inst.m()) throw InputError("duality_report: dimension mismatch");
  const CDPInstance dual = build_dual(inst);
  DualityReport rep;
  rep.F = objective_value(inst, z);
  rep.G = dual_objective_value(dual, w);
  rep.gap = rep.F - rep.G;
  for (const auto& node : grid) {
    const PointData p = inst.at(node);
    const Vector zk = z.at(node);
    const Vector Az = inst.m() > 0 ? p.A * zk : Vector{};
    for (std::size_t i = 0; i < inst.m(); ++i) rep.primal_residual = std::max(rep.primal_residual, Az[i] - p.b[i]);
  }
  const DualFeasibility df = dual_feasibility(dual, w, grid);
  rep.dual_eq_residual = df.eq_residual;
  rep.dual_sign_violation = df.sign_violation;
  rep.cs_residual = cs_residual(inst, z, w, grid);

  const bool feasible = rep.primal_residual <= opt.residual_tol && rep.dual_eq_residual <= opt.residual_tol &&
                        rep.dual_sign_violation <= opt.residual_tol;
  if (!feasible)
    rep.verdict = DualityVerdict::Withheld;
  else if (rep.gap < -opt.gap_tol)
    rep.verdict = DualityVerdict::WeakDualityViolated;
  else if (rep.gap <= opt.gap_tol && certificate_supports_duality(cert))
    rep.verdict = DualityVerdict::StrongDualityCertified;
  else
    rep.verdict = DualityVerdict::WeakDualityHolds;
  return rep;
}

enum class CSVerdict { OptimalPair, ConditionsHoldUncertified, Fails };

inline const char* to_string(CSVerdict v) {
  switch (v) {
    case CSVerdict::OptimalPair: return "OptimalPair";
    case CSVerdict::ConditionsHoldUncertified: return "ConditionsHoldUncertified";
    case CSVerdict::Fails: return "Fails";
  }
  return "?";
}

struct CSReport {
  Trajectory slack;  // y = b - A z per node
  double min_slack = 0.0;
  double dual_eq_residual = 0.0;
  double dual_sign_violation = 0.0;
  double fc3_residual = 0.0;
  bool fc1 = false;
  bool fc2 = false;
  bool fc3 = false;
  double tol = 0.0;
  CSVerdict verdict = CSVerdict::Fails;
};

inline CSReport complementary_slackness(const CTLPInstance& inst, const Trajectory& z, const Trajectory& w,
                                        const TimeGrid& grid, const RegularityCertificate* cert = nullptr,
                                        double tol = 1e-8) {
  if (z.dim() != inst.n() || w.dim() != inst.m()) throw InputError("complementary_slackness: dimension mismatch");
  CSReport rep;
  rep.tol = tol;
  rep.min_slack = std::numeric_limits<double>::infinity();
  std::vector<Vector> ys;
  for (const auto& node : grid) {
    const PointData p = inst.at(node);
    const Vector zk = z.at(node);
    Vector y = p.b;
    if (inst.m() > 0) {
      const Vector Az = p.A * zk;
      for (std::size_t i = 0; i < inst.m(); ++i) y[i] -= Az[i];
    }
    for (double v : y) rep.min_slack = std::min(rep.min_slack, v);
    ys.push_back(std::move(y));
  }
  if (!std::isfinite(rep.min_slack)) rep.min_slack = 0.0;
  rep.slack = Trajectory(grid, std::move(ys), Interpolation::PiecewiseLinear);
  const DualFeasibility df = dual_feasibility(build_dual(inst), w, grid);
  rep.dual_eq_residual = df.eq_residual;
  rep.dual_sign_violation = df.sign_violation;
  rep.fc3_residual = cs_residual(inst, z, w, grid);
  rep.fc1 = rep.min_slack >= -tol;
  rep.fc2 = rep.dual_eq_residual <= tol && rep.dual_sign_violation <= tol;
  rep.fc3 = rep.fc3_residual <= tol;
  if (!(rep.fc1 && rep.fc2 && rep.fc3))
    rep.verdict = CSVerdict::Fails;
  else
    rep.verdict = certificate_supports_duality(cert) ? CSVerdict::OptimalPair : CSVerdict::ConditionsHoldUncertified;
  return rep;
}

struct HypothesisHReport {
  double det_lower_bound = 0.0;
  std::optional<std::size_t> witness_node;
  std::vector<double> node_det;
  bool holds = false;
};

/// Upsilon(t) = [[A', 0], [-I, D]] with D = diag(-2 sqrt(-w_i)).
inline DenseMatrix upsilon(const DenseMatrix& A, const Vector& w) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  DenseMatrix U(n + m, 2 * m, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) U(j, i) = A(i, j);
  for (std::size_t i = 0; i < m; ++i) {
    if (w[i] > 1e-12) throw DomainError("hypothesis H: w_" + std::to_string(i) + " = " + std::to_string(w[i]) + " > 0");
    U(n + i, i) = -1.0;
    U(n + i, m + i) = -2.0 * std::sqrt(std::max(0.0, -w[i]));
  }
  return U;
}

inline HypothesisHReport check_hypothesis_h(const CDPInstance& dual, const Trajectory& w, const TimeGrid& grid,
                                            double fr_floor = 1e-8) {
  const CTLPInstance& inst = dual.primal();
  if (w.dim() != inst.m()) throw InputError("check_hypothesis_h: trajectory dimension mismatch");
  HypothesisHReport rep;
  rep.det_lower_bound = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = gram_det(upsilon(inst.at(grid[k]).A, w.at(grid[k])));
    rep.node_det.push_back(d);
    if (d < rep.det_lower_bound) rep.det_lower_bound = d;
    if (d < fr_floor && !rep.witness_node) rep.witness_node = k;
  }
  if (!std::isfinite(rep.det_lower_bound)) rep.det_lower_bound = 0.0;
  rep.holds = !grid.empty() && rep.det_lower_bound >= fr_floor;
  return rep;
}

}  // namespace ctlp

#endif  // CTLP_DUALITY_HPP
