#ifndef CTLP_CERTIFY_HPP
#define CTLP_CERTIFY_HPP

// Active sets, regularity certificates, multiplier recovery and KKT checks.
// Every "a.e." statement is checked on grid nodes only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctlp/errors.hpp"
#include "ctlp/instance.hpp"
#include "ctlp/linalg.hpp"
#include "ctlp/simplex.hpp"
#include "ctlp/timefunc.hpp"

namespace ctlp {

using IndexSet = std::vector<std::size_t>;

struct CertifyOptions {
  double active_tol = 1e-7;
  double fr_floor = 1e-8;
  double cone_tol = 1e-9;
  double kkt_tol = 1e-7;
  double lambda_tol = 1e-8;
  double multiplier_tol = 1e-8;
};

/// Thrown when a trajectory violates the constraints by more than active_tol.
class InfeasibleTrajectory : public DomainError {
 public:
  InfeasibleTrajectory(std::size_t node, double t, double residual)
      : DomainError("trajectory infeasible at node " + std::to_string(node) + " (t = " + std::to_string(t) +
                    "): residual " + std::to_string(residual)),
        node_(node), t_(t), residual_(residual) {}
  std::size_t node() const noexcept { return node_; }
  double t() const noexcept { return t_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t node_;
  double t_;
  double residual_;
};

struct ActiveSetProfile {
  TimeGrid grid;
  double beta = 0.0;
  double active_tol = 0.0;
  std::vector<IndexSet> I0;
  std::vector<IndexSet> Ibeta;
  std::vector<Vector> g;  // a_i(t)'z(t) - b_i(t)
};

inline ActiveSetProfile active_sets(const CTLPInstance& inst, const Trajectory& z, double beta, const TimeGrid& grid,
                                    const CertifyOptions& opt = {}) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("active_sets: beta must be positive");
  if (z.dim() != inst.n()) throw InputError("active_sets: trajectory dimension mismatch");
  ActiveSetProfile prof;
  prof.grid = grid;
  prof.beta = beta;
  prof.active_tol = opt.active_tol;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PointData p = inst.at(grid[k]);
    const Vector zk = z.at(grid[k]);
    Vector g = inst.m() > 0 ? p.A * zk : Vector{};
    double worst = 0.0;
    IndexSet i0, ib;
    for (std::size_t i = 0; i < inst.m(); ++i) {
      g[i] -= p.b[i];
      worst = std::max(worst, g[i]);
      if (std::abs(g[i]) <= opt.active_tol) i0.push_back(i);
      if (g[i] >= -beta && g[i] <= opt.active_tol) ib.push_back(i);
    }
    if (worst > opt.active_tol) throw InfeasibleTrajectory(k, grid[k].t, worst);
    prof.I0.push_back(std::move(i0));
    prof.Ibeta.push_back(std::move(ib));
    prof.g.push_back(std::move(g));
  }
  return prof;
}

enum class CertificateKind { BetaFR, BetaRC, BetaA, Fails };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::BetaFR: return "BetaFR";
    case CertificateKind::BetaRC: return "BetaRC";
    case CertificateKind::BetaA: return "BetaA";
    case CertificateKind::Fails: return "Fails";
  }
  return "?";
}

struct RegularityCertificate {
  CertificateKind kind = CertificateKind::Fails;
  /// Condition that was tested (BetaFR or BetaRC); for BetaA, the clause used.
  CertificateKind tested = CertificateKind::Fails;
  double beta = 0.0;
  double det_lower_bound = 0.0;
  std::optional<double> sigma_min_lower_bound;
  std::optional<std::size_t> witness_node;
  std::vector<double> node_det;
  std::vector<IndexSet> isharp;
  bool isharp_in_I0 = false;
  bool cone_equality = false;
  double lemma3_residual = 0.0;
  ActiveSetProfile profile;
  std::string reason;

  bool holds() const noexcept { return kind != CertificateKind::Fails; }
};

inline double sigma_min_or_zero(const DenseMatrix& M) {
  return M.rows() == 0 || M.max_abs() == 0.0 ? 0.0 : sigma_min_positive(M);
}

inline RegularityCertificate check_beta_fr(const CTLPInstance& inst, const Trajectory& z, double beta,
                                           const TimeGrid& grid, const CertifyOptions& opt = {}) {
  RegularityCertificate cert;
  cert.tested = CertificateKind::BetaFR;
  cert.beta = beta;
  cert.profile = active_sets(inst, z, beta, grid, opt);
  double min_det = std::numeric_limits<double>::infinity();
  double min_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const IndexSet& ib = cert.profile.Ibeta[k];
    const DenseMatrix block = inst.at(grid[k]).A.select_rows(ib);
    const double d = gram_det(block);
    cert.node_det.push_back(d);
    cert.isharp.push_back(ib);
    if (!ib.empty()) min_sigma = std::min(min_sigma, sigma_min_or_zero(block));
    if (d < min_det) min_det = d;
    if (d < opt.fr_floor && !cert.witness_node) cert.witness_node = k;
  }
  cert.det_lower_bound = min_det;
  if (std::isfinite(min_sigma)) cert.sigma_min_lower_bound = min_sigma;
  cert.cone_equality = true;
  cert.isharp_in_I0 = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const IndexSet& ib = cert.profile.Ibeta[k];
    const IndexSet& i0 = cert.profile.I0[k];
    if (!std::includes(i0.begin(), i0.end(), ib.begin(), ib.end())) cert.isharp_in_I0 = false;
  }
  if (min_det >= opt.fr_floor) {
    cert.kind = CertificateKind::BetaFR;
  } else {
    cert.reason = "Gram determinant of the beta-active rows is " + std::to_string(cert.node_det[*cert.witness_node]) +
                  " at t = " + std::to_string(grid[*cert.witness_node].t);
  }
  return cert;
}

/// True iff some lambda >= 0 has rows' lambda = x, up to tol (scaled by ||x||).
inline bool cone_member(std::span<const double> x, const DenseMatrix& rows, double tol = 1e-9) {
  if (rows.rows() > 0 && rows.cols() != x.size()) throw InputError("cone_member: dimension mismatch");
  const double slack = tol * std::max(1.0, norm_inf(x));
  if (norm_inf(x) <= slack) return true;
  const std::size_t k = rows.rows();
  const std::size_t n = x.size();
  if (k == 0) return false;
  FiniteLP lp;
  lp.A = DenseMatrix(k + 2 * n, k);
  lp.b.assign(k + 2 * n, 0.0);
  lp.c.assign(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) lp.A(r, r) = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r = 0; r < k; ++r) {
      lp.A(k + j, r) = rows(r, j);
      lp.A(k + n + j, r) = -rows(r, j);
    }
    lp.b[k + j] = x[j] + slack;
    lp.b[k + n + j] = -x[j] + slack;
  }
  return solve_lp(lp).status == LPStatus::Optimal;
}

/// Greedy conic basis: walk rows in order, keep a row unless it lies in the
/// cone of those kept, then drop any kept row generated by the others.
/// Returns positions into `rows`.
inline IndexSet select_isharp(const DenseMatrix& rows, double tol = 1e-9) {
  IndexSet keep;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    const auto row = rows.row(r);
    if (norm_inf(row) == 0.0) continue;
    if (!cone_member(row, rows.select_rows(keep), tol)) keep.push_back(r);
  }
  for (std::size_t pos = 0; pos < keep.size();) {
    IndexSet others = keep;
    others.erase(others.begin() + static_cast<std::ptrdiff_t>(pos));
    if (!others.empty() && cone_member(rows.row(keep[pos]), rows.select_rows(others), tol))
      keep = std::move(others);
    else
      ++pos;
  }
  return keep;
}

inline RegularityCertificate check_beta_rc(const CTLPInstance& inst, const Trajectory& z, double beta,
                                           const TimeGrid& grid, const CertifyOptions& opt = {}) {
  RegularityCertificate cert;
  cert.tested = CertificateKind::BetaRC;
  cert.beta = beta;
  cert.profile = active_sets(inst, z, beta, grid, opt);
  cert.cone_equality = true;
  cert.isharp_in_I0 = true;
  double min_det = std::numeric_limits<double>::infinity();
  double min_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const IndexSet& ib = cert.profile.Ibeta[k];
    const IndexSet& i0 = cert.profile.I0[k];
    const DenseMatrix A = inst.at(grid[k]).A;
    const DenseMatrix block = A.select_rows(ib);
    IndexSet sharp;
    for (std::size_t pos : select_isharp(block, opt.cone_tol)) sharp.push_back(ib[pos]);
    const DenseMatrix As = A.select_rows(sharp);

    bool cone_ok = true;
    for (std::size_t i : ib) cone_ok = cone_ok && cone_member(A.row(i), As, opt.cone_tol);
    if (!cone_ok) {
      cert.cone_equality = false;
      if (!cert.witness_node) cert.witness_node = k;
    }
    if (!std::includes(i0.begin(), i0.end(), sharp.begin(), sharp.end())) cert.isharp_in_I0 = false;

    const double d = gram_det(As);
    cert.node_det.push_back(d);
    min_det = std::min(min_det, d);
    if (d < opt.fr_floor && !cert.witness_node) cert.witness_node = k;
    if (!sharp.empty()) {
      const double s = sigma_min_or_zero(As);
      min_sigma = std::min(min_sigma, s);
      if (d >= opt.fr_floor && s > 0.0) {
        const LuDecomposition lu(As * As.transpose(), 0.0);
        const double inv_norm = spectral_norm(lu.inverse());
        const double expect = 1.0 / (s * s);
        cert.lemma3_residual = std::max(cert.lemma3_residual, std::abs(inv_norm - expect) / expect);
      }
    }
    cert.isharp.push_back(std::move(sharp));
  }
  cert.det_lower_bound = min_det;
  if (std::isfinite(min_sigma)) cert.sigma_min_lower_bound = min_sigma;
  if (cert.cone_equality && min_det >= opt.fr_floor) {
    cert.kind = CertificateKind::BetaRC;
  } else if (!cert.cone_equality) {
    cert.reason = "cone equality fails at t = " + std::to_string(grid[*cert.witness_node].t);
  } else {
    cert.reason = "Gram determinant of the selected rows is " + std::to_string(cert.node_det[*cert.witness_node]) +
                  " at t = " + std::to_string(grid[*cert.witness_node].t);
  }
  return cert;
}

/// beta-A: beta-RC with I# inside I0 at every node, or else beta-FR.
inline RegularityCertificate satisfies_beta_a(const CTLPInstance& inst, const Trajectory& z, double beta,
                                              const TimeGrid& grid, const CertifyOptions& opt = {}) {
  RegularityCertificate rc = check_beta_rc(inst, z, beta, grid, opt);
  if (rc.holds() && rc.isharp_in_I0) {
    rc.kind = CertificateKind::BetaA;
    return rc;
  }
  RegularityCertificate fr = check_beta_fr(inst, z, beta, grid, opt);
  if (fr.holds()) {
    fr.kind = CertificateKind::BetaA;
    return fr;
  }
  fr.reason = "beta-RC " + std::string(rc.holds() ? "holds but I# is not inside I0" : "fails") +
              "; beta-FR fails: " + fr.reason;
  return fr;
}

struct MultiplierRecovery {
  Trajectory u;
  CertificateKind method = CertificateKind::Fails;
  double min_multiplier = 0.0;
  std::vector<std::size_t> negative_nodes;
  double lambda_min_entry = 0.0;
  double lambda_reconstruction_residual = 0.0;
  std::vector<std::size_t> lambda_negative_nodes;
};

/// Multipliers from the pseudo-inverse construction. Under beta-RC:
/// u~ = -(M+)'c with M the beta-active rows of A, then the I-flat components
/// are folded into I# through Lambda = A_flat A#' (A# A#')^-1. Under beta-FR
/// the matrix carries the residual column, M = [D g, D A], and
/// u = -(M+)'[0; c].
inline MultiplierRecovery recover_multipliers(const CTLPInstance& inst, const Trajectory& z,
                                              const RegularityCertificate& cert, const CertifyOptions& opt = {}) {
  if (!cert.holds()) throw DomainError("recover_multipliers: certificate does not hold");
  if (z.dim() != inst.n()) throw InputError("recover_multipliers: trajectory dimension mismatch");
  const TimeGrid& grid = cert.profile.grid;
  const std::size_t m = inst.m();
  const std::size_t n = inst.n();
  MultiplierRecovery out;
  out.method = cert.tested;
  out.min_multiplier = std::numeric_limits<double>::infinity();
  std::vector<Vector> us;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PointData p = inst.at(grid[k]);
    const IndexSet& ib = cert.profile.Ibeta[k];
    Vector u(m, 0.0);
    if (cert.tested == CertificateKind::BetaFR) {
      DenseMatrix M(m, n + 1, 0.0);
      Vector rhs(n + 1, 0.0);
      for (std::size_t j = 0; j < n; ++j) rhs[j + 1] = p.c[j];
      for (std::size_t i : ib) {
        M(i, 0) = cert.profile.g[k][i];
        for (std::size_t j = 0; j < n; ++j) M(i, j + 1) = p.A(i, j);
      }
      const Vector v = pinv(M).transpose() * rhs;
      for (std::size_t i : ib) u[i] = -v[i];
    } else {
      DenseMatrix M(m, n, 0.0);
      for (std::size_t i : ib)
        for (std::size_t j = 0; j < n; ++j) M(i, j) = p.A(i, j);
      const Vector v = pinv(M).transpose() * p.c;
      Vector ut(m, 0.0);
      for (std::size_t i : ib) ut[i] = -v[i];

      const IndexSet& sharp = cert.isharp[k];
      IndexSet flat;
      std::set_difference(ib.begin(), ib.end(), sharp.begin(), sharp.end(), std::back_inserter(flat));
      for (std::size_t i : sharp) u[i] = ut[i];
      if (!flat.empty()) {
        const DenseMatrix As = p.A.select_rows(sharp);
        const DenseMatrix Af = p.A.select_rows(flat);
        const DenseMatrix Lambda = Af * As.transpose() * LuDecomposition(As * As.transpose(), 0.0).inverse();
        const double recon = (Af - Lambda * As).max_abs();
        out.lambda_reconstruction_residual = std::max(out.lambda_reconstruction_residual, recon);
        double lmin = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < Lambda.rows(); ++a)
          for (std::size_t b = 0; b < Lambda.cols(); ++b) lmin = std::min(lmin, Lambda(a, b));
        out.lambda_min_entry = std::min(out.lambda_min_entry, lmin);
        if (lmin < -opt.lambda_tol) out.lambda_negative_nodes.push_back(k);
        for (std::size_t b = 0; b < sharp.size(); ++b)
          for (std::size_t a = 0; a < flat.size(); ++a) u[sharp[b]] += Lambda(a, b) * ut[flat[a]];
      }
    }
    double umin = 0.0;
    for (double x : u) umin = std::min(umin, x);
    out.min_multiplier = std::min(out.min_multiplier, umin);
    if (umin < -opt.multiplier_tol) out.negative_nodes.push_back(k);
    us.push_back(std::move(u));
  }
  if (!std::isfinite(out.min_multiplier)) out.min_multiplier = 0.0;
  out.u = Trajectory(grid, std::move(us), Interpolation::PiecewiseLinear);
  return out;
}

struct KKTReport {
  double stationarity_residual = 0.0;
  double min_multiplier = 0.0;
  double complementarity_residual = 0.0;
  std::optional<std::size_t> worst_node;
  double tol = 0.0;
  bool pass = false;
};

inline KKTReport check_kkt(const CTLPInstance& inst, const Trajectory& z, const Trajectory& u, const TimeGrid& grid,
                           double tol = 1e-7) {
  if (z.dim() != inst.n() || u.dim() != inst.m()) throw InputError("check_kkt: dimension mismatch");
  KKTReport rep;
  rep.tol = tol;
  rep.min_multiplier = std::numeric_limits<double>::infinity();
  double worst = -1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const PointData p = inst.at(grid[k]);
    const Vector zk = z.at(grid[k]);
    const Vector uk = u.at(grid[k]);
    Vector r = p.c;
    for (std::size_t i = 0; i < inst.m(); ++i)
      for (std::size_t j = 0; j < inst.n(); ++j) r[j] += uk[i] * p.A(i, j);
    const double st = norm_inf(r);
    double cs = 0.0;
    const Vector Az = inst.m() > 0 ? p.A * zk : Vector{};
    for (std::size_t i = 0; i < inst.m(); ++i) {
      cs = std::max(cs, std::abs(uk[i] * (Az[i] - p.b[i])));
      rep.min_multiplier = std::min(rep.min_multiplier, uk[i]);
    }
    rep.stationarity_residual = std::max(rep.stationarity_residual, st);
    rep.complementarity_residual = std::max(rep.complementarity_residual, cs);
    double neg = 0.0;
    for (double x : uk) neg = std::max(neg, -x);
    const double badness = std::max({st, cs, neg});
    if (badness > worst) {
      worst = badness;
      rep.worst_node = k;
    }
  }
  if (!std::isfinite(rep.min_multiplier)) rep.min_multiplier = 0.0;
  rep.pass = rep.stationarity_residual <= tol && rep.min_multiplier >= -tol && rep.complementarity_residual <= tol;
  return rep;
}

/// Both directions of the full-rank / singular-value equivalence for one
/// block, with the constants from its proof. `K` bounds the data norm and `m`
/// is the constraint count.
struct Lemma1Check {
  std::size_t rows = 0;
  double sigma_min = 0.0;
  double gram_det = 0.0;
  bool full_rank = false;
  double forward_bound = 0.0;   // sigma_min >= sqrt(det / (K^2)^(k-1)), or sqrt(det) when K^2 < 1
  bool forward_holds = false;
  double converse_khat = 0.0;   // C if C >= 1, C^m otherwise
  bool converse_holds = false;
  double corrected_khat = 0.0;  // C^2 if C >= 1, C^(2m) otherwise
  bool corrected_holds = false;
};

inline Lemma1Check lemma1_constants(const DenseMatrix& block, double K, std::size_t m, double rel_tol = 1e-9) {
  Lemma1Check out;
  out.rows = block.rows();
  if (block.rows() == 0) throw InputError("lemma1_constants: empty block");
  const SvdResult s = svd(block);
  out.full_rank = s.rank == block.rows();
  out.sigma_min = s.rank > 0 ? s.sigma[s.rank - 1] : 0.0;
  out.gram_det = gram_det(block);
  const double k = static_cast<double>(block.rows());
  out.forward_bound = K * K >= 1.0 ? std::sqrt(out.gram_det / std::pow(K * K, k - 1.0)) : std::sqrt(out.gram_det);
  out.forward_holds = out.sigma_min >= out.forward_bound * (1.0 - rel_tol);
  if (out.full_rank) {
    const double C = out.sigma_min;
    const double md = static_cast<double>(m);
    out.converse_khat = C >= 1.0 ? C : std::pow(C, md);
    out.corrected_khat = C >= 1.0 ? C * C : std::pow(C, 2.0 * md);
    out.converse_holds = out.gram_det >= out.converse_khat * (1.0 - rel_tol);
    out.corrected_holds = out.gram_det >= out.corrected_khat * (1.0 - rel_tol);
  } else {
    out.converse_holds = true;
    out.corrected_holds = true;
  }
  return out;
}

struct Lemma1Witness {
  double C = 0.0;     // min sigma_min over nodes
  double Khat = 0.0;  // min Gram determinant over nodes
  bool full_rank_everywhere = true;
  bool forward_consistent = true;
  bool converse_consistent = true;
  bool corrected_consistent = true;
  bool consistent = true;
  std::optional<std::size_t> witness_node;
  std::vector<Lemma1Check> nodes;
};

inline Lemma1Witness lemma1_witness(const CTLPInstance& inst, const Trajectory& z, double beta, const TimeGrid& grid,
                                    const CertifyOptions& opt = {}) {
  const ActiveSetProfile prof = active_sets(inst, z, beta, grid, opt);
  Lemma1Witness w;
  w.C = std::numeric_limits<double>::infinity();
  w.Khat = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (prof.Ibeta[k].empty()) continue;
    const DenseMatrix block = inst.at(grid[k]).A.select_rows(prof.Ibeta[k]);
    if (block.max_abs() == 0.0) continue;
    const Lemma1Check c = lemma1_constants(block, inst.data_bound(), inst.m());
    w.C = std::min(w.C, c.sigma_min);
    w.Khat = std::min(w.Khat, c.gram_det);
    w.full_rank_everywhere = w.full_rank_everywhere && c.full_rank;
    w.forward_consistent = w.forward_consistent && c.forward_holds;
    w.converse_consistent = w.converse_consistent && c.converse_holds;
    w.corrected_consistent = w.corrected_consistent && c.corrected_holds;
    if (!(c.forward_holds && c.converse_holds) && !w.witness_node) w.witness_node = k;
    w.nodes.push_back(c);
  }
  if (!std::isfinite(w.C)) w.C = 0.0;
  if (!std::isfinite(w.Khat)) w.Khat = 1.0;
  w.consistent = w.forward_consistent && w.converse_consistent;
  return w;
}

struct BetaSweepRow {
  double beta = 0.0;
  bool fr = false;
  bool rc = false;
  bool isharp_in_I0 = false;
  bool beta_a = false;
  double fr_det = 0.0;
  double rc_det = 0.0;
};

/// Certification at k log-spaced beta values in [lo, hi].
inline std::vector<BetaSweepRow> beta_sweep(const CTLPInstance& inst, const Trajectory& z, const TimeGrid& grid,
                                            double lo, double hi, std::size_t k, const CertifyOptions& opt = {}) {
  if (!(lo > 0.0) || !(hi >= lo) || k == 0) throw InputError("beta_sweep: need 0 < lo <= hi and k >= 1");
  std::vector<BetaSweepRow> rows;
  for (std::size_t s = 0; s < k; ++s) {
    const double f = k == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(k - 1);
    const double beta = lo * std::pow(hi / lo, f);
    const RegularityCertificate fr = check_beta_fr(inst, z, beta, grid, opt);
    const RegularityCertificate rc = check_beta_rc(inst, z, beta, grid, opt);
    BetaSweepRow row;
    row.beta = beta;
    row.fr = fr.holds();
    row.rc = rc.holds();
    row.isharp_in_I0 = rc.isharp_in_I0;
    row.beta_a = (row.rc && rc.isharp_in_I0) || row.fr;
    row.fr_det = fr.det_lower_bound;
    row.rc_det = rc.det_lower_bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ctlp

#endif  // CTLP_CERTIFY_HPP
