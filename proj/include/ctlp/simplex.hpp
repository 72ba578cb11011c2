#ifndef CTLP_SIMPLEX_HPP
#define CTLP_SIMPLEX_HPP

// Dense two-phase simplex for   min c^T z  s.t.  A z <= b,  z free,
// plus a brute-force enumeration oracle used to cross-check it in tests.
//
// Sign convention: LPSolution::dual is u >= 0 with c + A^T u = 0 at an
// optimum, i.e. the negated equality-form dual y = -u <= 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ctlp/errors.hpp"
#include "ctlp/linalg.hpp"

namespace ctlp {

struct FiniteLP {
  DenseMatrix A;  // m x n
  Vector b;       // m
  Vector c;       // n

  std::size_t m() const noexcept { return A.rows(); }
  std::size_t n() const noexcept { return c.size(); }

  void validate() const {
    if (A.rows() != b.size()) throw InputError("FiniteLP: A has " + std::to_string(A.rows()) +
                                               " rows but b has " + std::to_string(b.size()));
    if (A.rows() > 0 && A.cols() != c.size())
      throw InputError("FiniteLP: A has " + std::to_string(A.cols()) + " columns but c has " +
                       std::to_string(c.size()));
    auto finite = [](const Vector& v) { return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }); };
    if (!A.all_finite() || !finite(b) || !finite(c)) throw InputError("FiniteLP: non-finite data");
  }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "Optimal";
    case LPStatus::Infeasible: return "Infeasible";
    case LPStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  Vector z;                              // when Optimal
  double objective = 0.0;                // when Optimal
  Vector dual;                           // u >= 0, when Optimal
  std::vector<std::size_t> active_rows;  // |b_i - a_i^T z| <= feas_tol
};

struct SimplexOptions {
  double feas_tol = 1e-9;
  double pivot_tol = 1e-11;
  double cost_tol = 1e-11;
  std::size_t max_iterations = 50000;
};

namespace detail {

inline std::vector<std::size_t> active_rows_of(const FiniteLP& lp, const Vector& z, double tol) {
  std::vector<std::size_t> act;
  const Vector Az = lp.A.rows() > 0 ? lp.A * z : Vector{};
  for (std::size_t i = 0; i < lp.m(); ++i)
    if (std::abs(lp.b[i] - Az[i]) <= tol) act.push_back(i);
  return act;
}

// Tableau over columns [z+ (n) | z- (n) | slack (m) | artificial (k)].
class Tableau {
 public:
  Tableau(const FiniteLP& lp, const SimplexOptions& opt) : opt_(opt), m_(lp.m()), n_(lp.n()) {
    sign_.resize(m_);
    std::size_t nart = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      sign_[i] = lp.b[i] < 0.0 ? -1.0 : 1.0;
      if (sign_[i] < 0.0) ++nart;
    }
    cols_ = 2 * n_ + m_ + nart;
    T_ = DenseMatrix(m_, cols_ + 1);
    basis_.resize(m_);
    initial_basis_.resize(m_);
    is_artificial_.assign(cols_, false);
    std::size_t a = 2 * n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double s = sign_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        T_(i, j) = s * lp.A(i, j);
        T_(i, n_ + j) = -s * lp.A(i, j);
      }
      T_(i, 2 * n_ + i) = s;
      T_(i, cols_) = s * lp.b[i];
      if (s < 0.0) {
        T_(i, a) = 1.0;
        is_artificial_[a] = true;
        basis_[i] = a++;
      } else {
        basis_[i] = 2 * n_ + i;
      }
      initial_basis_[i] = basis_[i];
    }
    cost_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      cost_[j] = lp.c[j];
      cost_[n_ + j] = -lp.c[j];
    }
  }

  LPSolution run(const FiniteLP& lp) {
    LPSolution sol;
    // Phase I: minimize the sum of artificials.
    Vector phase1(cols_, 0.0);
    bool any_art = false;
    for (std::size_t j = 0; j < cols_; ++j)
      if (is_artificial_[j]) {
        phase1[j] = 1.0;
        any_art = true;
      }
    if (any_art) {
      iterate(phase1, /*allow_artificial=*/true);
      double infeas = 0.0;
      for (std::size_t r = 0; r < m_; ++r)
        if (is_artificial_[basis_[r]]) infeas += T_(r, cols_);
      if (infeas > opt_.feas_tol) {
        sol.status = LPStatus::Infeasible;
        return sol;
      }
      drive_out_artificials();
    }
    // Phase II.
    if (!iterate(cost_, /*allow_artificial=*/false)) {
      sol.status = LPStatus::Unbounded;
      return sol;
    }
    sol.status = LPStatus::Optimal;
    Vector x(cols_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) x[basis_[r]] = T_(r, cols_);
    sol.z.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) sol.z[j] = x[j] - x[n_ + j];
    sol.objective = dot(lp.c, sol.z);
    // y' = c_B^T B^{-1}; column i of B^{-1} is the current column of the
    // variable that formed the initial identity basis in row i.
    sol.dual.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double y = 0.0;
      for (std::size_t r = 0; r < m_; ++r) y += cost_[basis_[r]] * T_(r, initial_basis_[i]);
      sol.dual[i] = -sign_[i] * y;
    }
    sol.active_rows = active_rows_of(lp, sol.z, opt_.feas_tol);
    return sol;
  }

 private:
  // Bland's rule. Returns false on unboundedness.
  bool iterate(const Vector& cost, bool allow_artificial) {
    std::vector<bool> in_basis(cols_, false);
    for (std::size_t b : basis_) in_basis[b] = true;
    for (std::size_t it = 0; it < opt_.max_iterations; ++it) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (in_basis[j] || (!allow_artificial && is_artificial_[j])) continue;
        double d = cost[j];
        for (std::size_t r = 0; r < m_; ++r) d -= cost[basis_[r]] * T_(r, j);
        if (d < -opt_.cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;

      std::size_t leave = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = T_(r, enter);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = T_(r, cols_) / a;
        if (leave == m_) {
          best = ratio;
          leave = r;
          continue;
        }
        const double eps = 1e-14 * (1.0 + std::abs(best));
        if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis_[r] < basis_[leave])) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave == m_) return false;
      in_basis[basis_[leave]] = false;
      in_basis[enter] = true;
      pivot(leave, enter);
    }
    throw DomainError("simplex: iteration limit reached");
  }

  void pivot(std::size_t r, std::size_t c) {
    const double p = T_(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) T_(r, j) /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = T_(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) T_(i, j) -= f * T_(r, j);
      T_(i, c) = 0.0;
    }
    T_(r, c) = 1.0;
    basis_[r] = c;
  }

  // [A -A I] has full row rank, so every basic artificial (at level zero after
  // a successful phase I) can be exchanged for a structural or slack column.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial_[basis_[r]]) continue;
      std::size_t best = cols_;
      double mag = opt_.pivot_tol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (is_artificial_[j]) continue;
        if (std::find(basis_.begin(), basis_.end(), j) != basis_.end()) continue;
        if (std::abs(T_(r, j)) > mag) {
          mag = std::abs(T_(r, j));
          best = j;
        }
      }
      if (best != cols_) pivot(r, best);
    }
  }

  SimplexOptions opt_;
  std::size_t m_, n_, cols_ = 0;
  DenseMatrix T_;
  Vector cost_;
  std::vector<double> sign_;
  std::vector<std::size_t> basis_, initial_basis_;
  std::vector<bool> is_artificial_;
};

}  // namespace detail

/// Solves min c^T z s.t. A z <= b with free z. Deterministic (Bland's rule).
inline LPSolution solve_lp(const FiniteLP& lp, const SimplexOptions& opt = {}) {
  lp.validate();
  if (lp.m() == 0) {
    LPSolution sol;
    if (norm_inf(lp.c) > opt.cost_tol) {
      sol.status = LPStatus::Unbounded;
      return sol;
    }
    sol.status = LPStatus::Optimal;
    sol.z.assign(lp.n(), 0.0);
    return sol;
  }
  detail::Tableau tab(lp, opt);
  return tab.run(lp);
}

namespace detail {

inline void for_each_subset(std::size_t m, std::size_t k, const auto& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k > m) return;
  while (true) {
    fn(std::as_const(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::size_t numeric_rank(const DenseMatrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  return svd(M).rank;
}

}  // namespace detail

/// Brute-force LP solve for tiny instances (n <= 3, m <= 8).
///
/// Minimal faces of {A z <= b} are translates of null(A); each is reached by
/// some row subset S with rank(A_S) = rank(A) = r, and A_S^+ b_S is a point on
/// it. Unboundedness is detected from the extreme rays of the pointed part of
/// the recession cone, which come from row subsets of rank r - 1.
inline LPSolution enumerate_oracle(const FiniteLP& lp, double tol = 1e-9) {
  lp.validate();
  if (lp.n() > 3 || lp.m() > 8) throw InputError("enumerate_oracle: size guard (n <= 3, m <= 8) violated");
  const std::size_t m = lp.m();
  const std::size_t n = lp.n();

  auto feasible = [&](const Vector& z) {
    for (std::size_t i = 0; i < m; ++i)
      if (dot(lp.A.row(i), z) - lp.b[i] > tol) return false;
    return true;
  };

  LPSolution best;
  best.status = LPStatus::Infeasible;

  if (m == 0) {
    best.status = norm_inf(lp.c) > tol ? LPStatus::Unbounded : LPStatus::Optimal;
    if (best.status == LPStatus::Optimal) best.z.assign(n, 0.0);
    return best;
  }

  const SvdResult full = svd(lp.A);
  const std::size_t r = full.rank;

  // Orthonormal basis of the row space (columns of Q, n x r).
  DenseMatrix Q(n, r);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t i = 0; i < n; ++i) Q(i, k) = full.V(i, k);

  // c must lie in the row space, else the objective is unbounded along null(A).
  Vector c_perp = lp.c;
  for (std::size_t k = 0; k < r; ++k) {
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) p += Q(i, k) * lp.c[i];
    for (std::size_t i = 0; i < n; ++i) c_perp[i] -= p * Q(i, k);
  }
  const bool c_in_rowspace = norm_inf(c_perp) <= tol * std::max(1.0, norm_inf(lp.c));

  auto consider_point = [&](const Vector& z) {
    if (!feasible(z)) return;
    const double obj = dot(lp.c, z);
    if (best.status != LPStatus::Optimal || obj < best.objective - 1e-12) {
      best.status = LPStatus::Optimal;
      best.z = z;
      best.objective = obj;
    }
  };

  if (r == 0) {
    consider_point(Vector(n, 0.0));
  } else {
    detail::for_each_subset(m, r, [&](const std::vector<std::size_t>& S) {
      const DenseMatrix AS = lp.A.select_rows(S);
      if (detail::numeric_rank(AS) != r) return;
      Vector bS(r);
      for (std::size_t k = 0; k < r; ++k) bS[k] = lp.b[S[k]];
      consider_point(pinv(AS) * bS);
    });
  }

  if (best.status != LPStatus::Optimal) return best;  // no minimal face: infeasible
  if (!c_in_rowspace) {
    best = {};
    best.status = LPStatus::Unbounded;
    return best;
  }

  // Extreme rays of {d in rowspace(A) : A d <= 0}.
  bool unbounded = false;
  if (r >= 1) {
    detail::for_each_subset(m, r - 1, [&](const std::vector<std::size_t>& S) {
      if (unbounded) return;
      DenseMatrix ASQ(S.size(), r);
      for (std::size_t k = 0; k < S.size(); ++k)
        for (std::size_t j = 0; j < r; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += lp.A(S[k], i) * Q(i, j);
          ASQ(k, j) = s;
        }
      Vector y(r, 0.0);
      if (S.empty()) {
        y[0] = 1.0;  // r == 1: the row space itself is the line
      } else {
        const SvdResult s = svd(ASQ);
        if (s.rank != r - 1) return;
        for (std::size_t j = 0; j < r; ++j) y[j] = s.V(j, r - 1);
      }
      Vector d = Q * y;
      for (double sgn : {1.0, -1.0}) {
        Vector ds = d;
        for (double& v : ds) v *= sgn;
        bool recession = true;
        for (std::size_t i = 0; i < m && recession; ++i)
          if (dot(lp.A.row(i), ds) > tol) recession = false;
        if (recession && dot(lp.c, ds) < -tol) unbounded = true;
      }
    });
  }
  if (unbounded) {
    best = {};
    best.status = LPStatus::Unbounded;
    return best;
  }
  best.active_rows = detail::active_rows_of(lp, best.z, tol);
  return best;
}

}  // namespace ctlp

#endif  // CTLP_SIMPLEX_HPP
