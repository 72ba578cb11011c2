#ifndef CTLP_LINALG_HPP
#define CTLP_LINALG_HPP

// Small dense real linear algebra: one-sided Jacobi SVD, Moore-Penrose
// pseudo-inverse, Gram determinants and LU solves. Sized for the handful of
// constraint rows active at a single time instant, not for large systems.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctlp/errors.hpp"

namespace ctlp {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InputError("DenseMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  static DenseMatrix from_rows(const std::vector<Vector>& rows, std::size_t cols) {
    DenseMatrix M(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw InputError("DenseMatrix: row length mismatch");
      std::copy(rows[i].begin(), rows[i].end(), M.row_begin(i));
    }
    return M;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  std::span<const double> data() const noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  double* row_begin(std::size_t i) noexcept { return data_.data() + i * cols_; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  Vector row_vector(std::size_t i) const { return Vector(row(i).begin(), row(i).end()); }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  DenseMatrix transpose() const {
    DenseMatrix T(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
    return T;
  }

  DenseMatrix select_rows(std::span<const std::size_t> idx) const {
    DenseMatrix S(idx.size(), cols_);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= rows_) throw InputError("select_rows: index out of range");
      std::copy(row(idx[k]).begin(), row(idx[k]).end(), S.row_begin(k));
    }
    return S;
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Maximum absolute row sum.
  double norm_inf() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (double v : row(i)) s += std::abs(v);
      m = std::max(m, s);
    }
    return m;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw InputError("DenseMatrix: product dimension mismatch");
    DenseMatrix p(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) p(i, j) += aik * b(k, j);
      }
    return p;
  }

  friend Vector operator*(const DenseMatrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw InputError("DenseMatrix: matrix-vector dimension mismatch");
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw InputError("DenseMatrix: difference shape mismatch");
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] -= b.data_[k];
    return a;
  }

  friend DenseMatrix operator*(double s, DenseMatrix a) {
    for (double& v : a.data_) v *= s;
    return a;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

/// Relative cutoff below which a singular value counts as zero.
inline constexpr double kRankTol = 1e-10;

struct SvdResult {
  DenseMatrix U;   // rows x rows
  Vector sigma;    // min(rows, cols), non-increasing
  DenseMatrix V;   // cols x cols
  std::size_t rank = 0;
};

namespace detail {

// Completes the first `filled` orthonormal columns of Q (n x n) to a full
// orthonormal basis using standard basis vectors and two Gram-Schmidt passes.
inline void complete_orthonormal(DenseMatrix& Q, std::size_t filled) {
  const std::size_t n = Q.rows();
  std::size_t col = filled;
  for (std::size_t e = 0; e < n && col < n; ++e) {
    Vector v(n, 0.0);
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < col; ++k) {
        double p = 0.0;
        for (std::size_t i = 0; i < n; ++i) p += Q(i, k) * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= p * Q(i, k);
      }
    const double nv = norm2(v);
    if (nv < 1e-8) continue;
    for (std::size_t i = 0; i < n; ++i) Q(i, col) = v[i] / nv;
    ++col;
  }
}

// One-sided Jacobi on a tall-or-square matrix (rows >= cols).
inline SvdResult jacobi_svd_tall(const DenseMatrix& M) {
  const std::size_t r = M.rows();
  const std::size_t c = M.cols();
  DenseMatrix W = M;
  DenseMatrix V = DenseMatrix::identity(c);
  constexpr double eps = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < c; ++i)
      for (std::size_t j = i + 1; j < c; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < r; ++k) {
          alpha += W(k, i) * W(k, i);
          beta += W(k, j) * W(k, j);
          gamma += W(k, i) * W(k, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (std::size_t k = 0; k < r; ++k) {
          const double wi = W(k, i), wj = W(k, j);
          W(k, i) = cs * wi - sn * wj;
          W(k, j) = sn * wi + cs * wj;
        }
        for (std::size_t k = 0; k < c; ++k) {
          const double vi = V(k, i), vj = V(k, j);
          V(k, i) = cs * vi - sn * vj;
          V(k, j) = sn * vi + cs * vj;
        }
      }
    if (!rotated) break;
  }

  Vector norms(c);
  for (std::size_t j = 0; j < c; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) s += W(k, j) * W(k, j);
    norms[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  SvdResult out;
  out.sigma.resize(c);
  out.U = DenseMatrix(r, r);
  out.V = DenseMatrix(c, c);
  const double s1 = c > 0 ? norms[order[0]] : 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = norms[j];
    for (std::size_t i = 0; i < c; ++i) out.V(i, k) = V(i, j);
    if (s1 > 0.0 && norms[j] > kRankTol * s1) ++out.rank;
  }
  // Left vectors for the numerically nonzero singular values; the rest of U
  // is an orthonormal completion.
  for (std::size_t k = 0; k < out.rank; ++k)
    for (std::size_t i = 0; i < r; ++i) out.U(i, k) = W(i, order[k]) / out.sigma[k];
  complete_orthonormal(out.U, out.rank);
  return out;
}

}  // namespace detail

/// Full SVD M = U diag(sigma) V^T with U, V square orthogonal.
inline SvdResult svd(const DenseMatrix& M) {
  if (!M.all_finite()) throw InputError("svd: non-finite entries");
  if (M.rows() >= M.cols()) return detail::jacobi_svd_tall(M);
  SvdResult t = detail::jacobi_svd_tall(M.transpose());
  return SvdResult{std::move(t.V), std::move(t.sigma), std::move(t.U), t.rank};
}

/// Moore-Penrose pseudo-inverse V Sigma^+ U^T.
inline DenseMatrix pinv(const DenseMatrix& M) {
  const SvdResult s = svd(M);
  DenseMatrix P(M.cols(), M.rows());
  for (std::size_t k = 0; k < s.rank; ++k) {
    const double inv = 1.0 / s.sigma[k];
    for (std::size_t i = 0; i < M.cols(); ++i) {
      const double vi = s.V(i, k) * inv;
      if (vi == 0.0) continue;
      for (std::size_t j = 0; j < M.rows(); ++j) P(i, j) += vi * s.U(j, k);
    }
  }
  return P;
}

/// Smallest singular value above the rank threshold.
inline double sigma_min_positive(const DenseMatrix& M) {
  const SvdResult s = svd(M);
  if (s.rank == 0) throw DomainError("sigma_min_positive: matrix has no positive singular value");
  return s.sigma[s.rank - 1];
}

inline double spectral_norm(const DenseMatrix& M) {
  if (M.empty()) return 0.0;
  const SvdResult s = svd(M);
  return s.sigma.empty() ? 0.0 : s.sigma.front();
}

/// LU factorization with partial pivoting of a square matrix.
class LuDecomposition {
 public:
  /// Pivots with magnitude at or below `singular_tol` mark the matrix singular.
  LuDecomposition(DenseMatrix A, double singular_tol) : lu_(std::move(A)), perm_(lu_.rows()) {
    if (lu_.rows() != lu_.cols()) throw InputError("LU: matrix not square");
    const std::size_t n = lu_.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
      if (std::abs(lu_(p, k)) <= singular_tol) {
        singular_ = true;
        return;
      }
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
        sign_ = -sign_;
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = lu_(i, k) / lu_(k, k);
        lu_(i, k) = f;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  bool singular() const noexcept { return singular_; }

  double determinant() const noexcept {
    if (singular_) return 0.0;
    double d = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
  }

  Vector solve(std::span<const double> b) const {
    if (singular_) throw DomainError("LU: singular matrix");
    const std::size_t n = lu_.rows();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
      x[i] = s / lu_(i, i);
    }
    return x;
  }

  DenseMatrix inverse() const {
    const std::size_t n = lu_.rows();
    DenseMatrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      std::fill(e.begin(), e.end(), 0.0);
      e[j] = 1.0;
      const Vector col = solve(e);
      for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
  }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
  double sign_ = 1.0;
  bool singular_ = false;
};

/// Determinant of a square matrix via partial-pivoting LU.
inline double determinant(const DenseMatrix& A) {
  if (A.rows() != A.cols()) throw InputError("determinant: matrix not square");
  if (A.rows() == 0) return 1.0;
  return LuDecomposition(A, 0.0).determinant();
}

/// Solves the square system A x = b; nullopt when A is numerically singular.
inline std::optional<Vector> solve_square(const DenseMatrix& A, std::span<const double> b,
                                          double rel_tol = 1e-12) {
  const double scale = std::max(A.norm_inf(), std::numeric_limits<double>::min());
  LuDecomposition lu(A, rel_tol * scale);
  if (lu.singular()) return std::nullopt;
  return lu.solve(b);
}

/// det(M M^T). Exactly 0 when pivoting meets a pivot below 1e-12 ||M M^T||_inf;
/// tiny negative round-off is clamped to 0. The empty product is 1.
inline double gram_det(const DenseMatrix& M) {
  if (!M.all_finite()) throw InputError("gram_det: non-finite entries");
  if (M.rows() == 0) return 1.0;
  const DenseMatrix G = M * M.transpose();
  const double scale = G.norm_inf();
  if (scale == 0.0) return 0.0;
  const LuDecomposition lu(G, 1e-12 * scale);
  const double d = lu.determinant();
  return d < 0.0 && d >= -1e-12 ? 0.0 : d;
}

}  // namespace ctlp

#endif  // CTLP_LINALG_HPP
