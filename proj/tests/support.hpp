#ifndef CTLP_TESTS_SUPPORT_HPP
#define CTLP_TESTS_SUPPORT_HPP

#include <random>
#include <string>

#include <Eigen/Dense>

#include "ctlp/ctlp.hpp"

namespace ctlp::test {

inline std::string data(const std::string& name) { return std::string(CTLP_DATA_DIR) + "/" + name; }

inline Eigen::MatrixXd to_eigen(const DenseMatrix& M) {
  Eigen::MatrixXd E(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) E(i, j) = M(i, j);
  return E;
}

inline DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  DenseMatrix M(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) M(i, j) = U(rng);
  return M;
}

inline DenseMatrix random_int_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo, int hi) {
  std::uniform_int_distribution<int> U(lo, hi);
  DenseMatrix M(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) M(i, j) = U(rng);
  return M;
}

/// Random instance with piecewise-constant A and piecewise-affine b, c.
/// b >= 1 keeps the origin strictly feasible; box rows |z_j| <= 4 keep every
/// pointwise LP bounded.
inline CTLPInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t extra_rows, std::size_t intervals,
                                    bool constant_data = false) {
  const Breakpoints bp = Breakpoints::uniform(1.0, intervals);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> B(1.0, 2.0);
  auto pw = [&](auto draw_const, bool affine) {
    std::vector<Polynomial> pieces;
    for (std::size_t p = 0; p < intervals; ++p)
      pieces.push_back(affine ? Polynomial({draw_const(), 0.5 * U(rng)}) : Polynomial({draw_const()}));
    return PiecewiseFn(bp, std::move(pieces));
  };
  const bool affine = !constant_data;
  std::vector<std::vector<PiecewiseFn>> A;
  std::vector<PiecewiseFn> b;
  for (std::size_t j = 0; j < n; ++j)
    for (double s : {1.0, -1.0}) {
      std::vector<PiecewiseFn> row;
      for (std::size_t k = 0; k < n; ++k) row.push_back(PiecewiseFn::constant(bp, k == j ? s : 0.0));
      A.push_back(std::move(row));
      b.push_back(PiecewiseFn::constant(bp, 4.0));
    }
  for (std::size_t r = 0; r < extra_rows; ++r) {
    std::vector<PiecewiseFn> row;
    for (std::size_t k = 0; k < n; ++k) row.push_back(pw([&] { return U(rng); }, false));
    A.push_back(std::move(row));
    b.push_back(pw([&] { return B(rng); }, affine));
  }
  std::vector<PiecewiseFn> c;
  for (std::size_t k = 0; k < n; ++k) c.push_back(pw([&] { return U(rng); }, affine));
  return CTLPInstance(std::move(A), std::move(b), std::move(c));
}

}  // namespace ctlp::test

#endif  // CTLP_TESTS_SUPPORT_HPP
