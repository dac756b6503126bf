#ifndef SRRR_NUMERICS_HPP
#define SRRR_NUMERICS_HPP

#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include <Eigen/Dense>

#include "srrr/errors.hpp"
#include "srrr/types.hpp"

// Dense real-matrix primitives the solver is built on: thin SVD, thin QR,
// largest-eigenvalue estimation and row norms. All functions are pure,
// accept arbitrary Eigen expressions and return plain dense results.

namespace srrr {

template <typename Scalar>
struct ThinSvd {
  Matrix<Scalar> U; // m x k, orthonormal columns
  Vector<Scalar> s; // k, nonincreasing, nonnegative
  Matrix<Scalar> V; // n x k, orthonormal columns
};

template <typename Scalar>
struct ThinQr {
  Matrix<Scalar> Q; // m x n, orthonormal columns
  Matrix<Scalar> R; // n x n, upper triangular, nonnegative diagonal
};

/// Rank-k thin SVD, M ~ U * s.asDiagonal() * V'.
///
/// Column signs are normalized so the largest-magnitude entry of each column
/// of U is positive (V gets the matching flip), which makes outputs
/// deterministic; U*V' itself is unaffected.
template <typename Derived>
ThinSvd<typename Derived::Scalar> thin_svd(const Eigen::MatrixBase<Derived>& M, Index k) {
  using Scalar = typename Derived::Scalar;
  static_assert(std::is_floating_point_v<Scalar>, "thin_svd requires a real scalar type");

  const Index m = M.rows(), n = M.cols();
  if (k < 1 || k > std::min(m, n)) {
    std::ostringstream msg;
    msg << "thin_svd: k=" << k << " out of range for " << m << "x" << n << " matrix";
    throw std::invalid_argument(msg.str());
  }
  if (!M.allFinite()) throw std::invalid_argument("thin_svd: input has non-finite entries");

  Eigen::JacobiSVD<Matrix<Scalar>> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);

  ThinSvd<Scalar> out;
  out.U = svd.matrixU().leftCols(k);
  out.s = svd.singularValues().head(k);
  out.V = svd.matrixV().leftCols(k);
  if (!out.U.allFinite() || !out.s.allFinite() || !out.V.allFinite())
    throw NumericalFailure("thin_svd: decomposition produced non-finite values");

  for (Index j = 0; j < k; ++j) {
    Index imax = 0;
    out.U.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.U(imax, j) < Scalar(0)) {
      out.U.col(j) = -out.U.col(j);
      out.V.col(j) = -out.V.col(j);
    }
  }
  return out;
}

/// Thin Householder QR of a tall matrix (m >= n), M = Q * R.
///
/// The factorization is normalized to a nonnegative diagonal of R.
/// Throws RankDeficientError when some |R_ii| falls below 1e-12 * ||M||_F.
template <typename Derived>
ThinQr<typename Derived::Scalar> qr_thin(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  static_assert(std::is_floating_point_v<Scalar>, "qr_thin requires a real scalar type");

  const Index m = M.rows(), n = M.cols();
  if (m < n) {
    std::ostringstream msg;
    msg << "qr_thin: matrix is " << m << "x" << n << ", need rows >= cols";
    throw std::invalid_argument(msg.str());
  }
  if (!M.allFinite()) throw std::invalid_argument("qr_thin: input has non-finite entries");

  const Scalar scale = M.norm();
  if (scale == Scalar(0)) throw RankDeficientError("qr_thin: zero matrix");

  Eigen::HouseholderQR<Matrix<Scalar>> qr(M);
  ThinQr<Scalar> out;
  out.Q = qr.householderQ() * Matrix<Scalar>::Identity(m, n);
  out.R = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();

  for (Index j = 0; j < n; ++j) {
    if (out.R(j, j) < Scalar(0)) {
      out.R.row(j) = -out.R.row(j);
      out.Q.col(j) = -out.Q.col(j);
    }
  }
  for (Index j = 0; j < n; ++j) {
    if (std::abs(out.R(j, j)) < Scalar(1e-12) * scale) {
      std::ostringstream msg;
      msg << "qr_thin: rank-deficient input, |R(" << j << "," << j << ")| = "
          << std::abs(out.R(j, j)) << " below 1e-12 * ||M||_F = " << Scalar(1e-12) * scale;
      throw RankDeficientError(msg.str());
    }
  }
  return out;
}

/// Largest eigenvalue of a symmetric matrix by power iteration.
///
/// Deterministic: starts from the normalized all-ones vector and iterates on
/// the Gershgorin-shifted matrix M + c*I (which is PSD with the same
/// eigenvectors), so the dominant eigenvalue of the shifted matrix is
/// lambda_max(M) + c even when M is indefinite. Runs until the Rayleigh
/// quotient moves by less than 0.1 * tol (relative) or 10000 iterations.
template <typename Derived>
typename Derived::Scalar lambda_max_sym(const Eigen::MatrixBase<Derived>& M,
                                        typename Derived::Scalar tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  static_assert(std::is_floating_point_v<Scalar>, "lambda_max_sym requires a real scalar type");

  const Index n = M.rows();
  if (n != M.cols()) throw std::invalid_argument("lambda_max_sym: matrix is not square");
  if (!M.allFinite()) throw std::invalid_argument("lambda_max_sym: input has non-finite entries");
  if (!(tol > Scalar(0))) throw std::invalid_argument("lambda_max_sym: tol must be positive");

  const Matrix<Scalar> A = M; // materialize the expression once
  const Scalar scale = A.norm();
  if ((A - A.transpose()).norm() > Scalar(1e-10) * scale)
    throw std::invalid_argument("lambda_max_sym: input is not symmetric");
  if (scale == Scalar(0)) return Scalar(0);

  // Gershgorin bound: all eigenvalues of A + c*I lie in [0, 2c].
  const Scalar c = A.cwiseAbs().rowwise().sum().maxCoeff();

  // Column Rayleigh quotients are lower bounds on lambda_max; they rescue the
  // (contrived) case where the all-ones start is orthogonal to the dominant
  // eigenvector.
  Scalar best = std::numeric_limits<Scalar>::lowest();
  for (Index j = 0; j < n; ++j) {
    const Scalar cn = A.col(j).norm();
    if (cn > Scalar(0)) {
      const Vector<Scalar> u = A.col(j) / cn;
      best = std::max(best, u.dot(A * u));
    }
  }

  Vector<Scalar> v = Vector<Scalar>::Constant(n, Scalar(1) / std::sqrt(Scalar(n)));
  Scalar lambda = v.dot(A * v);
  constexpr int kMaxIter = 10000;
  for (int it = 0; it < kMaxIter; ++it) {
    Vector<Scalar> w = A * v + c * v;
    const Scalar wn = w.norm();
    if (wn == Scalar(0)) break; // v spans the lowest eigenspace exactly
    v = w / wn;
    const Scalar lambda_new = v.dot(A * v);
    const bool converged = std::abs(lambda_new - lambda) <=
                           Scalar(0.1) * tol * std::max(Scalar(1), std::abs(lambda_new));
    lambda = lambda_new;
    if (converged) break;
  }
  return std::max(lambda, best);
}

/// Euclidean norm of every row.
template <typename Derived>
Vector<typename Derived::Scalar> row_norms(const Eigen::MatrixBase<Derived>& M) {
  return M.rowwise().norm();
}

} // namespace srrr

#endif
