#ifndef SRRR_TESTS_SUPPORT_HPP
#define SRRR_TESTS_SUPPORT_HPP

// Test-only helpers and independent oracles. Everything here deliberately
// avoids the library code paths it is used to check: eigenvalues come from
// Eigen's symmetric solver, losses from elementwise loops, minimizers from
// scalar search.

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "srrr/model.hpp"
#include "srrr/penalty.hpp"
#include "srrr/rng.hpp"
#include "srrr/types.hpp"

namespace testsup {

using srrr::Index;
using srrr::Mat;
using srrr::Vec;

inline Mat random_matrix(std::uint64_t seed, Index rows, Index cols) {
  srrr::Rng rng(seed);
  return rng.gaussian_matrix(rows, cols);
}

/// Random matrix with orthonormal columns, via Eigen's Householder QR.
inline Mat random_orthonormal(std::uint64_t seed, Index rows, Index cols) {
  const Mat g = random_matrix(seed, rows, cols);
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ() * Mat::Identity(rows, cols);
}

/// Largest eigenvalue from a full symmetric eigendecomposition.
inline double lambda_max_oracle(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvalues().maxCoeff();
}

/// 0.5 * sum_t ||y_t - A B' x_t||^2 accumulated sample by sample, entry by entry.
inline double loss_oracle(const Mat& X, const Mat& Y, const Mat& A, const Mat& B) {
  const Mat C = A * B.transpose();
  double total = 0.0;
  for (Index t = 0; t < X.cols(); ++t) {
    for (Index i = 0; i < Y.rows(); ++i) {
      double pred = 0.0;
      for (Index q = 0; q < X.rows(); ++q) pred += C(i, q) * X(q, t);
      const double r = Y(i, t) - pred;
      total += r * r;
    }
  }
  return 0.5 * total;
}

/// Central finite difference of rho at t.
inline double rho_prime_fd(const srrr::Penalty& p, double t, double h = 1e-6) {
  return (srrr::rho(p, t + h) - srrr::rho(p, t - h)) / (2.0 * h);
}

/// Concave remainder R^-(B) = sum_i lambda*xi_i*(rho(||b_i||) - kappa*||b_i||),
/// evaluated from the scalar penalty alone.
inline double r_minus(const srrr::Penalty& p, const Vec& xi, const Mat& B) {
  const double kap = srrr::kappa(p);
  double total = 0.0;
  for (Index i = 0; i < B.rows(); ++i) {
    const double nb = B.row(i).norm();
    total += p.lambda * xi(i) * (srrr::rho(p, nb) - kap * nb);
  }
  return total;
}

/// Entrywise central finite difference of R^-.
inline Mat r_minus_gradient_fd(const srrr::Penalty& p, const Vec& xi, const Mat& B,
                               double h = 1e-6) {
  Mat g(B.rows(), B.cols());
  Mat Bp = B;
  for (Index i = 0; i < B.rows(); ++i) {
    for (Index j = 0; j < B.cols(); ++j) {
      const double orig = B(i, j);
      Bp(i, j) = orig + h;
      const double fp = r_minus(p, xi, Bp);
      Bp(i, j) = orig - h;
      const double fm = r_minus(p, xi, Bp);
      Bp(i, j) = orig;
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

/// Minimizer of g(b) = 0.5*psi*||b - p||^2 + w*||b||_2 by scalar search.
///
/// Any component of b orthogonal to p increases both terms, so the minimizer
/// lies on the segment {c * p : c in [0, 1]}; golden-section search over c
/// needs nothing but evaluations of g.
inline Vec prox_row_oracle(double psi, double w, const Vec& p) {
  if (p.norm() == 0.0) return Vec::Zero(p.size());
  auto g = [&](double c) {
    const Vec b = c * p;
    return 0.5 * psi * (b - p).squaredNorm() + w * b.norm();
  };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double c1 = hi - phi * (hi - lo), c2 = lo + phi * (hi - lo);
  double g1 = g(c1), g2 = g(c2);
  for (int it = 0; it < 200; ++it) {
    if (g1 < g2) {
      hi = c2;
      c2 = c1;
      g2 = g1;
      c1 = hi - phi * (hi - lo);
      g1 = g(c1);
    } else {
      lo = c1;
      c1 = c2;
      g1 = g2;
      c2 = lo + phi * (hi - lo);
      g2 = g(c2);
    }
  }
  const double c = 0.5 * (lo + hi);
  // the boundary c = 0 is a kink; snap when the search pinned itself there
  if (g(0.0) <= g(c)) return Vec::Zero(p.size());
  return c * p;
}

/// Synthetic low-rank-plus-noise dataset for solver tests.
inline srrr::Dataset random_dataset(std::uint64_t seed, Index P, Index Q, Index r, Index N,
                                    double noise = 0.5) {
  srrr::Rng rng(seed);
  const Mat A = rng.gaussian_matrix(P, r);
  const Mat B = rng.gaussian_matrix(Q, r);
  const Mat X = rng.gaussian_matrix(Q, N);
  Mat Y = A * (B.transpose() * X);
  if (noise > 0.0) Y += noise * rng.gaussian_matrix(P, N);
  return srrr::Dataset(X, std::move(Y));
}

} // namespace testsup

#endif
