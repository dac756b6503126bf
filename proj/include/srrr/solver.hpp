#ifndef SRRR_SOLVER_HPP
#define SRRR_SOLVER_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

#include "srrr/model.hpp"
#include "srrr/types.hpp"

// Alternating minimization with a majorized B-step:
//   A-step  exact orthogonal Procrustes update A = U V' from the thin SVD of
//           P_A = Y X' B;
//   B-step  quadratic majorization of the loss at (A, B) plus a tangent
//           majorization of the concave part of the penalty, minimized in
//           closed form by a row-wise proximal update.
// Every iteration decreases F(A, B) = loss + regularizer.

namespace srrr {

/// Constants of the majorized B-subproblem at one iterate.
struct MajorizationContext {
  double psi = 0.0; // curvature constant, >= lambda_max(X X') under A'A = I
  Mat P_B;          // gradient-step target of the loss majorizer
  Mat K;            // tangent slope of the concave penalty part, row i is
                    //   lambda * xi_i * (rho'(||b_i||) - kappa) * b_i / ||b_i||
  Mat P_BR;         // P_B - K / psi, the proximal target
};

/// Orthogonal Procrustes projection: the A with orthonormal columns closest to
/// `target` in Frobenius norm, i.e. U V' from its thin SVD. Throws
/// DegenerateIterate when target has numerical rank below its column count.
Mat procrustes(const Mat& target);

/// A-step of the alternating scheme: procrustes(Y X' B).
Mat update_A(const Dataset& d, const Mat& B);

/// Assemble the majorized B-subproblem at (A, B) with curvature psi.
/// Requires A'A = I (within 1e-8) and psi >= lambda_max(X X').
MajorizationContext build_majorization(const Dataset& d, const SrrrConfig& cfg, const Mat& A,
                                       const Mat& B, double psi);

/// Closed-form minimizer of the majorized B-subproblem: row i of the result is
///   max(0, 1 - kappa * lambda * xi_i / (psi * ||p_i||)) * p_i,
/// with p_i the i-th row of ctx.P_BR (zero rows map to zero).
Mat prox_rows(const MajorizationContext& ctx, const SrrrConfig& cfg);

/// Deterministic warm start: A0 spans the r leading left singular vectors of
/// Y X'; B0 is the ridge-stabilized least-squares factor (X X' + dI)^-1 X Y' A0.
std::pair<Mat, Mat> default_init(const Dataset& d, Index rank);

/// Run the alternating solver until the relative objective decrease falls
/// below cfg.tol, cfg.max_iter is reached, or time_budget_s elapses.
/// `init`, when given, must have orthonormal A columns. `seed` drives only the
/// deterministic perturbation used to escape a rank-deficient Procrustes
/// target.
FitResult fit(const Dataset& d, const SrrrConfig& cfg,
              std::optional<std::pair<Mat, Mat>> init = std::nullopt, std::uint64_t seed = 0,
              double time_budget_s = std::numeric_limits<double>::infinity());

/// Indices of rows of B with nonzero Euclidean norm.
std::vector<Index> nonzero_rows(const Mat& B);

} // namespace srrr

#endif
