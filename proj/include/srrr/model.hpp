#ifndef SRRR_MODEL_HPP
#define SRRR_MODEL_HPP

#include <string>
#include <vector>

#include "srrr/penalty.hpp"
#include "srrr/types.hpp"

namespace srrr {

/// Problem data: predictors X (Q x N) and responses Y (P x N), one column per
/// sample. Requires a common sample count N >= max(P, Q) and finite entries.
struct Dataset {
  Mat X;
  Mat Y;

  Dataset(Mat X_in, Mat Y_in);

  Index P() const { return Y.rows(); }
  Index Q() const { return X.rows(); }
  Index N() const { return X.cols(); }
};

/// Copy of `d` with the mean of every variable (row of X and of Y) removed.
Dataset centered(const Dataset& d);

/// Everything the solver needs besides the data.
struct SrrrConfig {
  Index rank = 1;
  Penalty penalty{};
  Vec xi;                            // row weights, empty means all-ones
  double tol = 1e-8;                 // relative objective-decrease stop
  int max_iter = 1000;
  double psi_safeguard = 1.0 + 1e-10; // multiplier on lambda_max(X X')
  bool debug_trace = false;           // also record F after the A- and B-steps

  /// Row weights resolved against a predictor count (all-ones when unset).
  Vec resolved_xi(Index Q) const;

  void validate(const Dataset& d) const;
};

struct TraceEntry {
  int iter = 0;
  double objective = 0.0;
  double seconds = 0.0;
};

/// Sub-iteration objective record, kept only in debug mode.
struct StepTraceEntry {
  int iter = 0;
  char step = 'A'; // 'A' or 'B'
  double objective = 0.0;
};

/// Mutable state of one solver run.
struct SolverState {
  Mat A; // P x r, orthonormal columns
  Mat B; // Q x r
  int iter = 0;
  std::vector<TraceEntry> objective_trace;
};

enum class FitStatus { Converged, MaxIterReached };

inline const char* fit_status_name(FitStatus s) {
  return s == FitStatus::Converged ? "Converged" : "MaxIterReached";
}

struct FitResult {
  Mat A;
  Mat B;
  std::vector<TraceEntry> trace;
  std::vector<StepTraceEntry> step_trace; // empty unless debug_trace
  FitStatus status = FitStatus::MaxIterReached;
  std::vector<Index> selected_rows; // i with ||b_i||_2 > 0
  std::string method;               // "altmin-mm" or "altmin-subgrad"
  std::string diagnostic;           // non-empty only for abnormal termination

  int iters() const { return trace.empty() ? 0 : trace.back().iter; }
  double final_objective() const { return trace.empty() ? 0.0 : trace.back().objective; }
};

/// Least squares loss 0.5 * ||Y - A B' X||_F^2.
double loss(const Dataset& d, const Mat& A, const Mat& B);

/// Group-sparsity regularizer sum_i lambda * xi_i * rho(||b_i||_2).
double regularizer(const Penalty& p, const Vec& xi, const Mat& B);

/// Full objective F(A, B) = loss + regularizer.
double objective(const Dataset& d, const SrrrConfig& cfg, const Mat& A, const Mat& B);

} // namespace srrr

#endif
