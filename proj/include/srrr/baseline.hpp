#ifndef SRRR_BASELINE_HPP
#define SRRR_BASELINE_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

#include "srrr/model.hpp"
#include "srrr/types.hpp"

// Benchmark solver: same alternating outer loop and exact A-step as the main
// solver, but the B-subproblem is attacked by a plain inner subgradient loop
// with diminishing steps. It exists to be measured against, not to win.
// Supports the L1 penalty only.

namespace srrr {

struct SubGradConfig {
  int inner_iters = 50;     // subgradient steps per outer iteration
  double step_c = 0.0;      // step scale, eta_t = step_c / sqrt(t);
                            // <= 0 selects the default 1 / lambda_max(X X')
  double inner_tol = 0.0;   // early inner stop on |F_t - F_{t-1}| < inner_tol

  void validate() const;
};

/// Inner solve of the B-subproblem min_B loss(A, B) + R_l1(B) by subgradient
/// descent from B0. Returns the best iterate seen (B0 included), so the
/// result never has a larger objective than B0.
Mat subgrad_B(const Dataset& d, const SrrrConfig& cfg, const SubGradConfig& sg, const Mat& A,
              const Mat& B0);

/// Alternate the exact A-step with subgrad_B until the outer relative
/// objective decrease falls below cfg.tol, cfg.max_iter, or the time budget.
FitResult fit_subgrad(const Dataset& d, const SrrrConfig& cfg, const SubGradConfig& sg,
                      std::optional<std::pair<Mat, Mat>> init = std::nullopt,
                      std::uint64_t seed = 0,
                      double time_budget_s = std::numeric_limits<double>::infinity());

} // namespace srrr

#endif
