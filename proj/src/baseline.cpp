#include "srrr/baseline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "srrr/errors.hpp"
#include "srrr/numerics.hpp"
#include "srrr/rng.hpp"
#include "srrr/solver.hpp"

namespace srrr {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_l1(const SrrrConfig& cfg, const char* where) {
  if (cfg.penalty.kind != PenaltyKind::L1) {
    std::ostringstream msg;
    msg << where << ": the subgradient benchmark supports the l1 penalty only, got "
        << penalty_name(cfg.penalty.kind);
    throw UnsupportedPenalty(msg.str());
  }
}

} // namespace

void SubGradConfig::validate() const {
  if (inner_iters < 0)
    throw std::invalid_argument("SubGradConfig: inner_iters must be >= 0");
  if (!(inner_tol >= 0.0))
    throw std::invalid_argument("SubGradConfig: inner_tol must be >= 0");
}

Mat subgrad_B(const Dataset& d, const SrrrConfig& cfg, const SubGradConfig& sg, const Mat& A,
              const Mat& B0) {
  require_l1(cfg, "subgrad_B");
  sg.validate();

  const Vec xi = cfg.resolved_xi(d.Q());
  const double lambda = cfg.penalty.lambda;
  const Mat XXt = d.X * d.X.transpose();
  const Mat XYtA = d.X * (d.Y.transpose() * A);
  const Mat AtA = A.transpose() * A;

  const double step_c = sg.step_c > 0.0 ? sg.step_c : 1.0 / lambda_max_sym(XXt);

  auto F_inner = [&](const Mat& B) {
    return loss(d, A, B) + regularizer(cfg.penalty, xi, B);
  };

  Mat B = B0;
  Mat B_best = B0;
  double F_prev = F_inner(B0);
  double F_best = F_prev;

  for (int t = 1; t <= sg.inner_iters; ++t) {
    // gradient of the smooth part plus a subgradient of the group norm
    Mat G = XXt * B * AtA - XYtA;
    for (Index i = 0; i < d.Q(); ++i) {
      const double nb = B.row(i).norm();
      if (nb > 0.0) G.row(i) += lambda * xi(i) / nb * B.row(i);
    }

    B -= (step_c / std::sqrt(static_cast<double>(t))) * G;

    const double F = F_inner(B);
    if (F < F_best) {
      F_best = F;
      B_best = B;
    }
    if (sg.inner_tol > 0.0 && std::abs(F - F_prev) < sg.inner_tol) break;
    F_prev = F;
  }
  return B_best;
}

FitResult fit_subgrad(const Dataset& d, const SrrrConfig& cfg, const SubGradConfig& sg,
                      std::optional<std::pair<Mat, Mat>> init, std::uint64_t seed,
                      double time_budget_s) {
  cfg.validate(d);
  require_l1(cfg, "fit_subgrad");
  sg.validate();

  Mat A, B;
  if (init) {
    A = std::move(init->first);
    B = std::move(init->second);
    if (A.rows() != d.P() || A.cols() != cfg.rank || B.rows() != d.Q() || B.cols() != cfg.rank)
      throw std::invalid_argument("fit_subgrad: init has wrong shape");
    if (!A.allFinite() || !B.allFinite())
      throw std::invalid_argument("fit_subgrad: init has non-finite entries");
  } else {
    std::tie(A, B) = default_init(d, cfg.rank);
  }

  FitResult res;
  res.method = "altmin-subgrad";

  const auto t0 = std::chrono::steady_clock::now();
  double F = objective(d, cfg, A, B);
  if (!std::isfinite(F))
    throw NumericalFailure("fit_subgrad: objective not finite at initialization");
  res.trace.push_back({0, F, 0.0});

  res.status = FitStatus::MaxIterReached;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    if (B.norm() == 0.0) {
      res.diagnostic = "B vanished: the Procrustes target Y X' B is zero and A "
                       "cannot be updated";
      break;
    }

    try {
      A = update_A(d, B);
    } catch (const DegenerateIterate& e) {
      throw DegenerateIterate(std::string(e.what()) + " (iteration " + std::to_string(k) + ")",
                              e.found_rank, e.wanted_rank, k);
    }
    B = subgrad_B(d, cfg, sg, A, B);

    const double F_new = objective(d, cfg, A, B);
    if (!std::isfinite(F_new)) {
      std::ostringstream msg;
      msg << "fit_subgrad: objective became non-finite at iteration " << k;
      throw NumericalFailure(msg.str());
    }
    res.trace.push_back({k, F_new, elapsed_seconds(t0)});

    if (std::abs(F - F_new) / std::max(1.0, F) <= cfg.tol) {
      res.status = FitStatus::Converged;
      F = F_new;
      break;
    }
    F = F_new;

    if (elapsed_seconds(t0) >= time_budget_s) {
      res.diagnostic = "time budget exhausted";
      break;
    }
  }

  res.A = std::move(A);
  res.B = std::move(B);
  res.selected_rows = nonzero_rows(res.B);
  (void)seed; // reserved: the subgradient path has no stochastic element
  return res;
}

} // namespace srrr
