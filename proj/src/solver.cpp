#include "srrr/solver.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "srrr/errors.hpp"
#include "srrr/numerics.hpp"
#include "srrr/rng.hpp"

namespace srrr {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_orthonormal(const Mat& A, const char* where) {
  const Mat gram = A.transpose() * A;
  const double err = (gram - Mat::Identity(A.cols(), A.cols())).cwiseAbs().maxCoeff();
  if (!(err <= 1e-8)) {
    std::ostringstream msg;
    msg << where << ": A does not have orthonormal columns (|A'A - I|_max = " << err << ")";
    throw InvalidState(msg.str());
  }
}

// Adds seed-determined noise of size ~1e-10 to the zero rows of B. Used once
// to retry a rank-deficient Procrustes target.
Mat perturb_zero_rows(const Mat& B, std::uint64_t seed) {
  Rng rng(seed);
  Mat out = B;
  for (Index i = 0; i < out.rows(); ++i) {
    if (out.row(i).norm() == 0.0) {
      for (Index j = 0; j < out.cols(); ++j) out(i, j) = 1e-10 * rng.gaussian();
    }
  }
  return out;
}

} // namespace

Mat procrustes(const Mat& target) {
  const Index r = target.cols();
  const ThinSvd<double> svd = thin_svd(target, r);
  const double s1 = svd.s(0);
  if (s1 == 0.0 || svd.s(r - 1) < 1e-12 * s1) {
    Index found = 0;
    while (found < r && svd.s(found) >= 1e-12 * s1 && svd.s(found) > 0.0) ++found;
    std::ostringstream msg;
    msg << "procrustes: target has numerical rank " << found << " < " << r;
    throw DegenerateIterate(msg.str(), found, r);
  }
  return svd.U * svd.V.transpose();
}

Mat update_A(const Dataset& d, const Mat& B) {
  if (B.rows() != d.Q())
    throw std::invalid_argument("update_A: B must have one row per predictor");
  if (!B.allFinite()) throw std::invalid_argument("update_A: B has non-finite entries");
  return procrustes(d.Y * (d.X.transpose() * B));
}

MajorizationContext build_majorization(const Dataset& d, const SrrrConfig& cfg, const Mat& A,
                                       const Mat& B, double psi) {
  require_orthonormal(A, "build_majorization");
  if (!(psi > 0.0)) throw std::invalid_argument("build_majorization: psi must be positive");

  const Vec xi = cfg.resolved_xi(d.Q());
  const Penalty& pen = cfg.penalty;
  const double kap = kappa(pen);

  MajorizationContext ctx;
  ctx.psi = psi;
  // The A'A factor is the identity under the constraint; it is kept so the
  // formula stays valid if the constraint is ever relaxed.
  ctx.P_B = (d.X * (d.Y.transpose() * A) - (d.X * d.X.transpose()) * B * (A.transpose() * A)) / psi + B;

  ctx.K = Mat::Zero(d.Q(), B.cols());
  if (pen.kind == PenaltyKind::Geman && pen.lambda > 0.0) {
    for (Index i = 0; i < d.Q(); ++i) {
      const double nb = B.row(i).norm();
      if (nb > 0.0) {
        ctx.K.row(i) = pen.lambda * xi(i) * (rho_prime(pen, nb) - kap) / nb * B.row(i);
      }
      // at a zero row the bracket's limit is rho'(0+) - kappa = 0
    }
  }
  // for None and L1, rho' == kappa everywhere, so K stays exactly zero

  ctx.P_BR = ctx.P_B - ctx.K / psi;
  return ctx;
}

Mat prox_rows(const MajorizationContext& ctx, const SrrrConfig& cfg) {
  const Vec xi = cfg.resolved_xi(ctx.P_BR.rows());
  const double kap = kappa(cfg.penalty);
  const double lambda = cfg.penalty.lambda;

  Mat B(ctx.P_BR.rows(), ctx.P_BR.cols());
  for (Index i = 0; i < B.rows(); ++i) {
    const double np = ctx.P_BR.row(i).norm();
    if (np == 0.0) {
      B.row(i).setZero();
      continue;
    }
    const double shrink = 1.0 - kap * lambda * xi(i) / (ctx.psi * np);
    if (shrink > 0.0)
      B.row(i) = shrink * ctx.P_BR.row(i);
    else
      B.row(i).setZero();
  }
  return B;
}

std::pair<Mat, Mat> default_init(const Dataset& d, Index rank) {
  const Mat YXt = d.Y * d.X.transpose();
  const ThinSvd<double> svd = thin_svd(YXt, rank);
  Mat A0 = svd.U;

  const Mat XXt = d.X * d.X.transpose();
  const double delta = 1e-8 * XXt.trace() / static_cast<double>(d.Q());
  Mat B0 = (XXt + delta * Mat::Identity(d.Q(), d.Q()))
               .ldlt()
               .solve(d.X * (d.Y.transpose() * A0));
  return {std::move(A0), std::move(B0)};
}

std::vector<Index> nonzero_rows(const Mat& B) {
  std::vector<Index> rows;
  for (Index i = 0; i < B.rows(); ++i)
    if (B.row(i).norm() > 0.0) rows.push_back(i);
  return rows;
}

FitResult fit(const Dataset& d, const SrrrConfig& cfg, std::optional<std::pair<Mat, Mat>> init,
              std::uint64_t seed, double time_budget_s) {
  cfg.validate(d);

  SolverState st;
  if (init) {
    st.A = std::move(init->first);
    st.B = std::move(init->second);
    if (st.A.rows() != d.P() || st.A.cols() != cfg.rank || st.B.rows() != d.Q() ||
        st.B.cols() != cfg.rank)
      throw std::invalid_argument("fit: init has wrong shape");
    if (!st.A.allFinite() || !st.B.allFinite())
      throw std::invalid_argument("fit: init has non-finite entries");
    require_orthonormal(st.A, "fit(init)");
  } else {
    std::tie(st.A, st.B) = default_init(d, cfg.rank);
  }

  // psi is computed once: A'A = I makes lambda_max(A'A kron X X') equal to
  // lambda_max(X X') at every iteration.
  const double psi = cfg.psi_safeguard * lambda_max_sym(d.X * d.X.transpose());

  FitResult res;
  res.method = "altmin-mm";

  const auto t0 = std::chrono::steady_clock::now();
  double F = objective(d, cfg, st.A, st.B);
  if (!std::isfinite(F)) throw NumericalFailure("fit: objective not finite at initialization");
  st.objective_trace.push_back({0, F, 0.0});

  res.status = FitStatus::MaxIterReached;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    if (st.B.norm() == 0.0) {
      res.diagnostic = "B vanished: every row was annihilated, the Procrustes target "
                       "Y X' B is zero and A cannot be updated";
      break;
    }

    try {
      st.A = update_A(d, st.B);
    } catch (const DegenerateIterate&) {
      // one deterministic retry with the zero rows of B nudged off zero
      const Mat B_retry = perturb_zero_rows(st.B, seed);
      try {
        st.A = update_A(d, B_retry);
        st.B = B_retry;
      } catch (const DegenerateIterate& e2) {
        throw DegenerateIterate(std::string(e2.what()) + " (iteration " + std::to_string(k) + ")",
                                e2.found_rank, e2.wanted_rank, k);
      }
    }
    if (cfg.debug_trace)
      res.step_trace.push_back({k, 'A', objective(d, cfg, st.A, st.B)});

    const MajorizationContext ctx = build_majorization(d, cfg, st.A, st.B, psi);
    st.B = prox_rows(ctx, cfg);

    const double F_new = objective(d, cfg, st.A, st.B);
    if (!std::isfinite(F_new)) {
      std::ostringstream msg;
      msg << "fit: objective became non-finite at iteration " << k;
      throw NumericalFailure(msg.str());
    }
    if (cfg.debug_trace) res.step_trace.push_back({k, 'B', F_new});

    st.iter = k;
    st.objective_trace.push_back({k, F_new, elapsed_seconds(t0)});

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

  res.A = std::move(st.A);
  res.B = std::move(st.B);
  res.trace = std::move(st.objective_trace);
  res.selected_rows = nonzero_rows(res.B);
  return res;
}

} // namespace srrr
