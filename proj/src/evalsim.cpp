#include "srrr/evalsim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "srrr/numerics.hpp"
#include "srrr/rng.hpp"
#include "srrr/solver.hpp"

namespace srrr {

void GenSpec::validate() const {
  if (P < 1 || Q < 1 || N < 1) throw std::invalid_argument("GenSpec: P, Q, N must be >= 1");
  if (r < 1 || r > std::min(P, Q))
    throw std::invalid_argument("GenSpec: need 1 <= r <= min(P, Q)");
  if (sparse_rows < r || sparse_rows > Q)
    throw std::invalid_argument("GenSpec: need r <= sparse_rows <= Q (fewer nonzero rows "
                                "than r makes the true B rank-deficient)");
  if (N < std::max(P, Q)) throw std::invalid_argument("GenSpec: need N >= max(P, Q)");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("GenSpec: noise_sigma must be >= 0");
}

GroundTruth generate(const GenSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const Mat A_raw = rng.gaussian_matrix(spec.P, spec.r);
  Mat A_true = qr_thin(A_raw).Q;

  // support: sparse_rows indices drawn by a seeded Fisher-Yates shuffle
  std::vector<Index> idx(static_cast<std::size_t>(spec.Q));
  std::iota(idx.begin(), idx.end(), Index(0));
  for (std::size_t i = idx.size() - 1; i > 0; --i)
    std::swap(idx[i], idx[rng.below(i + 1)]);
  idx.resize(static_cast<std::size_t>(spec.sparse_rows));
  std::sort(idx.begin(), idx.end());

  Mat B_true = Mat::Zero(spec.Q, spec.r);
  for (Index i : idx)
    for (Index j = 0; j < spec.r; ++j) B_true(i, j) = rng.gaussian();

  const Mat X = rng.gaussian_matrix(spec.Q, spec.N);
  Mat Y = A_true * (B_true.transpose() * X);
  if (spec.noise_sigma > 0.0)
    Y += spec.noise_sigma * rng.gaussian_matrix(spec.P, spec.N);

  return GroundTruth{std::move(A_true), std::move(B_true), Dataset(X, std::move(Y)), spec};
}

double subspace_angle(const Mat& B_hat, const Mat& B_true) {
  if (B_hat.rows() != B_true.rows() || B_hat.cols() != B_true.cols())
    throw std::invalid_argument("subspace_angle: shape mismatch");
  const Mat Q1 = qr_thin(B_hat).Q; // throws RankDeficientError when degenerate
  const Mat Q2 = qr_thin(B_true).Q;
  const Mat C = Q1.transpose() * Q2;
  // The singular values of Q1' Q2 are the cosines of the principal angles.
  // The smallest one gives the opening angle of the two column spaces; the
  // largest would give the *minimum* principal angle, which for r x r' spaces
  // with r + r' > Q is identically zero by a dimension count and carries no
  // information at the solver's typical shapes.
  const ThinSvd<double> svd = thin_svd(C, std::min(C.rows(), C.cols()));
  const double cos_angle = std::clamp(svd.s(svd.s.size() - 1), -1.0, 1.0);
  if (cos_angle < 0.99) return std::acos(cos_angle);
  // nearly coincident subspaces: acos would amplify rounding in the cosine to
  // ~1e-8, so take the angle from its sine instead. The singular values of
  // Q2 - Q1 (Q1' Q2) are the sines of the principal angles.
  const Mat S = Q2 - Q1 * C;
  const auto sines = thin_svd(S, std::min(S.rows(), S.cols()));
  return std::asin(std::clamp(sines.s(0), 0.0, 1.0));
}

namespace {

struct SupportScore {
  double recall;
  double precision;
};

SupportScore score_support(const std::vector<Index>& selected, const Mat& B_true) {
  std::vector<Index> truth = nonzero_rows(B_true);
  std::size_t hit = 0;
  for (Index i : selected)
    if (std::binary_search(truth.begin(), truth.end(), i)) ++hit;
  SupportScore s{};
  s.recall = truth.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(truth.size());
  s.precision =
      selected.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(selected.size());
  return s;
}

ArmSummary summarize(const std::string& arm, const std::vector<const TrialRow*>& rows) {
  ArmSummary s;
  s.arm = arm;
  std::vector<double> angles;
  for (const TrialRow* r : rows) {
    if (r->failed) {
      ++s.exclusions;
      continue;
    }
    ++s.included;
    angles.push_back(r->angle);
    s.mean_angle += r->angle;
    s.mean_recall += r->recall;
    s.mean_precision += r->precision;
    s.mean_iters += r->iters;
    s.mean_seconds += r->seconds;
  }
  if (s.included > 0) {
    const double n = static_cast<double>(s.included);
    s.mean_angle /= n;
    s.mean_recall /= n;
    s.mean_precision /= n;
    s.mean_iters /= n;
    s.mean_seconds /= n;
    if (s.included > 1) {
      double var = 0.0;
      for (double a : angles) var += (a - s.mean_angle) * (a - s.mean_angle);
      var /= (n - 1.0);
      s.stderr_angle = std::sqrt(var / n);
    }
  }
  return s;
}

} // namespace

McTable monte_carlo(const GenSpec& spec, const std::vector<Arm>& arms, int M,
                    std::uint64_t base_seed, int threads) {
  spec.validate();
  if (M < 1) throw std::invalid_argument("monte_carlo: M must be >= 1");
  if (arms.empty()) throw std::invalid_argument("monte_carlo: need at least one arm");
  threads = std::max(1, threads);

  const std::size_t n_arms = arms.size();
  std::vector<TrialRow> rows(static_cast<std::size_t>(M) * n_arms);

  auto run_trial = [&](int m) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(m);
    GenSpec trial_spec = spec;
    trial_spec.seed = seed;
    const GroundTruth gt = generate(trial_spec);

    for (std::size_t a = 0; a < n_arms; ++a) {
      TrialRow& row = rows[static_cast<std::size_t>(m - 1) * n_arms + a];
      row.trial = m;
      row.arm = arms[a].name;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const FitResult fr = fit(gt.data, arms[a].cfg, std::nullopt, seed);
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.iters = fr.iters();
        row.angle = subspace_angle(fr.B, gt.B_true);
        const SupportScore sc = score_support(fr.selected_rows, gt.B_true);
        row.recall = sc.recall;
        row.precision = sc.precision;
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    }
  };

  if (threads == 1 || M == 1) {
    for (int m = 1; m <= M; ++m) run_trial(m);
  } else {
    std::atomic<int> next{1};
    auto worker = [&] {
      for (;;) {
        const int m = next.fetch_add(1);
        if (m > M) return;
        run_trial(m);
      }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min(threads, M);
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  McTable table;
  table.rows = std::move(rows);
  for (std::size_t a = 0; a < n_arms; ++a) {
    std::vector<const TrialRow*> arm_rows;
    arm_rows.reserve(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m)
      arm_rows.push_back(&table.rows[static_cast<std::size_t>(m) * n_arms + a]);
    table.summary.push_back(summarize(arms[a].name, arm_rows));
  }
  return table;
}

} // namespace srrr
