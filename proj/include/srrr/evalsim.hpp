#ifndef SRRR_EVALSIM_HPP
#define SRRR_EVALSIM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "srrr/model.hpp"
#include "srrr/types.hpp"

// Synthetic-data generation, the principal-angle accuracy metric and a
// seeded Monte-Carlo runner that compares solver configurations ("arms") on
// identical per-trial datasets.

namespace srrr {

struct GenSpec {
  Index P = 7;
  Index Q = 5;
  Index r = 3;
  Index N = 100;
  Index sparse_rows = 3;    // nonzero rows of the true B, >= r
  double noise_sigma = 0.5; // innovation standard deviation
  std::uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  Mat A_true;   // P x r, orthonormal columns
  Mat B_true;   // Q x r, exactly sparse_rows nonzero rows
  Dataset data; // X (Q x N), Y = A_true B_true' X + noise
  GenSpec spec;
};

/// Draw a ground-truth model and sample path. Deterministic in spec.seed:
/// the draw order is A_true (pre-orthonormalization), the support of B_true,
/// the nonzero rows of B_true, then X, then the noise.
GroundTruth generate(const GenSpec& spec);

/// Angle between the column spaces of two full-column-rank matrices:
/// QR-factor both, then arccos of the smallest singular value of Q1' Q2
/// (the largest principal angle). 0 means identical spaces, pi/2 orthogonal.
double subspace_angle(const Mat& B_hat, const Mat& B_true);

/// One solver configuration entered in a Monte-Carlo comparison.
struct Arm {
  std::string name;
  SrrrConfig cfg;
};

struct TrialRow {
  int trial = 0;
  std::string arm;
  double angle = 0.0;
  int iters = 0;
  double seconds = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  bool failed = false;
  std::string error; // non-empty iff failed
};

struct ArmSummary {
  std::string arm;
  double mean_angle = 0.0;
  double stderr_angle = 0.0;
  double mean_recall = 0.0;
  double mean_precision = 0.0;
  double mean_iters = 0.0;
  double mean_seconds = 0.0;
  int included = 0;
  int exclusions = 0;
};

struct McTable {
  std::vector<TrialRow> rows;       // trial-major, arm order as given
  std::vector<ArmSummary> summary;  // one entry per arm, input order
};

/// Paired Monte-Carlo study: for m = 1..M generate a trial with seed
/// base_seed + m and fit every arm on that same dataset. Failed fits are
/// recorded and excluded from that arm's means. Deterministic in
/// (spec, arms, M, base_seed) apart from the wall-time fields, regardless of
/// `threads` (trials may run concurrently; aggregation is by trial index).
McTable monte_carlo(const GenSpec& spec, const std::vector<Arm>& arms, int M,
                    std::uint64_t base_seed, int threads = 1);

} // namespace srrr

#endif
