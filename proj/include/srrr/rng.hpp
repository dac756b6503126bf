#ifndef SRRR_RNG_HPP
#define SRRR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "srrr/types.hpp"

namespace srrr {

// Deterministic sampling on top of std::mt19937_64, whose output sequence is
// fixed by the standard. The uniform/normal mappings are implemented here
// because the std::*_distribution algorithms are implementation-defined and
// would break the bit-identical reproducibility contract across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double gaussian() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Matrix with i.i.d. standard normal entries, filled row-major.
  Mat gaussian_matrix(Index rows, Index cols) {
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = gaussian();
    return m;
  }

private:
  std::mt19937_64 engine_;
};

} // namespace srrr

#endif
