#ifndef SRRR_ERRORS_HPP
#define SRRR_ERRORS_HPP

#include <stdexcept>
#include <string>

#include "srrr/types.hpp"

namespace srrr {

/// A matrix that is required to have full column rank does not.
class RankDeficientError : public std::runtime_error {
public:
  explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative numerical routine failed to produce a finite/converged result.
class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

/// The alternating solver hit an iterate from which it cannot continue
/// (rank-deficient Procrustes target). Carries the rank actually found.
class DegenerateIterate : public std::runtime_error {
public:
  DegenerateIterate(const std::string& what, Index found_rank, Index wanted_rank,
                    int iteration = -1)
      : std::runtime_error(what), found_rank(found_rank), wanted_rank(wanted_rank),
        iteration(iteration) {}

  Index found_rank;
  Index wanted_rank;
  int iteration; // -1 when raised outside a solver loop
};

/// A solver was asked to run with a penalty it does not support.
class UnsupportedPenalty : public std::invalid_argument {
public:
  explicit UnsupportedPenalty(const std::string& what) : std::invalid_argument(what) {}
};

/// A stateful precondition was violated (e.g. non-orthonormal A passed where
/// the iteration contract requires A'A = I).
class InvalidState : public std::logic_error {
public:
  explicit InvalidState(const std::string& what) : std::logic_error(what) {}
};

} // namespace srrr

#endif
