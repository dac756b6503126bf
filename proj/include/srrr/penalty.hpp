#ifndef SRRR_PENALTY_HPP
#define SRRR_PENALTY_HPP

#include <stdexcept>
#include <string>

namespace srrr {

enum class PenaltyKind { None, L1, Geman };

/// Scalar sparsity-inducing penalty rho(t) applied to row norms of B.
///
/// None  : rho(t) = 0               (plain reduced-rank regression)
/// L1    : rho(t) = t               (group lasso)
/// Geman : rho(t) = t / (theta + t) (nonconvex, tighter l0 surrogate)
///
/// `lambda` is a global scale multiplying every row weight xi_i of the
/// regularizer; it is carried here so a penalty choice is one value.
struct Penalty {
  PenaltyKind kind = PenaltyKind::None;
  double theta = 1.0;  // Geman only, > 0
  double lambda = 1.0; // >= 0

  void validate() const {
    if (kind == PenaltyKind::Geman && !(theta > 0.0))
      throw std::invalid_argument("Penalty: theta must be > 0 for the Geman penalty");
    if (!(lambda >= 0.0))
      throw std::invalid_argument("Penalty: lambda must be >= 0");
  }
};

/// rho(t) for t >= 0. Monotone nondecreasing, rho(0) = 0.
inline double rho(const Penalty& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("rho: t must be >= 0");
  switch (p.kind) {
    case PenaltyKind::None: return 0.0;
    case PenaltyKind::L1: return t;
    case PenaltyKind::Geman: return t / (p.theta + t);
  }
  return 0.0;
}

/// rho'(t) for t > 0. The t -> 0+ limit is kappa().
inline double rho_prime(const Penalty& p, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("rho_prime: t must be > 0");
  switch (p.kind) {
    case PenaltyKind::None: return 0.0;
    case PenaltyKind::L1: return 1.0;
    case PenaltyKind::Geman: {
      const double d = p.theta + t;
      return p.theta / (d * d);
    }
  }
  return 0.0;
}

/// kappa = rho'(0+), the slope split off as the convex part in the
/// redistribution rho(t) = kappa*t + (rho(t) - kappa*t); the remainder is
/// smooth and concave. None -> 0, L1 -> 1, Geman -> 1/theta.
inline double kappa(const Penalty& p) {
  switch (p.kind) {
    case PenaltyKind::None: return 0.0;
    case PenaltyKind::L1: return 1.0;
    case PenaltyKind::Geman: return 1.0 / p.theta;
  }
  return 0.0;
}

inline const char* penalty_name(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::None: return "none";
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::Geman: return "geman";
  }
  return "none";
}

inline PenaltyKind penalty_kind_from_name(const std::string& name) {
  if (name == "none") return PenaltyKind::None;
  if (name == "l1") return PenaltyKind::L1;
  if (name == "geman") return PenaltyKind::Geman;
  throw std::invalid_argument("unknown penalty kind: " + name);
}

} // namespace srrr

#endif
