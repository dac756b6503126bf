#include "srrr/model.hpp"

#include <sstream>
#include <stdexcept>

#include "srrr/numerics.hpp"

namespace srrr {

Dataset::Dataset(Mat X_in, Mat Y_in) : X(std::move(X_in)), Y(std::move(Y_in)) {
  if (X.rows() < 1 || X.cols() < 1 || Y.rows() < 1 || Y.cols() < 1)
    throw std::invalid_argument("Dataset: X and Y must be nonempty");
  if (X.cols() != Y.cols()) {
    std::ostringstream msg;
    msg << "Dataset: X has " << X.cols() << " samples but Y has " << Y.cols();
    throw std::invalid_argument(msg.str());
  }
  if (X.cols() < std::max(X.rows(), Y.rows())) {
    std::ostringstream msg;
    msg << "Dataset: need N >= max(P, Q), got N=" << X.cols() << ", P=" << Y.rows()
        << ", Q=" << X.rows();
    throw std::invalid_argument(msg.str());
  }
  if (!X.allFinite() || !Y.allFinite())
    throw std::invalid_argument("Dataset: entries must be finite");
}

Dataset centered(const Dataset& d) {
  Mat X = d.X.colwise() - d.X.rowwise().mean();
  Mat Y = d.Y.colwise() - d.Y.rowwise().mean();
  return Dataset(std::move(X), std::move(Y));
}

Vec SrrrConfig::resolved_xi(Index Q) const {
  if (xi.size() == 0) return Vec::Ones(Q);
  return xi;
}

void SrrrConfig::validate(const Dataset& d) const {
  if (rank < 1 || rank > std::min(d.P(), d.Q())) {
    std::ostringstream msg;
    msg << "SrrrConfig: rank " << rank << " out of range [1, " << std::min(d.P(), d.Q()) << "]";
    throw std::invalid_argument(msg.str());
  }
  penalty.validate();
  if (xi.size() != 0) {
    if (xi.size() != d.Q())
      throw std::invalid_argument("SrrrConfig: xi must have one weight per predictor");
    if ((xi.array() < 0.0).any())
      throw std::invalid_argument("SrrrConfig: xi must be nonnegative");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("SrrrConfig: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("SrrrConfig: max_iter must be >= 1");
  if (!(psi_safeguard >= 1.0))
    throw std::invalid_argument("SrrrConfig: psi_safeguard must be >= 1");
}

double loss(const Dataset& d, const Mat& A, const Mat& B) {
  if (A.rows() != d.P() || B.rows() != d.Q() || A.cols() != B.cols()) {
    std::ostringstream msg;
    msg << "loss: inconsistent shapes, A is " << A.rows() << "x" << A.cols() << ", B is "
        << B.rows() << "x" << B.cols() << ", data has P=" << d.P() << ", Q=" << d.Q();
    throw std::invalid_argument(msg.str());
  }
  return 0.5 * (d.Y - A * (B.transpose() * d.X)).squaredNorm();
}

double regularizer(const Penalty& p, const Vec& xi, const Mat& B) {
  if (xi.size() != B.rows())
    throw std::invalid_argument("regularizer: xi must have one weight per row of B");
  if (p.kind == PenaltyKind::None || p.lambda == 0.0) return 0.0;
  const Vec norms = row_norms(B);
  double r = 0.0;
  for (Index i = 0; i < B.rows(); ++i) r += p.lambda * xi(i) * rho(p, norms(i));
  return r;
}

double objective(const Dataset& d, const SrrrConfig& cfg, const Mat& A, const Mat& B) {
  return loss(d, A, B) + regularizer(cfg.penalty, cfg.resolved_xi(d.Q()), B);
}

} // namespace srrr
