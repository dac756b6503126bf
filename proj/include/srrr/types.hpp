#ifndef SRRR_TYPES_HPP
#define SRRR_TYPES_HPP

#include <Eigen/Core>

namespace srrr {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = Matrix<double>;
using Vec = Vector<double>;
using Index = Eigen::Index;

} // namespace srrr

#endif
