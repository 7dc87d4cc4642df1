#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace hedgeff {

using real = double;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using VectorXr = Vector<real>;

}  // namespace hedgeff
