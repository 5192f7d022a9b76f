#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace risq {

/// Scalar type used throughout the library.
using scalar_t = double;

/// Index type (matches Eigen's).
using index_t = Eigen::Index;

/// Dense column vector.
using vector_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, 1>;

/// Dense matrix.
using matrix_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Integer vector (state/action index sequences).
using ivector_t = Eigen::Matrix<index_t, Eigen::Dynamic, 1>;

}  // namespace risq
