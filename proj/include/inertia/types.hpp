#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace inertia {

using Scalar = double;
using Index = Eigen::Index;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec6 = Eigen::Matrix<Scalar, 6, 1>;

// Row-major so that per-state transition rows are contiguous.
using SpMat = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

// Error taxonomy; the CLI maps these onto exit codes 1/2/3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace inertia
