// Copyright 2026 The GPSTPS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GPSTPS_KERNEL_HPP
#define GPSTPS_KERNEL_HPP

#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gpstps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A set of states, one per row. Row-major so that each row is a contiguous span.
using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised when a precondition on the caller's arguments does not hold.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization or an objective becomes unusable.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::span<const double> row_span(const Points& points, Eigen::Index row) {
  return {points.data() + row * points.cols(), static_cast<std::size_t>(points.cols())};
}

/// Squared-exponential kernel with one lengthscale per input dimension.
struct KernelParams {
  Vector lengthscales;
  double signal_variance = 1.0;

  static KernelParams isotropic(Eigen::Index dims, double lengthscale, double signal_variance) {
    return {Vector::Constant(dims, lengthscale), signal_variance};
  }

  Eigen::Index dims() const { return lengthscales.size(); }

  /// Throws ContractViolation unless every lengthscale and the signal variance are positive and finite.
  void validate() const;
};

/// signal_variance * exp(-0.5 * sum_d ((x_d - y_d) / l_d)^2)
double kernel_eval(std::span<const double> x, std::span<const double> y, const KernelParams& params);

/// Cross Gram matrix; entry (i, j) is kernel_eval(xs_i, ys_j). Rows are filled in parallel
/// once the matrix is large enough to pay for the fork.
Matrix gram_matrix(const Points& xs, const Points& ys, const KernelParams& params);

/// Single-threaded reference for gram_matrix.
Matrix gram_matrix_serial(const Points& xs, const Points& ys, const KernelParams& params);

}  // namespace gpstps

#endif  // GPSTPS_KERNEL_HPP
