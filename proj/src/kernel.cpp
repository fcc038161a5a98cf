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

#include "gpstps/kernel.hpp"

#include <cmath>

namespace gpstps {

namespace {

// Below this many entries the parallel region costs more than it saves.
constexpr Eigen::Index kParallelGramEntries = 4096;

void check_dims(const Points& xs, const Points& ys, const KernelParams& params) {
  if (xs.rows() == 0 || ys.rows() == 0) {
    throw ContractViolation("gram_matrix: empty point set");
  }
  if (xs.cols() != params.dims() || ys.cols() != params.dims()) {
    throw ContractViolation("gram_matrix: point dimension does not match lengthscales");
  }
}

}  // namespace

void KernelParams::validate() const {
  if (lengthscales.size() == 0) {
    throw ContractViolation("KernelParams: no lengthscales");
  }
  for (Eigen::Index d = 0; d < lengthscales.size(); ++d) {
    if (!(lengthscales[d] > 0.0) || !std::isfinite(lengthscales[d])) {
      throw ContractViolation("KernelParams: lengthscale " + std::to_string(d) + " must be positive");
    }
  }
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
    throw ContractViolation("KernelParams: signal_variance must be positive");
  }
}

double kernel_eval(std::span<const double> x, std::span<const double> y, const KernelParams& params) {
  const auto dims = static_cast<std::size_t>(params.lengthscales.size());
  if (x.size() != dims || y.size() != dims) {
    throw ContractViolation("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + ", " +
                            std::to_string(y.size()) + ", " + std::to_string(dims) + ")");
  }
  double sq = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double z = (x[d] - y[d]) / params.lengthscales[static_cast<Eigen::Index>(d)];
    sq += z * z;
  }
  return params.signal_variance * std::exp(-0.5 * sq);
}

Matrix gram_matrix_serial(const Points& xs, const Points& ys, const KernelParams& params) {
  check_dims(xs, ys, params);
  Matrix gram(xs.rows(), ys.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    for (Eigen::Index j = 0; j < ys.rows(); ++j) {
      gram(i, j) = kernel_eval(row_span(xs, i), row_span(ys, j), params);
    }
  }
  return gram;
}

Matrix gram_matrix(const Points& xs, const Points& ys, const KernelParams& params) {
  check_dims(xs, ys, params);
  const Eigen::Index rows = xs.rows();
  const Eigen::Index cols = ys.rows();
  const Eigen::Index dims = params.dims();
  Matrix gram(rows, cols);

#pragma omp parallel for schedule(static) if (rows * cols >= kParallelGramEntries)
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double sq = 0.0;
      for (Eigen::Index d = 0; d < dims; ++d) {
        const double z = (xs(i, d) - ys(j, d)) / params.lengthscales[d];
        sq += z * z;
      }
      gram(i, j) = params.signal_variance * std::exp(-0.5 * sq);
    }
  }
  return gram;
}

}  // namespace gpstps
