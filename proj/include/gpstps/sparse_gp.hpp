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

#ifndef GPSTPS_SPARSE_GP_HPP
#define GPSTPS_SPARSE_GP_HPP

#include <memory>
#include <span>

#include <Eigen/Cholesky>
#include <nlohmann/json_fwd.hpp>

#include "gpstps/kernel.hpp"

namespace gpstps {

/// Regression targets with one non-negative weight per sample.
struct WeightedDataset {
  Points inputs;
  Vector targets;
  Vector weights;

  Eigen::Index size() const { return inputs.rows(); }

  /// Throws ContractViolation on length mismatch, negative weights, or (when fitting) no positive weight.
  void validate(bool require_positive_weight = true) const;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Inducing-point GP with a Gaussian variational posterior q(u) = N(q_mean, q_cov) over the
/// values at the pseudo inputs.
///
/// The Cholesky factor of the pseudo-input Gram matrix, and the whitened posterior
/// moments derived from it, are computed once at construction and shared between copies.
/// The factorization first tries the Gram matrix as is and only adds diagonal jitter
/// (starting at 1e-6 * signal_variance, growing tenfold) when the factor fails or its
/// reciprocal condition estimate drops below 1e-10.
class SparseGPModel {
 public:
  /// Prior-initialized model: q_mean = prior_mean * 1, q_cov = K_zz.
  SparseGPModel(Points pseudo_inputs, KernelParams kernel, double prior_mean, double noise_variance);

  SparseGPModel(Points pseudo_inputs, KernelParams kernel, double prior_mean, double noise_variance,
                Vector q_mean, Matrix q_cov);

  const Points& pseudo_inputs() const { return pseudo_inputs_; }
  const KernelParams& kernel() const { return kernel_; }
  double prior_mean() const { return prior_mean_; }
  double noise_variance() const { return noise_variance_; }
  const Vector& q_mean() const { return q_mean_; }
  const Matrix& q_cov() const { return q_cov_; }
  Eigen::Index num_pseudo_inputs() const { return pseudo_inputs_.rows(); }
  Eigen::Index input_dims() const { return pseudo_inputs_.cols(); }

  /// Diagonal jitter that was needed to factor K_zz (0 when none).
  double jitter() const { return cache_->jitter; }
  /// Lower Cholesky factor L of K_zz + jitter * I.
  const Matrix& gram_factor() const { return cache_->chol_l; }
  /// L^{-1} (q_mean - prior_mean * 1)
  const Vector& whitened_mean() const { return cache_->whitened_mean; }
  /// L^{-1} q_cov L^{-T}
  const Matrix& whitened_cov() const { return cache_->whitened_cov; }

  /// Same pseudo inputs and prior mean, new hyperparameters, q reset to the new prior.
  SparseGPModel with_hyperparameters(const KernelParams& kernel, double noise_variance) const;
  /// Same everything, only the likelihood noise replaced; q is kept.
  SparseGPModel with_noise_variance(double noise_variance) const;

 private:
  struct Cache {
    double jitter = 0.0;
    Matrix chol_l;
    Vector whitened_mean;
    Matrix whitened_cov;
  };

  void build_cache(bool prior_q);

  Points pseudo_inputs_;
  KernelParams kernel_;
  double prior_mean_;
  double noise_variance_;
  Vector q_mean_;
  Matrix q_cov_;
  std::shared_ptr<const Cache> cache_;
};

/// Closed-form optimum of the weighted variational bound for fixed hyperparameters.
///
/// With W = diag(weights), Lambda = K_zz + K_zx W K_xz / noise:
///   q_cov  = K_zz Lambda^{-1} K_zz
///   q_mean = m + K_zz Lambda^{-1} K_zx W (y - m) / noise
/// evaluated through the whitened system B = I + A W A^T / noise, A = L^{-1} K_zx.
SparseGPModel fit_weighted(const WeightedDataset& data, const SparseGPModel& model);

/// Latent predictive moments at one state. The variance excludes the likelihood noise.
Prediction predict(const SparseGPModel& model, std::span<const double> x);

/// Batched predict over the rows of xs.
void predict_many(const SparseGPModel& model, const Points& xs, Vector& mean, Vector& variance);

/// sum_i w_i E_q[log N(y_i | f_i, noise)] - KL(q(u) || p(u)).
double weighted_elbo(const WeightedDataset& data, const SparseGPModel& model);

void to_json(nlohmann::json& j, const SparseGPModel& model);
SparseGPModel sparse_gp_from_json(const nlohmann::json& j);

}  // namespace gpstps

#endif  // GPSTPS_SPARSE_GP_HPP
