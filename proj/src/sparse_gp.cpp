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

#include "gpstps/sparse_gp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

namespace gpstps {

namespace {

constexpr double kMinReciprocalCondition = 1e-10;
constexpr double kInitialJitter = 1e-6;
constexpr int kJitterAttempts = 8;

struct Factor {
  Matrix l;
  double jitter = 0.0;
};

// Squared ratio of the extreme Cholesky pivots; a cheap lower-bound style estimate of 1/cond.
double reciprocal_condition(const Matrix& l) {
  const Vector diag = l.diagonal();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  if (!(hi > 0.0)) {
    return 0.0;
  }
  return (lo / hi) * (lo / hi);
}

Factor factor_gram(const Matrix& gram, double signal_variance) {
  double jitter = 0.0;
  double last_rcond = 0.0;
  for (int attempt = 0; attempt <= kJitterAttempts; ++attempt) {
    Matrix shifted = gram;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Matrix l = llt.matrixL();
      last_rcond = reciprocal_condition(l);
      if (last_rcond >= kMinReciprocalCondition) {
        return {std::move(l), jitter};
      }
    }
    jitter = (attempt == 0) ? kInitialJitter * signal_variance : jitter * 10.0;
  }
  std::ostringstream msg;
  msg << "pseudo-input Gram matrix is singular after jitter " << jitter / 10.0
      << " (reciprocal condition estimate " << last_rcond << ")";
  throw NumericalError(msg.str());
}

Matrix lower_solve(const Matrix& l, const Matrix& rhs) {
  return l.triangularView<Eigen::Lower>().solve(rhs);
}

}  // namespace

void WeightedDataset::validate(bool require_positive_weight) const {
  if (targets.size() != inputs.rows() || weights.size() != inputs.rows()) {
    throw ContractViolation("WeightedDataset: inputs, targets and weights differ in length");
  }
  bool any_positive = false;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw ContractViolation("WeightedDataset: weight " + std::to_string(i) + " is negative or not finite");
    }
    any_positive = any_positive || weights[i] > 0.0;
  }
  if (require_positive_weight && !any_positive) {
    throw ContractViolation("WeightedDataset: no positive weight");
  }
}

SparseGPModel::SparseGPModel(Points pseudo_inputs, KernelParams kernel, double prior_mean, double noise_variance)
    : pseudo_inputs_(std::move(pseudo_inputs)),
      kernel_(std::move(kernel)),
      prior_mean_(prior_mean),
      noise_variance_(noise_variance) {
  build_cache(true);
}

SparseGPModel::SparseGPModel(Points pseudo_inputs, KernelParams kernel, double prior_mean, double noise_variance,
                             Vector q_mean, Matrix q_cov)
    : pseudo_inputs_(std::move(pseudo_inputs)),
      kernel_(std::move(kernel)),
      prior_mean_(prior_mean),
      noise_variance_(noise_variance),
      q_mean_(std::move(q_mean)),
      q_cov_(std::move(q_cov)) {
  build_cache(false);
}

void SparseGPModel::build_cache(bool prior_q) {
  kernel_.validate();
  if (pseudo_inputs_.rows() < 1) {
    throw ContractViolation("SparseGPModel: need at least one pseudo input");
  }
  if (pseudo_inputs_.cols() != kernel_.dims()) {
    throw ContractViolation("SparseGPModel: pseudo-input dimension does not match kernel");
  }
  if (!(noise_variance_ > 0.0) || !std::isfinite(noise_variance_)) {
    throw ContractViolation("SparseGPModel: noise_variance must be positive");
  }
  const Eigen::Index m = pseudo_inputs_.rows();
  const Matrix gram = gram_matrix(pseudo_inputs_, pseudo_inputs_, kernel_);
  Factor factor = factor_gram(gram, kernel_.signal_variance);

  auto cache = std::make_shared<Cache>();
  cache->jitter = factor.jitter;
  cache->chol_l = std::move(factor.l);
  if (prior_q) {
    q_mean_ = Vector::Constant(m, prior_mean_);
    q_cov_ = gram;
    q_cov_.diagonal().array() += cache->jitter;
    cache->whitened_mean = Vector::Zero(m);
    cache->whitened_cov = Matrix::Identity(m, m);
  } else {
    if (q_mean_.size() != m || q_cov_.rows() != m || q_cov_.cols() != m) {
      throw ContractViolation("SparseGPModel: variational moments do not match the pseudo-input count");
    }
    const Matrix& l = cache->chol_l;
    cache->whitened_mean = lower_solve(l, q_mean_ - Vector::Constant(m, prior_mean_));
    const Matrix half = lower_solve(l, q_cov_);
    Matrix whitened = lower_solve(l, half.transpose());
    cache->whitened_cov = 0.5 * (whitened + whitened.transpose());
  }
  cache_ = std::move(cache);
}

SparseGPModel SparseGPModel::with_hyperparameters(const KernelParams& kernel, double noise_variance) const {
  return SparseGPModel(pseudo_inputs_, kernel, prior_mean_, noise_variance);
}

SparseGPModel SparseGPModel::with_noise_variance(double noise_variance) const {
  SparseGPModel copy = *this;
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw ContractViolation("SparseGPModel: noise_variance must be positive");
  }
  copy.noise_variance_ = noise_variance;
  return copy;
}

SparseGPModel fit_weighted(const WeightedDataset& data, const SparseGPModel& model) {
  data.validate(false);
  if (data.size() == 0) {
    throw ContractViolation("fit_weighted: empty dataset");
  }
  if (data.inputs.cols() != model.input_dims()) {
    throw ContractViolation("fit_weighted: input dimension does not match the model");
  }
  const Eigen::Index m = model.num_pseudo_inputs();
  const double inv_noise = 1.0 / model.noise_variance();
  const Matrix& l = model.gram_factor();

  const Matrix k_zx = gram_matrix(model.pseudo_inputs(), data.inputs, model.kernel());
  const Matrix a = lower_solve(l, k_zx);
  const Vector residual = data.targets.array() - model.prior_mean();

  Matrix b = Matrix::Identity(m, m);
  b.noalias() += inv_noise * (a * data.weights.asDiagonal() * a.transpose());
  Eigen::LLT<Matrix> b_llt(b);
  if (b_llt.info() != Eigen::Success) {
    throw NumericalError("fit_weighted: whitened precision is not positive definite");
  }

  const Vector rhs = inv_noise * (a * data.weights.cwiseProduct(residual));
  const Vector whitened_mean = b_llt.solve(rhs);
  const Matrix whitened_cov = b_llt.solve(Matrix::Identity(m, m));

  Vector q_mean = Vector::Constant(m, model.prior_mean()) + l * whitened_mean;
  Matrix q_cov = l * whitened_cov * l.transpose();
  q_cov = 0.5 * (q_cov + q_cov.transpose()).eval();

  return SparseGPModel(model.pseudo_inputs(), model.kernel(), model.prior_mean(), model.noise_variance(),
                       std::move(q_mean), std::move(q_cov));
}

void predict_many(const SparseGPModel& model, const Points& xs, Vector& mean, Vector& variance) {
  if (xs.cols() != model.input_dims()) {
    throw ContractViolation("predict: input dimension does not match the model");
  }
  const Matrix k_zx = gram_matrix(model.pseudo_inputs(), xs, model.kernel());
  const Matrix a = lower_solve(model.gram_factor(), k_zx);
  mean = (a.transpose() * model.whitened_mean()).array() + model.prior_mean();
  const Matrix ca = model.whitened_cov() * a;
  variance.resize(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const double v = model.kernel().signal_variance - a.col(i).squaredNorm() + a.col(i).dot(ca.col(i));
    variance[i] = v < 0.0 ? 0.0 : v;
  }
}

Prediction predict(const SparseGPModel& model, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != model.input_dims()) {
    throw ContractViolation("predict: input dimension does not match the model");
  }
  Points point(1, model.input_dims());
  for (Eigen::Index d = 0; d < model.input_dims(); ++d) {
    point(0, d) = x[static_cast<std::size_t>(d)];
  }
  Vector mean;
  Vector variance;
  predict_many(model, point, mean, variance);
  return {mean[0], variance[0]};
}

double weighted_elbo(const WeightedDataset& data, const SparseGPModel& model) {
  data.validate(false);
  const Eigen::Index m = model.num_pseudo_inputs();
  const double noise = model.noise_variance();

  double expected_loglik = 0.0;
  if (data.size() > 0) {
    if (data.inputs.cols() != model.input_dims()) {
      throw ContractViolation("weighted_elbo: input dimension does not match the model");
    }
    const Matrix k_zx = gram_matrix(model.pseudo_inputs(), data.inputs, model.kernel());
    const Matrix a = lower_solve(model.gram_factor(), k_zx);
    const Vector mean = (a.transpose() * model.whitened_mean()).array() + model.prior_mean();
    const Matrix ca = model.whitened_cov() * a;
    const double log_norm = std::log(2.0 * std::numbers::pi * noise);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      const double w = data.weights[i];
      if (w == 0.0) {
        continue;
      }
      // q-marginal of f_i: conditional variance lambda_i plus the propagated q covariance.
      const double var = model.kernel().signal_variance - a.col(i).squaredNorm() + a.col(i).dot(ca.col(i));
      const double r = data.targets[i] - mean[i];
      expected_loglik += w * (-0.5 * log_norm - 0.5 * (r * r + var) / noise);
    }
  }

  const Matrix& c = model.whitened_cov();
  Eigen::LLT<Matrix> c_llt(c);
  if (c_llt.info() != Eigen::Success) {
    throw NumericalError("weighted_elbo: variational covariance is not positive definite");
  }
  const Matrix lc = c_llt.matrixL();
  const double log_det_c = 2.0 * lc.diagonal().array().log().sum();
  const double kl = 0.5 * (c.trace() + model.whitened_mean().squaredNorm() - static_cast<double>(m) - log_det_c);

  const double elbo = expected_loglik - kl;
  if (!std::isfinite(elbo)) {
    throw NumericalError("weighted_elbo: non-finite value");
  }
  return elbo;
}

void to_json(nlohmann::json& j, const SparseGPModel& model) {
  const auto& z = model.pseudo_inputs();
  nlohmann::json inputs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    inputs.push_back(std::vector<double>(z.row(i).begin(), z.row(i).end()));
  }
  nlohmann::json cov = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.q_cov().rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(model.q_cov().cols()));
    for (Eigen::Index k = 0; k < model.q_cov().cols(); ++k) {
      row[static_cast<std::size_t>(k)] = model.q_cov()(i, k);
    }
    cov.push_back(std::move(row));
  }
  const auto& ls = model.kernel().lengthscales;
  j = nlohmann::json{
      {"pseudo_inputs", std::move(inputs)},
      {"q_mean", std::vector<double>(model.q_mean().begin(), model.q_mean().end())},
      {"q_cov", std::move(cov)},
      {"prior_mean", model.prior_mean()},
      {"noise_variance", model.noise_variance()},
      {"kernel",
       {{"lengthscales", std::vector<double>(ls.begin(), ls.end())},
        {"signal_variance", model.kernel().signal_variance}}},
  };
}

SparseGPModel sparse_gp_from_json(const nlohmann::json& j) {
  const auto inputs = j.at("pseudo_inputs").get<std::vector<std::vector<double>>>();
  const auto q_mean = j.at("q_mean").get<std::vector<double>>();
  const auto q_cov = j.at("q_cov").get<std::vector<std::vector<double>>>();
  const auto ls = j.at("kernel").at("lengthscales").get<std::vector<double>>();
  if (inputs.empty()) {
    throw ContractViolation("sparse GP JSON: no pseudo inputs");
  }
  const auto m = static_cast<Eigen::Index>(inputs.size());
  const auto dims = static_cast<Eigen::Index>(inputs.front().size());
  Points z(m, dims);
  Matrix cov(m, m);
  if (static_cast<Eigen::Index>(q_cov.size()) != m) {
    throw ContractViolation("sparse GP JSON: q_cov has the wrong shape");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = inputs[static_cast<std::size_t>(i)];
    const auto& cov_row = q_cov[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != dims || static_cast<Eigen::Index>(cov_row.size()) != m) {
      throw ContractViolation("sparse GP JSON: ragged arrays");
    }
    for (Eigen::Index d = 0; d < dims; ++d) z(i, d) = row[static_cast<std::size_t>(d)];
    for (Eigen::Index k = 0; k < m; ++k) cov(i, k) = cov_row[static_cast<std::size_t>(k)];
  }
  KernelParams kernel{Eigen::Map<const Vector>(ls.data(), static_cast<Eigen::Index>(ls.size())),
                      j.at("kernel").at("signal_variance").get<double>()};
  return SparseGPModel(std::move(z), std::move(kernel), j.at("prior_mean").get<double>(),
                       j.at("noise_variance").get<double>(),
                       Eigen::Map<const Vector>(q_mean.data(), static_cast<Eigen::Index>(q_mean.size())),
                       std::move(cov));
}

}  // namespace gpstps
