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

#ifndef GPSTPS_GP_TRAINING_HPP
#define GPSTPS_GP_TRAINING_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gpstps/sparse_gp.hpp"

namespace gpstps {

struct HyperoptOptions {
  /// Coordinate sweeps per restart. Zero returns the input model untouched.
  int budget = 20;
  int restarts = 3;
  /// When false the noise variance is held at the input value.
  bool optimize_noise = true;
  std::uint64_t seed = 0;
  double initial_step = 0.5;
  double min_step = 1e-3;
  /// Box for every log-parameter, applied as log(lower) <= theta <= log(upper).
  double lower = 1e-3;
  double upper = 1e3;
};

struct HyperoptResult {
  SparseGPModel model;
  /// ELBO of the input model, as given.
  double initial_elbo = 0.0;
  double final_elbo = 0.0;
  /// ELBO after each accepted step, one sequence per restart.
  std::vector<std::vector<double>> accepted_elbo;
};

/// Derivative-free coordinate ascent on the weighted ELBO in log-parameter space.
///
/// Each proposal multiplies one hyperparameter by exp(+step) or exp(-step), refits q in closed
/// form, and is accepted only if the ELBO rises. A sweep with no acceptance halves the step.
/// Restart 0 starts at the input; later restarts start from seeded log-normal perturbations of it.
/// The returned model is never worse than the input; a non-finite ELBO counts as -infinity.
HyperoptResult optimize_hyperparameters_traced(const WeightedDataset& data, const SparseGPModel& model,
                                               const HyperoptOptions& options);

SparseGPModel optimize_hyperparameters(const WeightedDataset& data, const SparseGPModel& model,
                                       const HyperoptOptions& options);

/// Weighted k-means (k-means++ seeding) centers used as pseudo inputs.
///
/// Only positive-weight states take part. When there are no more distinct states than `count`,
/// every distinct state becomes a center and the remainder are copies of the heaviest states
/// perturbed by uniform noise of at most 1e-3 times the per-dimension spread.
Points select_pseudo_inputs(const Points& states, std::span<const double> weights, Eigen::Index count,
                            std::uint64_t seed);

}  // namespace gpstps

#endif  // GPSTPS_GP_TRAINING_HPP
