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

#include "gpstps/gp_training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "gpstps/rng.hpp"

namespace gpstps {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// theta = log(lengthscales..., signal_variance[, noise_variance])
Vector pack(const SparseGPModel& model, bool with_noise) {
  const Eigen::Index d = model.kernel().dims();
  Vector theta(d + 1 + (with_noise ? 1 : 0));
  theta.head(d) = model.kernel().lengthscales.array().log();
  theta[d] = std::log(model.kernel().signal_variance);
  if (with_noise) {
    theta[d + 1] = std::log(model.noise_variance());
  }
  return theta;
}

SparseGPModel unpack(const SparseGPModel& model, const Vector& theta, bool with_noise) {
  const Eigen::Index d = model.kernel().dims();
  KernelParams kernel{theta.head(d).array().exp(), std::exp(theta[d])};
  const double noise = with_noise ? std::exp(theta[d + 1]) : model.noise_variance();
  return model.with_hyperparameters(kernel, noise);
}

struct Candidate {
  std::optional<SparseGPModel> model;
  double elbo = kNegInf;
};

Candidate evaluate(const WeightedDataset& data, const SparseGPModel& base, const Vector& theta, bool with_noise) {
  try {
    SparseGPModel fitted = fit_weighted(data, unpack(base, theta, with_noise));
    const double elbo = weighted_elbo(data, fitted);
    return {std::move(fitted), std::isfinite(elbo) ? elbo : kNegInf};
  } catch (const NumericalError&) {
    return {};
  }
}

}  // namespace

HyperoptResult optimize_hyperparameters_traced(const WeightedDataset& data, const SparseGPModel& model,
                                               const HyperoptOptions& options) {
  data.validate(true);
  double input_elbo = kNegInf;
  try {
    input_elbo = weighted_elbo(data, model);
  } catch (const NumericalError&) {
  }
  HyperoptResult result{model, input_elbo, input_elbo, {}};
  if (options.budget <= 0) {
    return result;
  }

  const bool with_noise = options.optimize_noise;
  const Vector theta0 = pack(model, with_noise);
  const double lo = std::log(options.lower);
  const double hi = std::log(options.upper);
  Rng rng(derive_seed(options.seed, {0x6879706572ULL}));
  std::normal_distribution<double> perturb(0.0, 1.0);

  Candidate best{model, input_elbo};
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Vector theta = theta0;
    if (r > 0) {
      for (Eigen::Index k = 0; k < theta.size(); ++k) {
        theta[k] += perturb(rng);
      }
    }
    theta = theta.cwiseMax(lo).cwiseMin(hi);
    Candidate current = evaluate(data, model, theta, with_noise);
    std::vector<double> accepted;
    if (std::isfinite(current.elbo)) {
      accepted.push_back(current.elbo);
    }

    double step = options.initial_step;
    for (int sweep = 0; sweep < options.budget && step >= options.min_step; ++sweep) {
      bool moved = false;
      for (Eigen::Index k = 0; k < theta.size(); ++k) {
        for (const double sign : {1.0, -1.0}) {
          Vector proposal = theta;
          proposal[k] = std::clamp(proposal[k] + sign * step, lo, hi);
          if (proposal[k] == theta[k]) {
            continue;
          }
          Candidate trial = evaluate(data, model, proposal, with_noise);
          if (trial.elbo > current.elbo) {
            theta = proposal;
            current = std::move(trial);
            accepted.push_back(current.elbo);
            moved = true;
            break;
          }
        }
      }
      if (!moved) {
        step *= 0.5;
      }
    }
    if (current.model && current.elbo > best.elbo) {
      best = std::move(current);
    }
    result.accepted_elbo.push_back(std::move(accepted));
  }

  result.model = std::move(*best.model);
  result.final_elbo = best.elbo;
  return result;
}

SparseGPModel optimize_hyperparameters(const WeightedDataset& data, const SparseGPModel& model,
                                       const HyperoptOptions& options) {
  return optimize_hyperparameters_traced(data, model, options).model;
}

Points select_pseudo_inputs(const Points& states, std::span<const double> weights, Eigen::Index count,
                            std::uint64_t seed) {
  if (states.rows() == 0 || states.cols() == 0) {
    throw ContractViolation("select_pseudo_inputs: no states");
  }
  if (static_cast<Eigen::Index>(weights.size()) != states.rows()) {
    throw ContractViolation("select_pseudo_inputs: weights and states differ in length");
  }
  if (count < 1) {
    throw ContractViolation("select_pseudo_inputs: count must be at least 1");
  }
  const Eigen::Index dims = states.cols();

  // Collapse to distinct positive-weight states, in first-seen order.
  std::vector<Eigen::Index> distinct;
  std::vector<double> mass;
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    const double w = weights[static_cast<std::size_t>(i)];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ContractViolation("select_pseudo_inputs: negative or non-finite weight");
    }
    if (w == 0.0) {
      continue;
    }
    auto it = std::find_if(distinct.begin(), distinct.end(),
                           [&](Eigen::Index k) { return states.row(k) == states.row(i); });
    if (it == distinct.end()) {
      distinct.push_back(i);
      mass.push_back(w);
    } else {
      mass[static_cast<std::size_t>(it - distinct.begin())] += w;
    }
  }
  if (distinct.empty()) {
    throw ContractViolation("select_pseudo_inputs: no state with positive weight");
  }
  const auto n = static_cast<Eigen::Index>(distinct.size());
  Points pts(n, dims);
  for (Eigen::Index k = 0; k < n; ++k) {
    pts.row(k) = states.row(distinct[static_cast<std::size_t>(k)]);
  }
  const Eigen::Map<const Vector> w(mass.data(), n);
  const double total = w.sum();

  Rng rng(derive_seed(seed, {0x6b6d65616e73ULL}));
  Points centers(count, dims);

  if (n <= count) {
    Eigen::RowVectorXd mean = (w.transpose() * pts) / total;
    Eigen::RowVectorXd spread(dims);
    for (Eigen::Index d = 0; d < dims; ++d) {
      const double var = (w.array() * (pts.col(d).array() - mean[d]).square()).sum() / total;
      spread[d] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    std::vector<Eigen::Index> by_mass(static_cast<std::size_t>(n));
    std::iota(by_mass.begin(), by_mass.end(), 0);
    std::stable_sort(by_mass.begin(), by_mass.end(), [&](Eigen::Index a, Eigen::Index b) { return w[a] > w[b]; });
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    for (Eigen::Index k = 0; k < count; ++k) {
      if (k < n) {
        centers.row(k) = pts.row(k);
        continue;
      }
      centers.row(k) = pts.row(by_mass[static_cast<std::size_t>((k - n) % n)]);
      for (Eigen::Index d = 0; d < dims; ++d) {
        centers(k, d) += jitter(rng) * spread[d];
      }
    }
    return centers;
  }

  // k-means++ seeding with weights w_i * D(x_i)^2.
  Vector dist2 = Vector::Constant(n, std::numeric_limits<double>::infinity());
  auto pick = [&](const Vector& score) {
    std::discrete_distribution<Eigen::Index> choose(score.data(), score.data() + score.size());
    return choose(rng);
  };
  centers.row(0) = pts.row(pick(w));
  for (Eigen::Index k = 1; k < count; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], (pts.row(i) - centers.row(k - 1)).squaredNorm());
    }
    const Vector score = w.cwiseProduct(dist2);
    centers.row(k) = pts.row(score.sum() > 0.0 ? pick(score) : pick(w));
  }

  // Lloyd iterations; an emptied cluster keeps its previous center.
  std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < count; ++k) {
        const double d = (pts.row(i) - centers.row(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
    Points sums = Points::Zero(count, dims);
    Vector cluster_mass = Vector::Zero(count);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index k = assign[static_cast<std::size_t>(i)];
      sums.row(k) += w[i] * pts.row(i);
      cluster_mass[k] += w[i];
    }
    for (Eigen::Index k = 0; k < count; ++k) {
      if (cluster_mass[k] > 0.0) {
        centers.row(k) = sums.row(k) / cluster_mass[k];
      }
    }
  }
  return centers;
}

}  // namespace gpstps
