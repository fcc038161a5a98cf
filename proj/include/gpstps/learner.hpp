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

#ifndef GPSTPS_LEARNER_HPP
#define GPSTPS_LEARNER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gpstps/policy.hpp"
#include "gpstps/rollout_batch.hpp"

namespace gpstps {

struct LearnerConfig {
  int episodes_per_iteration = 10;
  int iterations = 100;
  int pseudo_inputs = 5;
  int tau_max = 6;
  int replay_window = 5;
  double target_ess = 0.5;
  std::uint64_t seed = 1;

  double epsilon_clip = 0.01;
  // Exploration schedule: noise std at iteration t is max(floor, init * decay^t).
  double action_noise_init = 0.25;
  double duration_noise_init = 2.0;
  double noise_decay = 0.97;
  double noise_floor = 0.1;

  int max_triggers = 30;
  int hyper_budget = 15;
  int hyper_restarts = 3;
  int dump_every = 10;
  bool heuristic_initial_policy = false;

  void validate() const;

  double action_noise_std(int iteration) const;
  double duration_noise_std(int iteration) const;
};

struct TriggerSample {
  double state = 0.0;
  Action action = Action::kGrasp;
  int duration = 1;
  /// Regression weight. The training loop passes the normalized episode weight times the
  /// number of pooled episodes, so the weights average to one per episode.
  double episode_weight = 0.0;
};

struct LearningCurvePoint {
  int iteration = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double mean_episode_seconds = 0.0;
};

double effective_sample_size(std::span<const double> weights);

/// Softmax weights exp((R_i - max R) / eta), normalized to sum 1. The temperature is the
/// smallest eta (found by bisection in log space) whose effective sample size reaches
/// target_ess * N. Equal returns give uniform weights.
std::vector<double> compute_weights(std::span<const double> returns, double target_ess);

/// Gate-1 steps only; held steps are deterministic and carry no policy factor.
std::vector<TriggerSample> extract_trigger_samples(const ExtendedEpisode& episode, double weight);

struct ImproveContext {
  int iteration = 0;
  /// Likelihood noise used for the fitted policies (and hence their exploration).
  double action_noise_variance = 0.0625;
  double duration_noise_variance = 4.0;
  bool learn_duration = true;
};

/// Return-weighted sparse-GP regression of actions and durations on trigger states.
/// Zero-weight samples are dropped before anything else. When learn_duration is false the
/// current duration rule is kept.
PolicyPair improve_policies(std::span<const TriggerSample> samples, const LearnerConfig& config,
                            const PolicyPair& current, const ImproveContext& context);

struct PolicySnapshot {
  int iteration = 0;
  PolicyPair policies;
};

struct TrainingResult {
  PolicyPair policies;
  std::vector<LearningCurvePoint> curve;
  /// Iteration 0 (initial policies), then every dump_every iterations.
  std::vector<PolicySnapshot> dumps;
};

/// Called once per iteration with the freshly collected episodes, in seed order.
using EpisodeObserver = std::function<void(int iteration, std::span<const ExtendedEpisode> episodes)>;

/// Policy pair before any learning.
PolicyPair initial_policies(const LearnerConfig& config, std::optional<int> fixed_duration);

TrainingResult train_gpstps(const LearnerConfig& config, const EnvConfig& env, const EpisodeObserver& observer = {});

/// Fixed-duration baseline: only the action policy is learned.
TrainingResult train_gpps_fixed(const LearnerConfig& config, const EnvConfig& env, int fixed_duration,
                                const EpisodeObserver& observer = {});

/// Mean of mean_return over the last `window` curve points (fewer if the curve is shorter).
double final_return(std::span<const LearningCurvePoint> curve, int window = 10);

}  // namespace gpstps

#endif  // GPSTPS_LEARNER_HPP
