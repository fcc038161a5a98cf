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

#ifndef GPSTPS_POLICY_HPP
#define GPSTPS_POLICY_HPP

#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gpstps/crane_env.hpp"
#include "gpstps/rng.hpp"
#include "gpstps/sparse_gp.hpp"

namespace gpstps {

/// Affine standardization applied to raw states before they reach a GP.
struct InputScaler {
  Vector shift;
  Vector scale;

  static InputScaler identity(Eigen::Index dims);
  /// Column mean and standard deviation; a zero spread maps to scale 1.
  static InputScaler fit(const Points& states);

  Points apply(const Points& states) const;
  Points apply(std::span<const double> state) const;
};

/// Bernoulli policy over {grasp, scatter} whose scatter probability is the clipped GP mean.
struct ActionPolicy {
  SparseGPModel gp;
  InputScaler scaler;
  double epsilon_clip = 0.01;

  /// Prior policy with mean 0.5 everywhere.
  static ActionPolicy prior(Eigen::Index dims, double noise_variance, double epsilon_clip = 0.01);

  double scatter_probability(std::span<const double> state) const;
};

/// Gaussian duration policy, rounded to whole steps and clamped to [1, tau_max].
struct DurationPolicy {
  SparseGPModel gp;
  InputScaler scaler;
  int tau_max = kMaxActionDuration;

  static DurationPolicy prior(Eigen::Index dims, double noise_variance, int tau_max = kMaxActionDuration);

  /// Latent GP moments at the state (before noise, rounding, clamping).
  Prediction latent(std::span<const double> state) const;
  /// Standard deviation of the sampling distribution: sqrt(latent variance + noise).
  double sampling_std(std::span<const double> state) const;
};

/// GPPS baseline: every action is held for the same number of steps.
struct FixedDuration {
  int steps = 1;
};

using DurationRule = std::variant<DurationPolicy, FixedDuration>;

Action sample_action(const ActionPolicy& policy, std::span<const double> state, Rng& rng);
int sample_duration(const DurationPolicy& policy, std::span<const double> state, Rng& rng);

/// Hold/trigger bookkeeping between steps.
struct GatingState {
  Action held_action = Action::kGrasp;
  int remaining = 1;
  bool triggered_this_step = true;

  /// State at the first step of an episode: the policies are always consulted.
  static GatingState episode_start() { return {}; }
};

/// Advances one step. A remaining duration of 1 triggers the next step; otherwise the action
/// is held and the countdown drops by one. Throws ContractViolation when remaining < 1.
GatingState gate_step(const GatingState& gate);

struct EpisodeStep {
  double state = 0.0;
  Action action = Action::kGrasp;
  /// Remaining duration tau_t, counting down along a hold.
  int duration = 1;
  bool gate = true;
  double reward = 0.0;
  /// Simulated seconds at the end of this step.
  double elapsed_seconds = 0.0;
};

struct ExtendedEpisode {
  std::vector<EpisodeStep> steps;
  double ret = 0.0;
  double elapsed_seconds = 0.0;
  bool truncated = false;

  int trigger_count() const;
};

struct RolloutLimits {
  int max_triggers = 30;
};

/// Independent streams so that e.g. the duration draw never shifts the action draws.
struct RolloutRng {
  Rng action;
  Rng duration;
  Rng env;

  static RolloutRng from_seed(std::uint64_t seed);
};

/// Ancestral sampling of one extended episode from a reset environment.
ExtendedEpisode rollout(const ActionPolicy& action_policy, const DurationRule& duration_rule, CraneEnv& env,
                        RolloutRng& rng, const RolloutLimits& limits);

/// Hold and countdown invariants: after a trigger with duration k the next k-1 steps are gate 0,
/// keep the action, and count the duration down by one; the return is the sum of step rewards.
bool satisfies_gating_invariants(const ExtendedEpisode& episode);

/// Dense evaluation grid and both models, as consumed by the plotting scripts.
nlohmann::json policy_dump(const ActionPolicy& action_policy, const DurationRule& duration_rule, int iteration);

struct PolicyPair {
  ActionPolicy action;
  DurationRule duration;
};

PolicyPair policies_from_dump(const nlohmann::json& dump);

}  // namespace gpstps

#endif  // GPSTPS_POLICY_HPP
