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

#ifndef GPSTPS_CRANE_ENV_HPP
#define GPSTPS_CRANE_ENV_HPP

#include <array>
#include <string>

#include "gpstps/rng.hpp"

namespace gpstps {

enum class Action : int { kGrasp = 0, kScatter = 1 };

enum class GarbageLabel { kSetting1Soft, kSetting2Hard };

/// Grasped amount per grasp duration (1, 2, 3, 4 and longer) plus Gaussian noise.
struct GarbageSetting {
  GarbageLabel label = GarbageLabel::kSetting1Soft;
  std::array<double, 4> grasp_table{3.0, 3.0, 3.0, 3.0};
  double noise_std = 0.7;

  static GarbageSetting soft(double noise_std = 0.7);
  static GarbageSetting hard(double noise_std = 0.7);
  /// 1 -> soft, 2 -> hard.
  static GarbageSetting from_index(int index, double noise_std = 0.7);

  int index() const { return label == GarbageLabel::kSetting1Soft ? 1 : 2; }
};

struct RewardParams {
  double alpha = 1.5;
  double beta = 0.004;
  double u_min = 30.0;

  void validate() const;
};

struct CraneEnvState {
  double weight = 0.0;
  double elapsed_seconds = 0.0;
  bool scattered_any = false;
  bool terminal = false;
};

inline constexpr double kGraspSecondsPerStep = 10.0;
inline constexpr double kScatterSecondsPerStep = 5.0;
inline constexpr double kTerminalWeight = 0.05;
inline constexpr int kMaxActionDuration = 6;

CraneEnvState reset(const GarbageSetting& setting);

/// Noise-free grasped amount before flooring.
double grasp_base_amount(const GarbageSetting& setting, int duration);

/// Replaces the bucket contents with max(0, table[min(duration, 4)] + eps), eps ~ N(0, noise_std).
CraneEnvState apply_grasp(const CraneEnvState& state, int duration, const GarbageSetting& setting, Rng& rng);

/// Same transition with the noise draw supplied by the caller.
CraneEnvState apply_grasp_with_noise(const CraneEnvState& state, int duration, const GarbageSetting& setting,
                                     double epsilon);

double action_reward(double weight, int duration, const RewardParams& params);
double time_reward(double elapsed_seconds, const RewardParams& params);

struct ScatterOutcome {
  CraneEnvState state;
  double reward = 0.0;
  double action_reward = 0.0;
  double time_reward = 0.0;
};

/// One unit of garbage leaves the bucket per scatter step. The reward is the product of
/// the action reward at the trigger-time weight and the time reward at the elapsed time
/// after the scatter. The episode ends once the bucket holds at most kTerminalWeight.
ScatterOutcome apply_scatter(const CraneEnvState& state, int duration, const RewardParams& params);

constexpr double step_reward_for_grasp() { return 0.0; }

/// Stateful wrapper that owns one episode's state.
class CraneEnv {
 public:
  CraneEnv(GarbageSetting setting, RewardParams params);

  const CraneEnvState& reset();
  /// Applies `action` for `duration` steps; returns the reward credited at the trigger.
  double act(Action action, int duration, Rng& rng);

  const CraneEnvState& state() const { return state_; }
  const GarbageSetting& setting() const { return setting_; }
  const RewardParams& params() const { return params_; }

 private:
  GarbageSetting setting_;
  RewardParams params_;
  CraneEnvState state_;
};

}  // namespace gpstps

#endif  // GPSTPS_CRANE_ENV_HPP
