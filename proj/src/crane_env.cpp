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

#include "gpstps/crane_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpstps/kernel.hpp"

namespace gpstps {

namespace {

void check_duration(int duration, const CraneEnvState& state) {
  if (duration < 1 || duration > kMaxActionDuration) {
    throw ContractViolation("crane env: duration " + std::to_string(duration) + " outside [1, 6]");
  }
  if (state.terminal) {
    throw ContractViolation("crane env: action applied to a terminal state");
  }
}

}  // namespace

GarbageSetting GarbageSetting::soft(double noise_std) {
  return {GarbageLabel::kSetting1Soft, {3.0, 3.0, 3.0, 3.0}, noise_std};
}

GarbageSetting GarbageSetting::hard(double noise_std) {
  return {GarbageLabel::kSetting2Hard, {2.0, 3.0, 5.0, 5.0}, noise_std};
}

GarbageSetting GarbageSetting::from_index(int index, double noise_std) {
  switch (index) {
    case 1:
      return soft(noise_std);
    case 2:
      return hard(noise_std);
    default:
      throw ContractViolation("garbage setting must be 1 or 2, got " + std::to_string(index));
  }
}

void RewardParams::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(u_min > 0.0)) {
    throw ContractViolation("reward params: need alpha >= 0, beta >= 0, u_min > 0");
  }
}

CraneEnvState reset(const GarbageSetting& /*setting*/) { return CraneEnvState{}; }

double grasp_base_amount(const GarbageSetting& setting, int duration) {
  if (duration < 1) {
    throw ContractViolation("grasp duration must be positive");
  }
  return setting.grasp_table[static_cast<std::size_t>(std::min(duration, 4) - 1)];
}

CraneEnvState apply_grasp_with_noise(const CraneEnvState& state, int duration, const GarbageSetting& setting,
                                     double epsilon) {
  check_duration(duration, state);
  CraneEnvState next = state;
  next.weight = std::max(0.0, grasp_base_amount(setting, duration) + epsilon);
  next.elapsed_seconds += kGraspSecondsPerStep * duration;
  return next;
}

CraneEnvState apply_grasp(const CraneEnvState& state, int duration, const GarbageSetting& setting, Rng& rng) {
  double epsilon = 0.0;
  if (setting.noise_std > 0.0) {
    epsilon = std::normal_distribution<double>(0.0, setting.noise_std)(rng);
  }
  return apply_grasp_with_noise(state, duration, setting, epsilon);
}

double action_reward(double weight, int duration, const RewardParams& params) {
  const auto tau = static_cast<double>(duration);
  return std::min(weight, tau) - params.alpha * std::abs(weight - tau);
}

double time_reward(double elapsed_seconds, const RewardParams& params) {
  const double d = elapsed_seconds - params.u_min;
  return std::exp(-params.beta * d * d);
}

ScatterOutcome apply_scatter(const CraneEnvState& state, int duration, const RewardParams& params) {
  check_duration(duration, state);
  ScatterOutcome out{state, 0.0, 0.0, 0.0};
  const double s = state.weight;
  out.state.weight = std::max(0.0, s - static_cast<double>(duration));
  out.state.elapsed_seconds += kScatterSecondsPerStep * duration;
  out.state.scattered_any = true;
  out.state.terminal = out.state.weight <= kTerminalWeight;
  out.action_reward = action_reward(s, duration, params);
  out.time_reward = time_reward(out.state.elapsed_seconds, params);
  out.reward = out.action_reward * out.time_reward;
  return out;
}

CraneEnv::CraneEnv(GarbageSetting setting, RewardParams params)
    : setting_(setting), params_(params), state_(gpstps::reset(setting)) {
  params_.validate();
}

const CraneEnvState& CraneEnv::reset() {
  state_ = gpstps::reset(setting_);
  return state_;
}

double CraneEnv::act(Action action, int duration, Rng& rng) {
  if (action == Action::kGrasp) {
    state_ = apply_grasp(state_, duration, setting_, rng);
    return step_reward_for_grasp();
  }
  ScatterOutcome out = apply_scatter(state_, duration, params_);
  state_ = out.state;
  return out.reward;
}

}  // namespace gpstps
