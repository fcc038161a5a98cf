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

#ifndef GPSTPS_ROLLOUT_BATCH_HPP
#define GPSTPS_ROLLOUT_BATCH_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gpstps/policy.hpp"

namespace gpstps {

struct EnvConfig {
  GarbageSetting setting = GarbageSetting::soft();
  RewardParams reward;
};

/// One episode per seed, each with its own environment and RolloutRng::from_seed(seed).
/// Episodes are written to their seed's slot, so the result does not depend on scheduling.
std::vector<ExtendedEpisode> collect_episodes(const PolicyPair& policies, const EnvConfig& env,
                                              std::span<const std::uint64_t> seeds, const RolloutLimits& limits);

/// Single-threaded reference for collect_episodes.
std::vector<ExtendedEpisode> collect_episodes_serial(const PolicyPair& policies, const EnvConfig& env,
                                                     std::span<const std::uint64_t> seeds,
                                                     const RolloutLimits& limits);

}  // namespace gpstps

#endif  // GPSTPS_ROLLOUT_BATCH_HPP
