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

#include "gpstps/rollout_batch.hpp"

#include <exception>

namespace gpstps {

namespace {

ExtendedEpisode one_episode(const PolicyPair& policies, const EnvConfig& env, std::uint64_t seed,
                            const RolloutLimits& limits) {
  CraneEnv crane(env.setting, env.reward);
  RolloutRng rng = RolloutRng::from_seed(seed);
  return rollout(policies.action, policies.duration, crane, rng, limits);
}

}  // namespace

std::vector<ExtendedEpisode> collect_episodes_serial(const PolicyPair& policies, const EnvConfig& env,
                                                     std::span<const std::uint64_t> seeds,
                                                     const RolloutLimits& limits) {
  std::vector<ExtendedEpisode> episodes;
  episodes.reserve(seeds.size());
  for (const std::uint64_t seed : seeds) {
    episodes.push_back(one_episode(policies, env, seed, limits));
  }
  return episodes;
}

std::vector<ExtendedEpisode> collect_episodes(const PolicyPair& policies, const EnvConfig& env,
                                              std::span<const std::uint64_t> seeds, const RolloutLimits& limits) {
  const auto n = static_cast<long>(seeds.size());
  std::vector<ExtendedEpisode> episodes(seeds.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      episodes[static_cast<std::size_t>(i)] =
          one_episode(policies, env, seeds[static_cast<std::size_t>(i)], limits);
    } catch (...) {
#pragma omp critical(gpstps_rollout_failure)
      if (!failure) {
        failure = std::current_exception();
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return episodes;
}

}  // namespace gpstps
