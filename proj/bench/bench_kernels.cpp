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

#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gpstps/kernel.hpp"
#include "gpstps/learner.hpp"
#include "gpstps/rollout_batch.hpp"

namespace {

gpstps::Points random_points(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  gpstps::Points p(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) p(i, 0) = u(rng);
  return p;
}

void BM_GramParallel(benchmark::State& state) {
  const auto x = random_points(state.range(0), 1);
  const auto z = random_points(state.range(0), 2);
  const auto k = gpstps::KernelParams::isotropic(1, 0.7, 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(gpstps::gram_matrix(x, z, k));
}

void BM_GramSerial(benchmark::State& state) {
  const auto x = random_points(state.range(0), 1);
  const auto z = random_points(state.range(0), 2);
  const auto k = gpstps::KernelParams::isotropic(1, 0.7, 1.3);
  for (auto _ : state) benchmark::DoNotOptimize(gpstps::gram_matrix_serial(x, z, k));
}

template <bool Parallel>
void BM_Rollouts(benchmark::State& state) {
  const gpstps::LearnerConfig cfg;
  const auto policies = gpstps::initial_policies(cfg, std::nullopt);
  const gpstps::EnvConfig env{gpstps::GarbageSetting::soft(), gpstps::RewardParams{}};
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 1000 + i;
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(gpstps::collect_episodes(policies, env, seeds, {}));
    } else {
      benchmark::DoNotOptimize(gpstps::collect_episodes_serial(policies, env, seeds, {}));
    }
  }
}

}  // namespace

BENCHMARK(BM_GramParallel)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_GramSerial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_Rollouts<true>)->Arg(10)->Arg(100);
BENCHMARK(BM_Rollouts<false>)->Arg(10)->Arg(100);

BENCHMARK_MAIN();
