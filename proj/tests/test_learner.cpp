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

#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "gpstps/learner.hpp"
#include "gpstps/stats.hpp"

using namespace gpstps;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double action_prob(const PolicyPair& p, double s) {
  const std::array<double, 1> x{s};
  return p.action.scatter_probability(x);
}

double duration_mean(const PolicyPair& p, double s) {
  const std::array<double, 1> x{s};
  return std::get<DurationPolicy>(p.duration).latent(x).mean;
}

std::vector<double> finals(const EnvConfig& env, std::optional<int> fixed, int iterations, int seeds) {
  std::vector<double> out;
  for (int s = 1; s <= seeds; ++s) {
    LearnerConfig cfg;
    cfg.iterations = iterations;
    cfg.seed = static_cast<std::uint64_t>(s);
    const TrainingResult r = fixed ? train_gpps_fixed(cfg, env, *fixed) : train_gpstps(cfg, env);
    out.push_back(final_return(r.curve));
  }
  return out;
}

}  // namespace

TEST_CASE("equal returns give uniform weights") {
  const std::vector<double> r(7, -2.5);
  for (const double w : compute_weights(r, 0.5)) CHECK(w == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("two-point weights hit the ESS target with the closed-form ratio") {
  // ESS = (1 + q)^2 / (1 + q^2) = 2 * 0.75 solves to q = w1 / w2 = 2 - sqrt(3).
  const std::vector<double> r{0.0, 10.0};
  const std::vector<double> w = compute_weights(r, 0.75);
  CHECK(w[1] > w[0]);
  CHECK(w[0] / w[1] == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-6));
  CHECK(effective_sample_size(w) == doctest::Approx(1.5).epsilon(0.01));
}

TEST_CASE("weights are shift invariant, normalized and meet the ESS target") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<double> r(50);
    for (auto& v : r) v = g(rng);
    const std::vector<double> w = compute_weights(r, 0.5);
    CHECK(std::abs(sum(w) - 1.0) < 1e-12);
    CHECK(effective_sample_size(w) >= 25.0 - 1e-9);
    CHECK(effective_sample_size(w) <= 25.0 * 1.01);
    std::vector<double> shifted = r;
    for (auto& v : shifted) v += 1234.5;
    const std::vector<double> w2 = compute_weights(shifted, 0.5);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w2[i] == doctest::Approx(w[i]).epsilon(1e-6));
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (r[i] > r[j]) CHECK(w[i] >= w[j]);
      }
    }
  }
  CHECK_THROWS_AS(compute_weights(std::vector<double>{1.0}, 0.5), ContractViolation);
}

TEST_CASE("trigger samples come only from gate-1 steps") {
  ExtendedEpisode e;
  e.steps = {{0.0, Action::kGrasp, 2, true, 0.0, 10.0},
             {0.0, Action::kGrasp, 1, false, 0.0, 20.0},
             {3.0, Action::kScatter, 3, true, 3.0, 35.0},
             {2.0, Action::kScatter, 2, false, 0.0, 40.0},
             {1.0, Action::kScatter, 1, false, 0.0, 45.0}};
  const auto s = extract_trigger_samples(e, 0.25);
  REQUIRE(s.size() == static_cast<std::size_t>(e.trigger_count()));
  CHECK(s[0].state == 0.0);
  CHECK(s[0].duration == 2);
  CHECK(s[1].action == Action::kScatter);
  CHECK(s[1].duration == 3);
  CHECK(s[1].episode_weight == 0.25);
}

TEST_CASE("improve_policies learns a grasp-then-scatter action rule") {
  LearnerConfig cfg;
  std::vector<TriggerSample> samples;
  for (int k = 0; k < 10; ++k) {
    samples.push_back({0.0, Action::kGrasp, 2, 1.0});
    samples.push_back({2.0 + 0.3 * k, Action::kScatter, 3, 1.0});
  }
  const PolicyPair start = initial_policies(cfg, std::nullopt);
  const PolicyPair p = improve_policies(samples, cfg, start, ImproveContext{1, 0.01, 0.25, true});
  CHECK(action_prob(p, 0.0) < 0.5);
  CHECK(action_prob(p, 3.0) > 0.5);
}

TEST_CASE("constant duration targets give a flat duration policy") {
  LearnerConfig cfg;
  std::vector<TriggerSample> samples;
  for (int k = 0; k < 20; ++k) samples.push_back({0.25 * k, k % 2 ? Action::kScatter : Action::kGrasp, 2, 1.0});
  const PolicyPair p =
      improve_policies(samples, cfg, initial_policies(cfg, std::nullopt), ImproveContext{1, 0.0625, 0.25, true});
  for (double s = 0.0; s <= 4.75; s += 0.25) CHECK(std::abs(duration_mean(p, s) - 2.0) < 0.1);
}

TEST_CASE("zero-weight samples do not change the fit") {
  LearnerConfig cfg;
  std::vector<TriggerSample> positive;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int k = 0; k < 15; ++k) {
    const double s = u(rng);
    positive.push_back({s, s > 1.0 ? Action::kScatter : Action::kGrasp, 1 + k % 4, 0.5 + 0.1 * k});
  }
  std::vector<TriggerSample> mixed = positive;
  for (int k = 0; k < 10; ++k) mixed.insert(mixed.begin() + 2 * k, {u(rng), Action::kScatter, 6, 0.0});
  const PolicyPair start = initial_policies(cfg, std::nullopt);
  const ImproveContext ctx{3, 0.04, 1.0, true};
  const PolicyPair a = improve_policies(positive, cfg, start, ctx);
  const PolicyPair b = improve_policies(mixed, cfg, start, ctx);
  for (double s = 0.0; s <= 6.0; s += 0.5) {
    CHECK(action_prob(a, s) == action_prob(b, s));
    CHECK(duration_mean(a, s) == duration_mean(b, s));
  }
}

TEST_CASE("fixed-duration improvement keeps the fixed rule") {
  LearnerConfig cfg;
  const std::vector<TriggerSample> samples{{0.0, Action::kGrasp, 3, 1.0}, {3.0, Action::kScatter, 3, 1.0}};
  const PolicyPair p =
      improve_policies(samples, cfg, initial_policies(cfg, 3), ImproveContext{1, 0.0625, 4.0, false});
  CHECK(std::get<FixedDuration>(p.duration).steps == 3);
  const std::vector<TriggerSample> none{{0.0, Action::kGrasp, 3, 0.0}};
  CHECK_THROWS_AS(improve_policies(none, cfg, p, ImproveContext{}), ContractViolation);
}

TEST_CASE("zero iterations return the initial policies and an empty curve") {
  LearnerConfig cfg;
  cfg.iterations = 0;
  const TrainingResult r = train_gpstps(cfg, EnvConfig{});
  CHECK(r.curve.empty());
  REQUIRE(r.dumps.size() == 1);
  CHECK(r.dumps[0].iteration == 0);
  CHECK(action_prob(r.policies, 2.0) == doctest::Approx(0.5));
  CHECK(duration_mean(r.policies, 2.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("training is deterministic and dumps on schedule") {
  LearnerConfig cfg;
  cfg.iterations = 12;
  cfg.dump_every = 5;
  cfg.seed = 4;
  const EnvConfig env{GarbageSetting::hard(), RewardParams{}};
  const TrainingResult a = train_gpstps(cfg, env);
  const TrainingResult b = train_gpstps(cfg, env);
  REQUIRE(a.curve.size() == 12);
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    CHECK(a.curve[i].iteration == static_cast<int>(i) + 1);
    CHECK(a.curve[i].mean_return == b.curve[i].mean_return);
    CHECK(a.curve[i].std_return == b.curve[i].std_return);
  }
  REQUIRE(a.dumps.size() == 3);
  CHECK(a.dumps[1].iteration == 5);
  CHECK(a.dumps[2].iteration == 10);
  CHECK_THROWS_AS(train_gpps_fixed(cfg, env, 0), ContractViolation);
  cfg.episodes_per_iteration = 1;
  CHECK_THROWS_AS(train_gpstps(cfg, env), ContractViolation);
}

TEST_CASE("the exploration schedule decays to its floor") {
  LearnerConfig cfg;
  CHECK(cfg.action_noise_std(0) == 0.25);
  CHECK(cfg.duration_noise_std(0) == 2.0);
  CHECK(cfg.duration_noise_std(10) == doctest::Approx(2.0 * std::pow(0.97, 10)));
  CHECK(cfg.action_noise_std(100) == 0.1);
  CHECK(final_return(std::vector<LearningCurvePoint>{}) == 0.0);
  const std::vector<LearningCurvePoint> c{{1, 1.0}, {2, 2.0}, {3, 4.0}};
  CHECK(final_return(c, 2) == 3.0);
}

TEST_CASE("tau_max = 1 and fixed duration 1 sample the same process") {
  std::vector<double> a;
  std::vector<double> b;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    LearnerConfig cfg;
    cfg.iterations = 20;
    cfg.tau_max = 1;
    cfg.seed = s;
    a.push_back(final_return(train_gpstps(cfg, EnvConfig{}).curve));
    b.push_back(final_return(train_gpps_fixed(cfg, EnvConfig{}, 1).curve));
  }
  CHECK(paired_t_test(a, b).p > 0.05);
}

TEST_CASE("setting 1 learning improves on the first iteration in at least 9 of 10 seeds") {
  int improved = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    LearnerConfig cfg;
    cfg.seed = s;
    const TrainingResult r = train_gpstps(cfg, EnvConfig{});
    improved += final_return(r.curve) > r.curve.front().mean_return ? 1 : 0;
  }
  CHECK(improved >= 9);
}

// Expected to fail: under these dynamics a fixed 3-step hold pays the over-scatter penalty on
// every 5-unit hard grasp and sits near zero, while fixed 1-step control can still learn to
// grasp repeatedly and scatter single units near u_min.
TEST_CASE("setting 2: fixed duration 1 underperforms fixed duration 3" * doctest::should_fail()) {
  const EnvConfig env{GarbageSetting::hard(), RewardParams{}};
  const double one = mean(finals(env, 1, 100, 10));
  const double three = mean(finals(env, 3, 100, 10));
  MESSAGE("fixed 1: " << one << ", fixed 3: " << three);
  CHECK(one < three);
}

TEST_CASE("the heuristic initial policy grasps from an empty bucket") {
  LearnerConfig cfg;
  cfg.heuristic_initial_policy = true;
  const PolicyPair p = initial_policies(cfg, std::nullopt);
  CHECK(action_prob(p, 0.0) < 0.1);
  CHECK(action_prob(p, 6.0) == doctest::Approx(0.5).epsilon(1e-3));
}
