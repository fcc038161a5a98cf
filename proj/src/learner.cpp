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

#include "gpstps/learner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "gpstps/gp_training.hpp"

namespace gpstps {

namespace {

enum : std::uint64_t { kTagRollout = 1, kTagPseudo = 2, kTagActionHyper = 3, kTagDurationHyper = 4 };

std::vector<double> softmax_weights(std::span<const double> returns, double max_return, double eta) {
  std::vector<double> w(returns.size());
  double total = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    w[i] = std::exp((returns[i] - max_return) / eta);
    total += w[i];
  }
  for (double& v : w) {
    v /= total;
  }
  return w;
}

LearningCurvePoint curve_point(int iteration, std::span<const ExtendedEpisode> episodes) {
  const auto n = static_cast<double>(episodes.size());
  double sum = 0.0;
  double seconds = 0.0;
  for (const auto& e : episodes) {
    sum += e.ret;
    seconds += e.elapsed_seconds;
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (const auto& e : episodes) {
    ss += (e.ret - mean) * (e.ret - mean);
  }
  const double sd = episodes.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {iteration, mean, sd, seconds / n};
}

ActionPolicy heuristic_action_policy(const LearnerConfig& config) {
  // Grasps when the bucket is empty, undecided elsewhere.
  const double noise = config.action_noise_std(0) * config.action_noise_std(0);
  ActionPolicy policy = ActionPolicy::prior(1, noise, config.epsilon_clip);
  WeightedDataset data{Points::Zero(1, 1), Vector::Zero(1), Vector::Constant(1, 1e4)};
  policy.gp = fit_weighted(data, policy.gp);
  return policy;
}

SparseGPModel fit_policy_gp(const WeightedDataset& data, const Points& pseudo, double prior_mean,
                            double noise_variance, const LearnerConfig& config, std::uint64_t seed) {
  SparseGPModel start(pseudo, KernelParams::isotropic(pseudo.cols(), 1.0, 1.0), prior_mean, noise_variance);
  HyperoptOptions options;
  options.budget = config.hyper_budget;
  options.restarts = config.hyper_restarts;
  options.optimize_noise = false;
  options.seed = seed;
  return fit_weighted(data, optimize_hyperparameters(data, start, options));
}

TrainingResult train_loop(const LearnerConfig& config, const EnvConfig& env, std::optional<int> fixed_duration,
                          const EpisodeObserver& observer) {
  config.validate();
  env.reward.validate();
  TrainingResult result{initial_policies(config, fixed_duration), {}, {}};
  result.dumps.push_back({0, result.policies});

  const RolloutLimits limits{config.max_triggers};
  std::deque<std::vector<ExtendedEpisode>> pool;
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config.episodes_per_iteration));

  for (int it = 0; it < config.iterations; ++it) {
    for (std::size_t e = 0; e < seeds.size(); ++e) {
      seeds[e] = derive_seed(config.seed, {kTagRollout, static_cast<std::uint64_t>(it), e});
    }
    std::vector<ExtendedEpisode> episodes = collect_episodes(result.policies, env, seeds, limits);
    if (observer) {
      observer(it + 1, episodes);
    }
    result.curve.push_back(curve_point(it + 1, episodes));

    pool.push_back(std::move(episodes));
    while (static_cast<int>(pool.size()) > config.replay_window) {
      pool.pop_front();
    }
    std::vector<double> returns;
    for (const auto& batch : pool) {
      for (const auto& e : batch) {
        returns.push_back(e.ret);
      }
    }
    const std::vector<double> weights = compute_weights(returns, config.target_ess);
    const auto scale = static_cast<double>(returns.size());

    std::vector<TriggerSample> samples;
    std::size_t k = 0;
    for (const auto& batch : pool) {
      for (const auto& e : batch) {
        const auto s = extract_trigger_samples(e, weights[k++] * scale);
        samples.insert(samples.end(), s.begin(), s.end());
      }
    }

    const double sf = config.action_noise_std(it + 1);
    const double sg = config.duration_noise_std(it + 1);
    const ImproveContext context{it + 1, sf * sf, sg * sg, !fixed_duration.has_value()};
    result.policies = improve_policies(samples, config, result.policies, context);

    if ((it + 1) % config.dump_every == 0) {
      result.dumps.push_back({it + 1, result.policies});
    }
  }
  return result;
}

}  // namespace

void LearnerConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* rule) {
    if (!ok) {
      throw ContractViolation(std::string("learner config: ") + field + " " + rule);
    }
  };
  require(episodes_per_iteration >= 2, "episodes_per_iteration", "must be at least 2");
  require(iterations >= 0, "iterations", "must be non-negative");
  require(pseudo_inputs >= 1, "pseudo_inputs", "must be at least 1");
  require(tau_max >= 1 && tau_max <= kMaxActionDuration, "tau_max", "must lie in [1, 6]");
  require(replay_window >= 1, "replay_window", "must be at least 1");
  require(target_ess > 0.0 && target_ess <= 1.0, "target_ess", "must lie in (0, 1]");
  require(epsilon_clip > 0.0 && epsilon_clip < 0.5, "epsilon_clip", "must lie in (0, 0.5)");
  require(action_noise_init > 0.0, "action_noise_init", "must be positive");
  require(duration_noise_init > 0.0, "duration_noise_init", "must be positive");
  require(noise_decay > 0.0 && noise_decay <= 1.0, "noise_decay", "must lie in (0, 1]");
  require(noise_floor > 0.0, "noise_floor", "must be positive");
  require(max_triggers >= 1, "max_triggers", "must be at least 1");
  require(hyper_budget >= 0, "hyper_budget", "must be non-negative");
  require(hyper_restarts >= 1, "hyper_restarts", "must be at least 1");
  require(dump_every >= 1, "dump_every", "must be at least 1");
}

double LearnerConfig::action_noise_std(int iteration) const {
  return std::max(noise_floor, action_noise_init * std::pow(noise_decay, iteration));
}

double LearnerConfig::duration_noise_std(int iteration) const {
  return std::max(noise_floor, duration_noise_init * std::pow(noise_decay, iteration));
}

double effective_sample_size(std::span<const double> weights) {
  double sum = 0.0;
  double sq = 0.0;
  for (const double w : weights) {
    sum += w;
    sq += w * w;
  }
  return sq > 0.0 ? sum * sum / sq : 0.0;
}

std::vector<double> compute_weights(std::span<const double> returns, double target_ess) {
  if (returns.size() < 2) {
    throw ContractViolation("compute_weights: need at least two returns");
  }
  if (!(target_ess > 0.0 && target_ess <= 1.0)) {
    throw ContractViolation("compute_weights: target_ess must lie in (0, 1]");
  }
  const auto [lo_it, hi_it] = std::minmax_element(returns.begin(), returns.end());
  const double max_return = *hi_it;
  const double range = max_return - *lo_it;
  const auto n = static_cast<double>(returns.size());
  if (!std::isfinite(range)) {
    throw ContractViolation("compute_weights: non-finite return");
  }
  if (range == 0.0) {
    return std::vector<double>(returns.size(), 1.0 / n);
  }

  const double target = target_ess * n;
  double log_lo = std::log(range) - 30.0;
  double log_hi = std::log(range) + 30.0;
  if (effective_sample_size(softmax_weights(returns, max_return, std::exp(log_lo))) >= target) {
    return softmax_weights(returns, max_return, std::exp(log_lo));
  }
  // Invariant: ESS(lo) < target <= ESS(hi). ESS grows with the temperature.
  for (int i = 0; i < 200 && log_hi - log_lo > 1e-12; ++i) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (effective_sample_size(softmax_weights(returns, max_return, std::exp(mid))) >= target) {
      log_hi = mid;
    } else {
      log_lo = mid;
    }
  }
  return softmax_weights(returns, max_return, std::exp(log_hi));
}

std::vector<TriggerSample> extract_trigger_samples(const ExtendedEpisode& episode, double weight) {
  std::vector<TriggerSample> out;
  for (const EpisodeStep& step : episode.steps) {
    if (step.gate) {
      out.push_back({step.state, step.action, step.duration, weight});
    }
  }
  return out;
}

PolicyPair improve_policies(std::span<const TriggerSample> samples, const LearnerConfig& config,
                            const PolicyPair& current, const ImproveContext& context) {
  std::vector<TriggerSample> kept;
  for (const TriggerSample& s : samples) {
    if (s.episode_weight < 0.0 || !std::isfinite(s.episode_weight)) {
      throw ContractViolation("improve_policies: sample weights must be finite and non-negative");
    }
    if (s.episode_weight > 0.0) {
      kept.push_back(s);
    }
  }
  if (kept.empty()) {
    throw ContractViolation("improve_policies: no sample with positive weight");
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  Points raw(n, 1);
  Vector weights(n);
  Vector actions(n);
  Vector durations(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TriggerSample& s = kept[static_cast<std::size_t>(i)];
    raw(i, 0) = s.state;
    weights[i] = s.episode_weight;
    actions[i] = s.action == Action::kScatter ? 1.0 : 0.0;
    durations[i] = s.duration;
  }
  const InputScaler scaler = InputScaler::fit(raw);
  const Points inputs = scaler.apply(raw);
  const auto it = static_cast<std::uint64_t>(context.iteration);
  const Points pseudo =
      select_pseudo_inputs(inputs, std::span<const double>(weights.data(), static_cast<std::size_t>(n)),
                           config.pseudo_inputs, derive_seed(config.seed, {kTagPseudo, it}));

  PolicyPair next = current;
  const WeightedDataset action_data{inputs, actions, weights};
  next.action = ActionPolicy{fit_policy_gp(action_data, pseudo, 0.5, context.action_noise_variance, config,
                                           derive_seed(config.seed, {kTagActionHyper, it})),
                             scaler, config.epsilon_clip};
  if (context.learn_duration) {
    const WeightedDataset duration_data{inputs, durations, weights};
    next.duration = DurationPolicy{fit_policy_gp(duration_data, pseudo, 0.0, context.duration_noise_variance,
                                                 config, derive_seed(config.seed, {kTagDurationHyper, it})),
                                   scaler, config.tau_max};
  }
  return next;
}

PolicyPair initial_policies(const LearnerConfig& config, std::optional<int> fixed_duration) {
  const double sf = config.action_noise_std(0);
  const double sg = config.duration_noise_std(0);
  ActionPolicy action = config.heuristic_initial_policy ? heuristic_action_policy(config)
                                                        : ActionPolicy::prior(1, sf * sf, config.epsilon_clip);
  if (fixed_duration) {
    return {std::move(action), FixedDuration{*fixed_duration}};
  }
  return {std::move(action), DurationPolicy::prior(1, sg * sg, config.tau_max)};
}

TrainingResult train_gpstps(const LearnerConfig& config, const EnvConfig& env, const EpisodeObserver& observer) {
  return train_loop(config, env, std::nullopt, observer);
}

TrainingResult train_gpps_fixed(const LearnerConfig& config, const EnvConfig& env, int fixed_duration,
                                const EpisodeObserver& observer) {
  if (fixed_duration < 1 || fixed_duration > kMaxActionDuration) {
    throw ContractViolation("train_gpps_fixed: fixed duration must lie in [1, 6]");
  }
  return train_loop(config, env, fixed_duration, observer);
}

double final_return(std::span<const LearningCurvePoint> curve, int window) {
  if (curve.empty()) {
    return 0.0;
  }
  const std::size_t take = std::min(curve.size(), static_cast<std::size_t>(std::max(window, 1)));
  double sum = 0.0;
  for (std::size_t i = curve.size() - take; i < curve.size(); ++i) {
    sum += curve[i].mean_return;
  }
  return sum / static_cast<double>(take);
}

}  // namespace gpstps
