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

#include "gpstps/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>

#include <nlohmann/json.hpp>

namespace gpstps {

namespace {

SparseGPModel prior_model(Eigen::Index dims, double prior_mean, double noise_variance) {
  return SparseGPModel(Points::Zero(1, dims), KernelParams::isotropic(dims, 1.0, 1.0), prior_mean, noise_variance);
}

nlohmann::json scaler_json(const InputScaler& s) {
  return {{"shift", std::vector<double>(s.shift.begin(), s.shift.end())},
          {"scale", std::vector<double>(s.scale.begin(), s.scale.end())}};
}

InputScaler scaler_from_json(const nlohmann::json& j) {
  const auto shift = j.at("shift").get<std::vector<double>>();
  const auto scale = j.at("scale").get<std::vector<double>>();
  if (shift.size() != scale.size()) {
    throw ContractViolation("policy dump: scaler shift/scale lengths differ");
  }
  const auto n = static_cast<Eigen::Index>(shift.size());
  return {Eigen::Map<const Vector>(shift.data(), n), Eigen::Map<const Vector>(scale.data(), n)};
}

}  // namespace

InputScaler InputScaler::identity(Eigen::Index dims) { return {Vector::Zero(dims), Vector::Ones(dims)}; }

InputScaler InputScaler::fit(const Points& states) {
  if (states.rows() == 0) {
    throw ContractViolation("InputScaler::fit: no states");
  }
  const Eigen::Index dims = states.cols();
  InputScaler s{Vector(dims), Vector(dims)};
  for (Eigen::Index d = 0; d < dims; ++d) {
    const double mean = states.col(d).mean();
    const double var = (states.col(d).array() - mean).square().mean();
    s.shift[d] = mean;
    s.scale[d] = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Points InputScaler::apply(const Points& states) const {
  if (states.cols() != shift.size()) {
    throw ContractViolation("InputScaler: dimension mismatch");
  }
  Points out(states.rows(), states.cols());
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    out.row(i) = (states.row(i) - shift.transpose()).cwiseQuotient(scale.transpose());
  }
  return out;
}

Points InputScaler::apply(std::span<const double> state) const {
  Points row(1, static_cast<Eigen::Index>(state.size()));
  for (std::size_t d = 0; d < state.size(); ++d) {
    row(0, static_cast<Eigen::Index>(d)) = state[d];
  }
  return apply(row);
}

ActionPolicy ActionPolicy::prior(Eigen::Index dims, double noise_variance, double epsilon_clip) {
  return {prior_model(dims, 0.5, noise_variance), InputScaler::identity(dims), epsilon_clip};
}

double ActionPolicy::scatter_probability(std::span<const double> state) const {
  const Points x = scaler.apply(state);
  const double mean = predict(gp, row_span(x, 0)).mean;
  return std::clamp(mean, epsilon_clip, 1.0 - epsilon_clip);
}

DurationPolicy DurationPolicy::prior(Eigen::Index dims, double noise_variance, int tau_max) {
  return {prior_model(dims, 0.0, noise_variance), InputScaler::identity(dims), tau_max};
}

Prediction DurationPolicy::latent(std::span<const double> state) const {
  const Points x = scaler.apply(state);
  return predict(gp, row_span(x, 0));
}

double DurationPolicy::sampling_std(std::span<const double> state) const {
  return std::sqrt(latent(state).variance + gp.noise_variance());
}

Action sample_action(const ActionPolicy& policy, std::span<const double> state, Rng& rng) {
  const double p = policy.scatter_probability(state);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return u < p ? Action::kScatter : Action::kGrasp;
}

int sample_duration(const DurationPolicy& policy, std::span<const double> state, Rng& rng) {
  if (policy.tau_max < 1) {
    throw ContractViolation("DurationPolicy: tau_max must be at least 1");
  }
  const Prediction pred = policy.latent(state);
  const double sd = std::sqrt(pred.variance + policy.gp.noise_variance());
  const double draw = pred.mean + sd * std::normal_distribution<double>(0.0, 1.0)(rng);
  const double rounded = std::round(std::clamp(draw, -1e6, 1e6));
  return static_cast<int>(std::clamp(rounded, 1.0, static_cast<double>(policy.tau_max)));
}

GatingState gate_step(const GatingState& gate) {
  if (gate.remaining < 1) {
    throw ContractViolation("gate_step: remaining duration must be at least 1");
  }
  if (gate.remaining == 1) {
    return {gate.held_action, 1, true};
  }
  return {gate.held_action, gate.remaining - 1, false};
}

int ExtendedEpisode::trigger_count() const {
  return static_cast<int>(std::count_if(steps.begin(), steps.end(), [](const EpisodeStep& s) { return s.gate; }));
}

RolloutRng RolloutRng::from_seed(std::uint64_t seed) {
  return {Rng(derive_seed(seed, {1})), Rng(derive_seed(seed, {2})), Rng(derive_seed(seed, {3}))};
}

ExtendedEpisode rollout(const ActionPolicy& action_policy, const DurationRule& duration_rule, CraneEnv& env,
                        RolloutRng& rng, const RolloutLimits& limits) {
  if (limits.max_triggers < 1) {
    throw ContractViolation("rollout: max_triggers must be at least 1");
  }
  if (const auto* fixed = std::get_if<FixedDuration>(&duration_rule);
      fixed != nullptr && (fixed->steps < 1 || fixed->steps > kMaxActionDuration)) {
    throw ContractViolation("rollout: fixed duration outside [1, 6]");
  }

  ExtendedEpisode episode;
  GatingState gate = GatingState::episode_start();
  int triggers = 0;
  // Trigger-time context for the hold in progress.
  double hold_state = 0.0;
  double hold_elapsed = 0.0;
  int hold_length = 0;

  while (true) {
    EpisodeStep step;
    if (gate.triggered_this_step) {
      if (env.state().terminal || triggers >= limits.max_triggers) {
        episode.truncated = !env.state().terminal;
        break;
      }
      const double s = env.state().weight;
      const std::array<double, 1> x{s};
      const Action a = sample_action(action_policy, x, rng.action);
      const int tau = std::visit(
          [&](const auto& rule) -> int {
            if constexpr (std::is_same_v<std::decay_t<decltype(rule)>, FixedDuration>) {
              return rule.steps;
            } else {
              return sample_duration(rule, x, rng.duration);
            }
          },
          duration_rule);
      hold_state = s;
      hold_elapsed = env.state().elapsed_seconds;
      hold_length = tau;
      ++triggers;
      step.reward = env.act(a, tau, rng.env);
      gate = {a, tau, true};
    }
    const int into_hold = hold_length - gate.remaining;
    const bool scatter = gate.held_action == Action::kScatter;
    const double per_step = scatter ? kScatterSecondsPerStep : kGraspSecondsPerStep;
    step.state = scatter ? std::max(0.0, hold_state - into_hold) : hold_state;
    step.action = gate.held_action;
    step.duration = gate.remaining;
    step.gate = gate.triggered_this_step;
    step.elapsed_seconds = hold_elapsed + per_step * (into_hold + 1);
    episode.ret += step.reward;
    episode.steps.push_back(step);
    gate = gate_step(gate);
  }
  episode.elapsed_seconds = env.state().elapsed_seconds;
  return episode;
}

bool satisfies_gating_invariants(const ExtendedEpisode& episode) {
  if (episode.steps.empty()) {
    return true;
  }
  if (!episode.steps.front().gate) {
    return false;
  }
  double ret = 0.0;
  int expect_remaining = 0;
  Action held = Action::kGrasp;
  for (const EpisodeStep& step : episode.steps) {
    ret += step.reward;
    if (step.duration < 1) {
      return false;
    }
    if (expect_remaining > 0) {
      if (step.gate || step.action != held || step.duration != expect_remaining || step.reward != 0.0) {
        return false;
      }
    } else if (!step.gate) {
      return false;
    }
    held = step.action;
    expect_remaining = step.duration - 1;
  }
  return expect_remaining == 0 && ret == episode.ret;
}

nlohmann::json policy_dump(const ActionPolicy& action_policy, const DurationRule& duration_rule, int iteration) {
  nlohmann::json grid = nlohmann::json::array();
  for (int k = 0; k <= 80; ++k) {
    const double s = 0.1 * k;
    const std::array<double, 1> x{s};
    double mean = 0.0;
    double sd = 0.0;
    if (const auto* policy = std::get_if<DurationPolicy>(&duration_rule)) {
      const Prediction pred = policy->latent(x);
      mean = pred.mean;
      sd = std::sqrt(pred.variance + policy->gp.noise_variance());
    } else {
      mean = std::get<FixedDuration>(duration_rule).steps;
    }
    grid.push_back({{"state", s},
                    {"action_probability", action_policy.scatter_probability(x)},
                    {"duration_mean", mean},
                    {"duration_std", sd}});
  }

  nlohmann::json duration;
  if (const auto* policy = std::get_if<DurationPolicy>(&duration_rule)) {
    duration = {{"gp", policy->gp}, {"scaler", scaler_json(policy->scaler)}, {"tau_max", policy->tau_max}};
  } else {
    duration = {{"fixed", std::get<FixedDuration>(duration_rule).steps}};
  }
  return {{"iteration", iteration},
          {"action_policy",
           {{"gp", action_policy.gp},
            {"scaler", scaler_json(action_policy.scaler)},
            {"epsilon_clip", action_policy.epsilon_clip}}},
          {"duration_policy", std::move(duration)},
          {"grid", std::move(grid)}};
}

PolicyPair policies_from_dump(const nlohmann::json& dump) {
  const auto& a = dump.at("action_policy");
  ActionPolicy action{sparse_gp_from_json(a.at("gp")), scaler_from_json(a.at("scaler")),
                      a.at("epsilon_clip").get<double>()};
  const auto& d = dump.at("duration_policy");
  if (d.contains("fixed")) {
    return {std::move(action), FixedDuration{d.at("fixed").get<int>()}};
  }
  DurationPolicy duration{sparse_gp_from_json(d.at("gp")), scaler_from_json(d.at("scaler")),
                          d.at("tau_max").get<int>()};
  return {std::move(action), std::move(duration)};
}

}  // namespace gpstps
