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

#include "gpstps/experiment_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace gpstps {

namespace {

namespace pt = boost::property_tree;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "setting",          "methods",           "seeds",          "output_dir",
      "trace",            "grasp_noise_std",   "alpha",          "beta",
      "u_min",            "episodes_per_iteration", "iterations", "pseudo_inputs",
      "tau_max",          "replay_window",     "target_ess",     "epsilon_clip",
      "action_noise_init", "duration_noise_init", "noise_decay",  "noise_floor",
      "max_triggers",     "hyper_budget",      "hyper_restarts", "dump_every",
      "heuristic_initial_policy"};
  return keys;
}

template <typename T>
void read(const pt::ptree& tree, const std::string& key, T& out) {
  const auto node = tree.get_child_optional(key);
  if (!node) {
    return;
  }
  const auto value = node->get_value_optional<T>();
  if (!value) {
    throw ContractViolation("config field '" + key + "': cannot parse '" + node->data() + "'");
  }
  out = *value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(",; \t"), boost::token_compress_on);
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](const std::string& s) { return s.empty(); }),
              parts.end());
  return parts;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string& part : split_list(text)) {
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(part));
        continue;
      }
      const auto first = std::stoull(part.substr(0, dash));
      const auto last = std::stoull(part.substr(dash + 1));
      if (last < first) {
        throw ContractViolation("config field 'seeds': empty range '" + part + "'");
      }
      for (auto s = first; s <= last; ++s) {
        seeds.push_back(s);
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ContractViolation*>(&e) != nullptr) {
        throw;
      }
      throw ContractViolation("config field 'seeds': cannot parse '" + part + "'");
    }
  }
  return seeds;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string MethodSpec::label() const {
  return fixed_duration ? "gpps_fixed_" + std::to_string(*fixed_duration) : "gpstps";
}

MethodSpec MethodSpec::parse(const std::string& text) {
  const std::string t = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
  if (t == "gpstps") {
    return {};
  }
  std::string digits;
  if (t.starts_with("gpps_fixed(") && t.ends_with(")")) {
    digits = t.substr(11, t.size() - 12);
  } else if (t.starts_with("gpps_fixed_")) {
    digits = t.substr(11);
  } else {
    throw ContractViolation("config field 'methods': unknown method '" + text + "'");
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ContractViolation("config field 'methods': bad fixed duration in '" + text + "'");
  }
  const int k = std::stoi(digits);
  if (k < 1 || k > kMaxActionDuration) {
    throw ContractViolation("config field 'methods': fixed duration " + digits + " outside [1, 6]");
  }
  return {k};
}

void ExperimentConfig::validate() const {
  if (setting != 1 && setting != 2) {
    throw ContractViolation("config field 'setting': must be 1 or 2");
  }
  if (methods.empty()) {
    throw ContractViolation("config field 'methods': at least one method is required");
  }
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t k = i + 1; k < methods.size(); ++k) {
      if (methods[i] == methods[k]) {
        throw ContractViolation("config field 'methods': duplicate method " + methods[i].label());
      }
    }
  }
  if (seeds.empty()) {
    throw ContractViolation("config field 'seeds': at least one seed is required");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ContractViolation("config field 'seeds': duplicate seed");
  }
  if (!(grasp_noise_std >= 0.0)) {
    throw ContractViolation("config field 'grasp_noise_std': must be non-negative");
  }
  if (!(reward.alpha >= 0.0)) throw ContractViolation("config field 'alpha': must be non-negative");
  if (!(reward.beta >= 0.0)) throw ContractViolation("config field 'beta': must be non-negative");
  if (!(reward.u_min > 0.0)) throw ContractViolation("config field 'u_min': must be positive");
  if (output_dir.empty()) {
    throw ContractViolation("config field 'output_dir': must not be empty");
  }
  learner.validate();
}

EnvConfig ExperimentConfig::env() const { return {GarbageSetting::from_index(setting, grasp_noise_std), reward}; }

ExperimentConfig parse_experiment_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ContractViolation(std::string("config: ") + e.what());
  }
  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      throw ContractViolation("config: sections are not supported ('" + key + "')");
    }
    if (known_keys().count(key) == 0) {
      throw ContractViolation("config: unknown field '" + key + "'");
    }
  }

  ExperimentConfig c;
  c.methods = {MethodSpec{}};
  for (int k = 1; k <= kMaxActionDuration; ++k) {
    c.methods.push_back({k});
  }
  c.seeds = parse_seeds("1-10");

  read(tree, "setting", c.setting);
  if (const auto methods = tree.get_optional<std::string>("methods")) {
    c.methods.clear();
    for (const std::string& m : split_list(*methods)) {
      c.methods.push_back(MethodSpec::parse(m));
    }
  }
  if (const auto seeds = tree.get_optional<std::string>("seeds")) {
    c.seeds = parse_seeds(*seeds);
  }
  std::string out = c.output_dir.string();
  read(tree, "output_dir", out);
  c.output_dir = out;
  read(tree, "trace", c.trace);
  read(tree, "grasp_noise_std", c.grasp_noise_std);
  read(tree, "alpha", c.reward.alpha);
  read(tree, "beta", c.reward.beta);
  read(tree, "u_min", c.reward.u_min);

  LearnerConfig& l = c.learner;
  read(tree, "episodes_per_iteration", l.episodes_per_iteration);
  read(tree, "iterations", l.iterations);
  read(tree, "pseudo_inputs", l.pseudo_inputs);
  read(tree, "tau_max", l.tau_max);
  read(tree, "replay_window", l.replay_window);
  read(tree, "target_ess", l.target_ess);
  read(tree, "epsilon_clip", l.epsilon_clip);
  read(tree, "action_noise_init", l.action_noise_init);
  read(tree, "duration_noise_init", l.duration_noise_init);
  read(tree, "noise_decay", l.noise_decay);
  read(tree, "noise_floor", l.noise_floor);
  read(tree, "max_triggers", l.max_triggers);
  read(tree, "hyper_budget", l.hyper_budget);
  read(tree, "hyper_restarts", l.hyper_restarts);
  read(tree, "dump_every", l.dump_every);
  read(tree, "heuristic_initial_policy", l.heuristic_initial_policy);

  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ContractViolation("config: cannot open " + path.string());
  }
  return parse_experiment_config(in);
}

void write_experiment_config(std::ostream& out, const ExperimentConfig& c) {
  std::string methods;
  for (const MethodSpec& m : c.methods) {
    methods += (methods.empty() ? "" : ", ") + m.label();
  }
  std::string seeds;
  for (const std::uint64_t s : c.seeds) {
    seeds += (seeds.empty() ? "" : ", ") + std::to_string(s);
  }
  const LearnerConfig& l = c.learner;
  out << "# experiment\n"
      << "setting = " << c.setting << "\n"
      << "methods = " << methods << "\n"
      << "seeds = " << seeds << "\n"
      << "output_dir = " << c.output_dir.string() << "\n"
      << "trace = " << (c.trace ? "true" : "false") << "\n"
      << "# environment and reward\n"
      << "grasp_noise_std = " << format_double(c.grasp_noise_std) << "\n"
      << "alpha = " << format_double(c.reward.alpha) << "\n"
      << "beta = " << format_double(c.reward.beta) << "\n"
      << "u_min = " << format_double(c.reward.u_min) << "\n"
      << "# learner\n"
      << "episodes_per_iteration = " << l.episodes_per_iteration << "\n"
      << "iterations = " << l.iterations << "\n"
      << "pseudo_inputs = " << l.pseudo_inputs << "\n"
      << "tau_max = " << l.tau_max << "\n"
      << "replay_window = " << l.replay_window << "\n"
      << "target_ess = " << format_double(l.target_ess) << "\n"
      << "epsilon_clip = " << format_double(l.epsilon_clip) << "\n"
      << "action_noise_init = " << format_double(l.action_noise_init) << "\n"
      << "duration_noise_init = " << format_double(l.duration_noise_init) << "\n"
      << "noise_decay = " << format_double(l.noise_decay) << "\n"
      << "noise_floor = " << format_double(l.noise_floor) << "\n"
      << "max_triggers = " << l.max_triggers << "\n"
      << "hyper_budget = " << l.hyper_budget << "\n"
      << "hyper_restarts = " << l.hyper_restarts << "\n"
      << "dump_every = " << l.dump_every << "\n"
      << "heuristic_initial_policy = " << (l.heuristic_initial_policy ? "true" : "false") << "\n";
}

}  // namespace gpstps
