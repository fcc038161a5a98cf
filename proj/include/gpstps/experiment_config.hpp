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

#ifndef GPSTPS_EXPERIMENT_CONFIG_HPP
#define GPSTPS_EXPERIMENT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpstps/learner.hpp"

namespace gpstps {

struct MethodSpec {
  /// Empty for GPSTPS, otherwise the held duration of the GPPS baseline.
  std::optional<int> fixed_duration;

  /// "gpstps" or "gpps_fixed_<k>"; also the run directory name.
  std::string label() const;
  /// Accepts "gpstps", "gpps_fixed(k)" and "gpps_fixed_k".
  static MethodSpec parse(const std::string& text);

  bool operator==(const MethodSpec&) const = default;
};

struct ExperimentConfig {
  int setting = 1;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  LearnerConfig learner;
  RewardParams reward;
  double grasp_noise_std = 0.7;
  std::filesystem::path output_dir = "runs";
  bool trace = false;

  /// Throws ContractViolation naming the offending field.
  void validate() const;

  EnvConfig env() const;
};

/// Flat `key = value` document; `#` and `;` start comments. Unknown keys are rejected.
/// Every key is optional and defaults to the values in ExperimentConfig/LearnerConfig.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Writes every key explicitly, in a form parse_experiment_config reads back.
void write_experiment_config(std::ostream& out, const ExperimentConfig& config);

}  // namespace gpstps

#endif  // GPSTPS_EXPERIMENT_CONFIG_HPP
