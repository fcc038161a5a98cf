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

#ifndef GPSTPS_EXPERIMENT_HPP
#define GPSTPS_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gpstps/experiment_config.hpp"
#include "gpstps/learner.hpp"

namespace gpstps {

/// Iterations averaged into a run's final return.
inline constexpr int kFinalWindow = 10;

struct MethodSummary {
  std::string method;
  std::vector<std::uint64_t> seeds;
  std::vector<double> finals;
  double final_mean = 0.0;
  double final_std = 0.0;
};

struct PairComparison {
  std::string a;
  std::string b;
  int n = 0;
  double t = 0.0;
  double p = 1.0;
};

struct ComparisonReport {
  int setting = 0;
  std::vector<MethodSummary> methods;
  std::vector<PairComparison> pairs;
  std::string best;

  const MethodSummary& method(const std::string& label) const;
};

/// Summaries must list seeds in the same order as finals. Pairs are tested on common seeds.
ComparisonReport build_report(int setting, std::vector<MethodSummary> methods);

void to_json(nlohmann::json& j, const ComparisonReport& report);

// CSV files. Headers:
//   curve.csv    iteration,mean_return,std_return,mean_episode_seconds
//   summary.csv  method,num_seeds,final_mean,final_std
//   episodes.csv iteration,episode,t,state,action,duration,gate,reward,elapsed_seconds
void write_curve_csv(std::ostream& out, std::span<const LearningCurvePoint> curve);
std::vector<LearningCurvePoint> read_curve_csv(std::istream& in);

struct SummaryRow {
  std::string method;
  int num_seeds = 0;
  double final_mean = 0.0;
  double final_std = 0.0;
};

void write_summary_csv(std::ostream& out, const ComparisonReport& report);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

void write_episode_trace_header(std::ostream& out);
void append_episode_trace(std::ostream& out, int iteration, int episode, const ExtendedEpisode& e);

std::filesystem::path run_directory(const std::filesystem::path& output_dir, const MethodSpec& method,
                                    std::uint64_t seed);

/// Trains one (method, seed) pair and writes curve.csv, policy_iterNNN.json and, if tracing,
/// episodes.csv into `dir`.
TrainingResult run_single(const ExperimentConfig& config, const MethodSpec& method, std::uint64_t seed,
                          const std::filesystem::path& dir);

/// Fans all (method, seed) runs out over a worker pool, then writes config.ini, summary.csv
/// and report.json into the output directory. The first failing run aborts with its context.
ComparisonReport run_experiment(const ExperimentConfig& config);

/// Rebuilds summary.csv and report.json from the curve.csv files under `output_dir`.
ComparisonReport compare_directory(const std::filesystem::path& output_dir);

/// Reloads policy_iterNNN.json from a run directory and re-evaluates its grid.
nlohmann::json dump_policy(const std::filesystem::path& run_dir, int iteration);

/// GPSTPS_WORKERS if set and positive, otherwise the OpenMP default.
int worker_count();

}  // namespace gpstps

#endif  // GPSTPS_EXPERIMENT_HPP
