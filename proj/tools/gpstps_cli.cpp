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
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gpstps/experiment.hpp"

namespace {

void print_report(const gpstps::ComparisonReport& report) {
  std::cout << "method               seeds  final_mean     final_std\n";
  for (const auto& m : report.methods) {
    std::printf("%-20s %5zu  %11.5f  %11.5f\n", m.method.c_str(), m.finals.size(), m.final_mean, m.final_std);
  }
  for (const auto& p : report.pairs) {
    std::printf("%s vs %s: t = %.4g, p = %.4g%s\n", p.a.c_str(), p.b.c_str(), p.t, p.p, p.p < 0.05 ? " *" : "");
  }
  std::cout << "best: " << report.best << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-triggered GP policy search on the garbage grasp/scatter task"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed_offset = 0;
  bool trace = false;
  auto* run = app.add_subcommand("run", "Train every (method, seed) pair in a config file");
  run->add_option("--config", config_path, "Flat key = value experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--seed-offset", seed_offset, "Added to every configured seed");
  run->add_flag("--trace", trace, "Write per-step episodes.csv for every run");

  std::string compare_dir;
  auto* compare = app.add_subcommand("compare", "Rebuild summary.csv and report.json from run outputs");
  compare->add_option("--dir", compare_dir, "Experiment output directory")->required()->check(CLI::ExistingDirectory);

  std::string run_dir;
  int iteration = 0;
  std::string out_path;
  auto* dump = app.add_subcommand("dump-policy", "Reload a saved policy and print its evaluation grid");
  dump->add_option("--run", run_dir, "Run directory (<output_dir>/<method>/seed_<n>)")
      ->required()
      ->check(CLI::ExistingDirectory);
  dump->add_option("--iter", iteration, "Iteration of the saved dump")->required();
  dump->add_option("--out", out_path, "Write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      gpstps::ExperimentConfig config = gpstps::load_experiment_config(config_path);
      for (auto& s : config.seeds) {
        s = static_cast<std::uint64_t>(static_cast<std::int64_t>(s) + seed_offset);
      }
      config.trace = config.trace || trace;
      print_report(gpstps::run_experiment(config));
    } else if (*compare) {
      print_report(gpstps::compare_directory(compare_dir));
    } else if (*dump) {
      const std::string text = gpstps::dump_policy(run_dir, iteration).dump(2);
      if (out_path.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream(out_path) << text << '\n';
      }
    }
  } catch (const gpstps::ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
