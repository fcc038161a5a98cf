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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "gpstps/experiment.hpp"
#include "gpstps/stats.hpp"

namespace fs = std::filesystem;
using namespace gpstps;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gpstps_unit_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c = parse("setting = 2\nmethods = gpstps, gpps_fixed(2)\nseeds = 3-4\niterations = 12\n"
                             "dump_every = 6\ntrace = true\n");
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("config parsing fills defaults and reads every form") {
  const ExperimentConfig c = parse("# comment\nsetting = 2\nmethods = gpstps, gpps_fixed(1), gpps_fixed_6\n"
                                   "seeds = 1-3, 7\niterations = 40\nalpha = 2.0\n");
  CHECK(c.setting == 2);
  REQUIRE(c.methods.size() == 3);
  CHECK(c.methods[0].label() == "gpstps");
  CHECK(c.methods[1].label() == "gpps_fixed_1");
  CHECK(c.methods[2] == MethodSpec{6});
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
  CHECK(c.learner.iterations == 40);
  CHECK(c.learner.episodes_per_iteration == 10);
  CHECK(c.reward.alpha == 2.0);
  CHECK(c.env().setting.index() == 2);

  const ExperimentConfig d = parse("");
  CHECK(d.methods.size() == 7);
  CHECK(d.seeds.size() == 10);
}

TEST_CASE("config errors name the offending field") {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ContractViolation& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("methods =\n").find("methods") != std::string::npos);
  CHECK(message("methods = gpps_fixed(9)\n").find("methods") != std::string::npos);
  CHECK(message("methods = nn\n").find("methods") != std::string::npos);
  CHECK(message("setting = 3\n").find("setting") != std::string::npos);
  CHECK(message("seeds = 5-2\n").find("seeds") != std::string::npos);
  CHECK(message("iterations = many\n").find("iterations") != std::string::npos);
  CHECK(message("tau_max = 9\n").find("tau_max") != std::string::npos);
  CHECK(message("colour = blue\n").find("colour") != std::string::npos);
}

TEST_CASE("written configs parse back to the same values") {
  ExperimentConfig c = parse("setting = 2\nmethods = gpps_fixed(4)\nseeds = 9\nnoise_decay = 0.95\n");
  std::ostringstream out;
  write_experiment_config(out, c);
  const ExperimentConfig back = parse(out.str());
  CHECK(back.methods == c.methods);
  CHECK(back.seeds == c.seeds);
  CHECK(back.learner.noise_decay == c.learner.noise_decay);
  CHECK(back.grasp_noise_std == c.grasp_noise_std);
  CHECK(back.output_dir == c.output_dir);
}

TEST_CASE("curve and summary CSVs round-trip") {
  const std::vector<LearningCurvePoint> curve{{1, -1.25, 0.5, 95.0}, {2, 0.1 + 0.2, 1.0 / 3.0, 80.0}};
  std::stringstream s;
  write_curve_csv(s, curve);
  CHECK(s.str().rfind("iteration,mean_return,std_return,mean_episode_seconds\n", 0) == 0);
  const auto back = read_curve_csv(s);
  REQUIRE(back.size() == 2);
  CHECK(back[1].mean_return == curve[1].mean_return);
  CHECK(back[1].std_return == curve[1].std_return);

  const ComparisonReport report = build_report(1, {{"gpstps", {1, 2}, {1.0, 2.0}}, {"gpps_fixed_1", {1, 2}, {0.5, 0.25}}});
  std::stringstream t;
  write_summary_csv(t, report);
  const auto rows = read_summary_csv(t);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "gpstps");
  CHECK(rows[0].num_seeds == 2);
  CHECK(rows[0].final_mean == 1.5);

  std::istringstream bad("iteration,mean\n1,2\n");
  CHECK_THROWS_AS(read_curve_csv(bad), ContractViolation);
  std::istringstream short_row("iteration,mean_return,std_return,mean_episode_seconds\n1,2\n");
  CHECK_THROWS_AS(read_curve_csv(short_row), ContractViolation);
}

TEST_CASE("report covers every pair with valid p-values") {
  const ComparisonReport r = build_report(2, {{"gpstps", {1, 2, 3}, {2.0, 2.5, 1.5}},
                                              {"gpps_fixed_1", {1, 2, 3}, {0.1, 0.3, 0.2}},
                                              {"gpps_fixed_2", {1, 2, 3}, {0.5, 0.2, 0.6}}});
  CHECK(r.pairs.size() == 3);
  CHECK(r.best == "gpstps");
  for (const auto& p : r.pairs) {
    CHECK(p.p >= 0.0);
    CHECK(p.p <= 1.0);
    CHECK(p.n == 3);
  }
  const nlohmann::json j = r;
  CHECK(j.at("comparisons").size() == 3);
  CHECK(j.at("best") == "gpstps");
  CHECK_THROWS_AS(r.method("missing"), ContractViolation);
}

TEST_CASE("run_experiment writes every artifact and reruns byte-identically") {
  const fs::path a = fresh_dir("run_a");
  const fs::path b = fresh_dir("run_b");
  const ComparisonReport ra = run_experiment(small_config(a));
  run_experiment(small_config(b));

  for (const std::string m : {"gpstps", "gpps_fixed_2"}) {
    for (const std::string s : {"seed_3", "seed_4"}) {
      for (const std::string f : {"curve.csv", "episodes.csv", "policy_iter000.json", "policy_iter006.json",
                                  "policy_iter012.json"}) {
        const fs::path rel = fs::path(m) / s / f;
        REQUIRE(fs::exists(a / rel));
        CHECK(slurp(a / rel) == slurp(b / rel));
      }
    }
  }
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(fs::exists(a / "config.ini"));

  // Summary means are the mean of the per-seed final returns read back from curve.csv.
  std::vector<double> finals;
  for (const std::string s : {"seed_3", "seed_4"}) {
    std::ifstream in(a / "gpstps" / s / "curve.csv");
    const auto curve = read_curve_csv(in);
    CHECK(curve.size() == 12);
    finals.push_back(final_return(curve, kFinalWindow));
  }
  std::ifstream sin(a / "summary.csv");
  const auto rows = read_summary_csv(sin);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "gpstps");
  CHECK(std::abs(rows[0].final_mean - mean(finals)) < 1e-12);
  CHECK(std::abs(ra.method("gpstps").final_mean - mean(finals)) < 1e-12);

  // compare rebuilds the same summary and report from the curves alone.
  const std::string summary = slurp(a / "summary.csv");
  const std::string report = slurp(a / "report.json");
  fs::remove(a / "summary.csv");
  fs::remove(a / "report.json");
  compare_directory(a);
  CHECK(slurp(a / "summary.csv") == summary);
  CHECK(slurp(a / "report.json") == report);

  // dump-policy re-evaluates the saved models and reproduces the stored grid.
  const nlohmann::json stored = nlohmann::json::parse(slurp(a / "gpstps" / "seed_3" / "policy_iter012.json"));
  const nlohmann::json redone = dump_policy(a / "gpstps" / "seed_3", 12);
  CHECK(redone.at("grid") == stored.at("grid"));
  CHECK_THROWS_AS(dump_policy(a / "gpstps" / "seed_3", 7), ContractViolation);
  CHECK_THROWS_AS(compare_directory(a / "nope"), ContractViolation);
}

TEST_CASE("run_experiment rejects invalid configs before running") {
  ExperimentConfig c = small_config(fresh_dir("bad"));
  c.methods.clear();
  CHECK_THROWS_AS(run_experiment(c), ContractViolation);
}

TEST_CASE("worker count follows GPSTPS_WORKERS") {
  ::setenv("GPSTPS_WORKERS", "3", 1);
  CHECK(worker_count() == 3);
  ::setenv("GPSTPS_WORKERS", "0", 1);
  CHECK(worker_count() >= 1);
  ::unsetenv("GPSTPS_WORKERS");
  CHECK(worker_count() >= 1);
}
