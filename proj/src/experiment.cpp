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

#include "gpstps/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "gpstps/stats.hpp"

namespace gpstps {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument(text);
    }
    return v;
  } catch (const std::logic_error&) {
    throw ContractViolation("csv: cannot parse " + what + " '" + text + "'");
  }
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

std::string policy_file(int iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "policy_iter%03d.json", iteration);
  return buf;
}

// gpstps first, then fixed durations in ascending order.
bool method_order(const std::string& a, const std::string& b) {
  const auto key = [](const std::string& label) {
    try {
      const MethodSpec spec = MethodSpec::parse(label);
      return std::pair{spec.fixed_duration.value_or(0), label};
    } catch (const ContractViolation&) {
      return std::pair{1000, label};
    }
  };
  return key(a) < key(b);
}

}  // namespace

const MethodSummary& ComparisonReport::method(const std::string& label) const {
  for (const auto& m : methods) {
    if (m.method == label) {
      return m;
    }
  }
  throw ContractViolation("report has no method '" + label + "'");
}

ComparisonReport build_report(int setting, std::vector<MethodSummary> methods) {
  if (methods.empty()) {
    throw ContractViolation("build_report: no methods");
  }
  ComparisonReport report{setting, std::move(methods), {}, {}};
  double best = -std::numeric_limits<double>::infinity();
  for (MethodSummary& m : report.methods) {
    if (m.seeds.size() != m.finals.size() || m.finals.empty()) {
      throw ContractViolation("build_report: method " + m.method + " has mismatched seeds/finals");
    }
    m.final_mean = mean(m.finals);
    m.final_std = sample_std(m.finals);
    if (m.final_mean > best) {
      best = m.final_mean;
      report.best = m.method;
    }
  }
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    for (std::size_t k = i + 1; k < report.methods.size(); ++k) {
      const MethodSummary& a = report.methods[i];
      const MethodSummary& b = report.methods[k];
      std::vector<double> xa;
      std::vector<double> xb;
      for (std::size_t s = 0; s < a.seeds.size(); ++s) {
        const auto it = std::find(b.seeds.begin(), b.seeds.end(), a.seeds[s]);
        if (it != b.seeds.end()) {
          xa.push_back(a.finals[s]);
          xb.push_back(b.finals[static_cast<std::size_t>(it - b.seeds.begin())]);
        }
      }
      PairComparison pair{a.method, b.method, static_cast<int>(xa.size()), 0.0, 1.0};
      if (xa.size() >= 2) {
        const TTestResult r = paired_t_test(xa, xb);
        pair.t = r.t;
        pair.p = r.p;
      }
      report.pairs.push_back(pair);
    }
  }
  return report;
}

void to_json(nlohmann::json& j, const ComparisonReport& report) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : report.methods) {
    methods.push_back({{"method", m.method},
                       {"seeds", m.seeds},
                       {"finals", m.finals},
                       {"final_mean", m.final_mean},
                       {"final_std", m.final_std}});
  }
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    // Infinite t (degenerate differences) is not representable in JSON.
    const nlohmann::json t = std::isfinite(p.t) ? nlohmann::json(p.t) : nlohmann::json(p.t > 0 ? "inf" : "-inf");
    pairs.push_back({{"a", p.a}, {"b", p.b}, {"n", p.n}, {"t", t}, {"p", p.p}, {"significant", p.p < 0.05}});
  }
  j = {{"setting", report.setting},
       {"final_window", kFinalWindow},
       {"methods", std::move(methods)},
       {"comparisons", std::move(pairs)},
       {"best", report.best}};
}

void write_curve_csv(std::ostream& out, std::span<const LearningCurvePoint> curve) {
  out << "iteration,mean_return,std_return,mean_episode_seconds\n";
  for (const auto& p : curve) {
    out << p.iteration << ',' << num(p.mean_return) << ',' << num(p.std_return) << ','
        << num(p.mean_episode_seconds) << '\n';
  }
}

std::vector<LearningCurvePoint> read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "iteration,mean_return,std_return,mean_episode_seconds") {
    throw ContractViolation("curve.csv: unexpected header");
  }
  std::vector<LearningCurvePoint> curve;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw ContractViolation("curve.csv: expected 4 fields in '" + line + "'");
    }
    curve.push_back({static_cast<int>(parse_double(f[0], "iteration")), parse_double(f[1], "mean_return"),
                     parse_double(f[2], "std_return"), parse_double(f[3], "mean_episode_seconds")});
  }
  return curve;
}

void write_summary_csv(std::ostream& out, const ComparisonReport& report) {
  out << "method,num_seeds,final_mean,final_std\n";
  for (const auto& m : report.methods) {
    out << m.method << ',' << m.finals.size() << ',' << num(m.final_mean) << ',' << num(m.final_std) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "method,num_seeds,final_mean,final_std") {
    throw ContractViolation("summary.csv: unexpected header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw ContractViolation("summary.csv: expected 4 fields in '" + line + "'");
    }
    rows.push_back({f[0], static_cast<int>(parse_double(f[1], "num_seeds")), parse_double(f[2], "final_mean"),
                    parse_double(f[3], "final_std")});
  }
  return rows;
}

void write_episode_trace_header(std::ostream& out) {
  out << "iteration,episode,t,state,action,duration,gate,reward,elapsed_seconds\n";
}

void append_episode_trace(std::ostream& out, int iteration, int episode, const ExtendedEpisode& e) {
  int t = 1;
  for (const EpisodeStep& s : e.steps) {
    out << iteration << ',' << episode << ',' << t++ << ',' << num(s.state) << ',' << static_cast<int>(s.action)
        << ',' << s.duration << ',' << (s.gate ? 1 : 0) << ',' << num(s.reward) << ',' << num(s.elapsed_seconds)
        << '\n';
  }
}

fs::path run_directory(const fs::path& output_dir, const MethodSpec& method, std::uint64_t seed) {
  return output_dir / method.label() / ("seed_" + std::to_string(seed));
}

TrainingResult run_single(const ExperimentConfig& config, const MethodSpec& method, std::uint64_t seed,
                          const fs::path& dir) {
  fs::create_directories(dir);
  LearnerConfig learner = config.learner;
  learner.seed = seed;
  const EnvConfig env = config.env();

  std::ofstream trace;
  EpisodeObserver observer;
  if (config.trace) {
    trace = open_out(dir / "episodes.csv");
    write_episode_trace_header(trace);
    observer = [&trace](int iteration, std::span<const ExtendedEpisode> episodes) {
      for (std::size_t e = 0; e < episodes.size(); ++e) {
        append_episode_trace(trace, iteration, static_cast<int>(e), episodes[e]);
      }
    };
  }

  TrainingResult result = method.fixed_duration ? train_gpps_fixed(learner, env, *method.fixed_duration, observer)
                                                : train_gpstps(learner, env, observer);
  {
    auto out = open_out(dir / "curve.csv");
    write_curve_csv(out, result.curve);
  }
  for (const PolicySnapshot& snap : result.dumps) {
    auto out = open_out(dir / policy_file(snap.iteration));
    out << policy_dump(snap.policies.action, snap.policies.duration, snap.iteration).dump(2) << '\n';
  }
  return result;
}

int worker_count() {
  if (const char* env = std::getenv("GPSTPS_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
  return omp_get_max_threads();
}

ComparisonReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  fs::create_directories(config.output_dir);
  {
    auto out = open_out(config.output_dir / "config.ini");
    write_experiment_config(out, config);
  }

  struct Job {
    MethodSpec method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const MethodSpec& m : config.methods) {
    for (const std::uint64_t s : config.seeds) {
      jobs.push_back({m, s});
    }
  }
  std::vector<double> finals(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  const auto n_jobs = static_cast<long>(jobs.size());

#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (long i = 0; i < n_jobs; ++i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    try {
      const TrainingResult r = run_single(config, job.method, job.seed, run_directory(config.output_dir, job.method, job.seed));
      finals[static_cast<std::size_t>(i)] = final_return(r.curve, kFinalWindow);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        throw std::runtime_error("run " + jobs[i].method.label() + " seed " + std::to_string(jobs[i].seed) +
                                 " failed: " + e.what());
      }
    }
  }

  std::vector<MethodSummary> summaries;
  std::size_t k = 0;
  for (const MethodSpec& m : config.methods) {
    MethodSummary s{m.label(), {}, {}, 0.0, 0.0};
    for (const std::uint64_t seed : config.seeds) {
      s.seeds.push_back(seed);
      s.finals.push_back(finals[k++]);
    }
    summaries.push_back(std::move(s));
  }
  ComparisonReport report = build_report(config.setting, std::move(summaries));
  {
    auto out = open_out(config.output_dir / "summary.csv");
    write_summary_csv(out, report);
  }
  {
    auto out = open_out(config.output_dir / "report.json");
    out << nlohmann::json(report).dump(2) << '\n';
  }
  return report;
}

ComparisonReport compare_directory(const fs::path& output_dir) {
  if (!fs::is_directory(output_dir)) {
    throw ContractViolation("compare: not a directory: " + output_dir.string());
  }
  int setting = 0;
  if (fs::exists(output_dir / "config.ini")) {
    setting = load_experiment_config(output_dir / "config.ini").setting;
  }

  std::map<std::string, std::map<std::uint64_t, double>, decltype(&method_order)> runs(&method_order);
  for (const auto& method_dir : fs::directory_iterator(output_dir)) {
    if (!method_dir.is_directory()) {
      continue;
    }
    for (const auto& seed_dir : fs::directory_iterator(method_dir.path())) {
      const std::string name = seed_dir.path().filename().string();
      const fs::path curve_path = seed_dir.path() / "curve.csv";
      if (!seed_dir.is_directory() || !name.starts_with("seed_") || !fs::exists(curve_path)) {
        continue;
      }
      std::ifstream in(curve_path);
      const auto curve = read_curve_csv(in);
      std::uint64_t seed = 0;
      try {
        seed = std::stoull(name.substr(5));
      } catch (const std::logic_error&) {
        throw ContractViolation("compare: bad run directory name " + seed_dir.path().string());
      }
      runs[method_dir.path().filename().string()][seed] = final_return(curve, kFinalWindow);
    }
  }
  if (runs.empty()) {
    throw ContractViolation("compare: no curve.csv files under " + output_dir.string());
  }

  std::vector<MethodSummary> summaries;
  for (const auto& [label, by_seed] : runs) {
    MethodSummary s{label, {}, {}, 0.0, 0.0};
    for (const auto& [seed, final_value] : by_seed) {
      s.seeds.push_back(seed);
      s.finals.push_back(final_value);
    }
    summaries.push_back(std::move(s));
  }
  ComparisonReport report = build_report(setting, std::move(summaries));
  {
    auto out = open_out(output_dir / "summary.csv");
    write_summary_csv(out, report);
  }
  {
    auto out = open_out(output_dir / "report.json");
    out << nlohmann::json(report).dump(2) << '\n';
  }
  return report;
}

nlohmann::json dump_policy(const fs::path& run_dir, int iteration) {
  const fs::path path = run_dir / policy_file(iteration);
  std::ifstream in(path);
  if (!in) {
    throw ContractViolation("dump-policy: no dump at " + path.string());
  }
  nlohmann::json stored;
  try {
    in >> stored;
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation("dump-policy: malformed " + path.string() + ": " + e.what());
  }
  const PolicyPair policies = policies_from_dump(stored);
  return policy_dump(policies.action, policies.duration, stored.at("iteration").get<int>());
}

}  // namespace gpstps
