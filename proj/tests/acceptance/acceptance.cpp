// Copyright 2026 The dyngrasp Authors.
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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Training criteria run at desk scale from the configs directory.

#include <malloc.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dyngrasp/bench.hpp"
#include "dyngrasp/check/gradcheck.hpp"
#include "dyngrasp/check/selfcheck.hpp"

namespace {

using namespace dyngrasp;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kSelfcheckSeconds = 60.0;
constexpr double kGradientSeconds = 300.0;
constexpr double kMaxRelativeGradError = 1e-4;
constexpr int kGradientDraws = 100;
constexpr int kInvarianceInputs = 1000;
constexpr int kTrackingSeeds = 20;
constexpr double kHeuristicMinSuccess = 0.9;
constexpr int kEvalEpisodes = 100;
constexpr int kMovingWindow = 50;
constexpr double kMinGainOverRandom = 0.40;
constexpr int kSeedsRequired = 2;

struct Outcome {
  bool passed;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, static_cast<double>(args)...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome selfcheck_suite() {
  const auto t0 = Clock::now();
  const auto results = testing::run_selfcheck(0);
  const double secs = seconds_since(t0);
  int passed = 0;
  std::string failed;
  for (const auto& r : results) {
    if (r.passed) {
      ++passed;
    } else {
      failed += " " + r.name;
    }
  }
  const bool ok = passed == static_cast<int>(results.size()) && secs < kSelfcheckSeconds;
  return {ok, fmt("%.0f/%.0f checks passed in %.1f s (limit %.0f s)", passed, static_cast<double>(results.size()),
                  secs, kSelfcheckSeconds) +
                  (failed.empty() ? "" : ", failed:" + failed)};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int min_draws = kGradientDraws;
  std::uint64_t seed = 1;
  for (const auto& [name, probe] : testing::all_probes()) {
    const auto r = testing::run_gradcheck(probe, kGradientDraws, seed++);
    worst = std::max(worst, r.max_relative_error);
    min_draws = std::min(min_draws, r.draws);
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < kMaxRelativeGradError && min_draws >= kGradientDraws && secs < kGradientSeconds;
  return {ok, fmt("max relative error %.2e (limit %.0e), %.0f draws per block, %.1f s", worst, kMaxRelativeGradError,
                  min_draws, secs)};
}

Outcome from_check(const testing::CheckResult& r) { return {r.passed, r.detail}; }

Outcome loss_schedule() {
  const double d = SacHyperparams{}.discount;
  const long horizon = SacHyperparams{}.aux_horizon;
  const double w0 = aux_weight(0, d, horizon);
  const double w1 = aux_weight(20000, d, horizon);
  bool decreasing = true;
  double prev = w0;
  for (long t = 1; t <= 2'000'000; ++t) {
    const double w = aux_weight(t, d, horizon);
    if (!(w < prev)) decreasing = false;
    prev = w;
  }
  const bool ok = w0 == 1.0 && w1 == 0.98 && decreasing;
  return {ok, fmt("w(0) = %.17g, w(20000) = %.17g, strictly decreasing on [0, 2e6]: ", w0, w1) +
                  (decreasing ? "yes" : "no")};
}

Outcome heuristic_baseline() {
  EnvConfig env;
  env.trajectory.mode = TrajectoryMode::rotation;
  env.trajectory.omega_min_deg = 0.0;
  env.trajectory.omega_max_deg = 0.0;
  env.split = ObjectSplit::seen;
  HeuristicPolicy policy(env);
  const EvalResult r = evaluate_policy(env, policy, kEvalEpisodes, 0);
  return {r.success_rate() >= kHeuristicMinSuccess,
          fmt("success %.2f over %.0f episodes (need >= %.2f)", r.success_rate(), r.episodes, kHeuristicMinSuccess)};
}

double window_mean(const std::vector<double>& v, std::size_t begin) {
  double s = 0.0;
  for (std::size_t i = begin; i < begin + kMovingWindow; ++i) s += v[i];
  return s / kMovingWindow;
}

struct SmokeSeed {
  std::uint64_t seed;
  double start_avg, end_avg, sac, random;
};

std::vector<SmokeSeed> smoke_runs;

void run_smoke(const RunConfig& cfg, std::ostream& log) {
  for (std::uint64_t seed : cfg.seeds) {
    const auto t0 = Clock::now();
    const TrainConfig tc = cfg.train_config(seed);
    SacAgent<float> agent(tc.agent, seed);
    std::vector<double> returns;
    train(tc, agent, [&](const EpisodeRecord& e) { returns.push_back(e.episode_return); });
    SmokeSeed s{seed, 0.0, 0.0, 0.0, 0.0};
    if (returns.size() >= 2 * kMovingWindow) {
      s.start_avg = window_mean(returns, 0);
      s.end_avg = window_mean(returns, returns.size() - kMovingWindow);
    }
    MacroSwitchPolicy sac(std::make_unique<AgentPolicy>(agent), tc.env);
    MacroSwitchPolicy random(std::make_unique<RandomPolicy>(), tc.env);
    s.sac = evaluate_policy(tc.env, sac, kEvalEpisodes, seed).success_rate();
    s.random = evaluate_policy(tc.env, random, kEvalEpisodes, seed).success_rate();
    log << fmt("  seed %.0f: moving average %.2f -> %.2f, success sac %.2f random %.2f", static_cast<double>(seed),
               s.start_avg, s.end_avg, s.sac, s.random)
        << fmt(" (%.0f episodes, %.0f s)", static_cast<double>(returns.size()), seconds_since(t0)) << std::endl;
    smoke_runs.push_back(s);
  }
}

Outcome smoke_return(const RunConfig& cfg, std::ostream& log) {
  if (smoke_runs.empty()) run_smoke(cfg, log);
  int good = 0;
  for (const auto& s : smoke_runs) good += s.end_avg > s.start_avg ? 1 : 0;
  return {good >= kSeedsRequired, fmt("end > start for %.0f of %.0f seeds (need %.0f)", good,
                                      static_cast<double>(smoke_runs.size()), kSeedsRequired)};
}

Outcome smoke_success(const RunConfig& cfg, std::ostream& log) {
  if (smoke_runs.empty()) run_smoke(cfg, log);
  int good = 0;
  for (const auto& s : smoke_runs) good += s.sac - s.random >= kMinGainOverRandom ? 1 : 0;
  return {good >= kSeedsRequired, fmt("success - random >= %.2f for %.0f of %.0f seeds (need %.0f)",
                                      kMinGainOverRandom, good, static_cast<double>(smoke_runs.size()),
                                      kSeedsRequired)};
}

Outcome line_ordering(const RunConfig& cfg, std::ostream& log) {
  const BenchmarkReport r = run_ablation(cfg, log);
  const ReportRow* full = nullptr;
  const ReportRow* pn = nullptr;
  for (const auto& row : r.rows) {
    if (row.method == "full") full = &row;
    if (row.method == "ggn_to_pn") pn = &row;
  }
  if (!full || !pn) return {false, "ablation report lacks the full or ggn_to_pn row"};
  const double sf = full->success_std.value_or(0.0);
  const double sp = pn->success_std.value_or(0.0);
  const double pooled = std::sqrt(0.5 * (sf * sf + sp * sp));
  const double gap = full->success_mean - pn->success_mean;
  const char* note = gap >= 0.0 ? "ordered" : (-gap <= pooled ? "reversed within 1 pooled std, informational"
                                                               : "reversed by more than 1 pooled std");
  return {-gap <= pooled, fmt("full %.3f +- %.3f, ggn_to_pn %.3f +- %.3f", full->success_mean, sf, pn->success_mean, sp) +
                              fmt(", pooled std %.3f: ", pooled) + note};
}

Outcome eval_determinism(RunConfig cfg, const std::filesystem::path& work) {
  cfg.output_dir = (work / "determinism_a").string();
  std::ostringstream sink;
  if (cmd_eval(cfg, "", sink) != kExitOk) return {false, "first cmd_eval failed"};
  const std::string first = read_file(work / "determinism_a" / "eval_report.jsonl");
  const std::string first_table = read_file(work / "determinism_a" / "eval_report.txt");
  if (cmd_eval(cfg, "", sink) != kExitOk) return {false, "second cmd_eval failed"};
  const std::string second = read_file(work / "determinism_a" / "eval_report.jsonl");
  const std::string second_table = read_file(work / "determinism_a" / "eval_report.txt");
  const bool ok = !first.empty() && first == second && first_table == second_table;
  return {ok, fmt("%.0f report bytes, ", static_cast<double>(first.size() + first_table.size())) +
                  (ok ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);

  CLI::App app{"Acceptance gate"};
  std::string config_dir = DYNGRASP_CONFIG_DIR;
  std::string work_dir = "acceptance_runs";
  std::vector<std::string> only;
  std::string report_path;
  app.add_option("--configs", config_dir, "directory holding the training configs");
  app.add_option("--work", work_dir, "directory for training output");
  app.add_option("--only", only, "run only the named criteria");
  app.add_option("--report", report_path, "also write the PASS/FAIL lines to this file");
  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path work = std::filesystem::absolute(work_dir);
  std::filesystem::create_directories(work);

  const auto load = [&](const char* name, const char* out) {
    RunConfig c = load_run_config((std::filesystem::path(config_dir) / name).string());
    c.output_dir = (work / out).string();
    return c;
  };
  const RunConfig smoke = load("smoke_rotation.json", "smoke_rotation");
  const RunConfig line = load("line_ordering.json", "line_ordering");
  const RunConfig determinism = load("determinism.json", "determinism");

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"selfcheck", selfcheck_suite},
      {"gradients", gradient_checks},
      {"ggn_invariance", [] { return from_check(testing::check_ggn_invariance(0, kInvarianceInputs)); }},
      {"explorer_tracking", [] { return from_check(testing::check_explorer_tracking(0, kTrackingSeeds)); }},
      {"loss_schedule", loss_schedule},
      {"heuristic_baseline", heuristic_baseline},
      {"determinism", [&] { return eval_determinism(determinism, work); }},
      {"smoke_return_trend", [&] { return smoke_return(smoke, std::cout); }},
      {"smoke_success_gain", [&] { return smoke_success(smoke, std::cout); }},
      {"line_ordering", [&] { return line_ordering(line, std::cout); }},
  };

  const std::set<std::string> selected(only.begin(), only.end());
  std::ofstream report;
  if (!report_path.empty()) report.open(report_path);
  const auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    if (report.is_open()) report << line << std::endl;
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.name)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    char head[64];
    std::snprintf(head, sizeof head, "%s  %-20s ", o.passed ? "PASS" : "FAIL", c.name);
    emit(head + o.detail + fmt("  [%.1f s]", seconds_since(t0)));
    failures += o.passed ? 0 : 1;
  }
  emit(std::string(failures ? "ACCEPTANCE FAILED: " : "ACCEPTANCE PASSED: ") + std::to_string(failures) +
       " criteria failed");
  return failures ? 1 : 0;
}
