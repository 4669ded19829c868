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

#pragma once

// Run configuration, benchmark reports and the subcommands behind the
// `dyngrasp` executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dyngrasp/env.hpp"
#include "dyngrasp/eval.hpp"
#include "dyngrasp/featurize.hpp"
#include "dyngrasp/sac.hpp"
#include "dyngrasp/train.hpp"

namespace dyngrasp {

enum class Method { sac, heuristic, random };
std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

/// Everything a run needs. Parsed from JSON; every key is optional, unknown
/// keys are a ConfigError.
struct RunConfig {
  Representation representation = Representation::gaussian_points;
  nets::EncoderKind encoder = nets::EncoderKind::ggn;
  std::vector<TrajectoryMode> trajectory_modes{TrajectoryMode::rotation};
  std::vector<ObjectSplit> splits{ObjectSplit::seen};
  std::vector<Method> methods{Method::sac};
  /// Points per grasp in the Gaussian template (L).
  Index template_points = 16;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::string output_dir = "runs/default";
  int eval_episodes = 100;
  bool macro_switch = true;
  long checkpoint_every = 0;
  std::vector<Index> ablate_template_points{16, 32, 64};
  /// Subset of {"full", "gp_to_kp", "ggn_to_pn"}, run in that order.
  std::vector<std::string> ablate_variants{"full", "gp_to_kp", "ggn_to_pn"};
  EnvConfig env;
  AgentConfig agent;

  /// Checks cross-field constraints, including representation/encoder compatibility.
  void validate() const;
  /// Environment for one evaluation cell.
  EnvConfig env_for(TrajectoryMode mode, ObjectSplit split) const;
  /// Training setup for one seed: first trajectory mode and split, output in
  /// output_dir/seed_<seed>.
  TrainConfig train_config(std::uint64_t seed) const;
};

/// Throws ConfigError on malformed JSON, wrong types, unknown keys or invalid values.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
/// Every field with its resolved value, as pretty-printed JSON.
std::string resolved_config_json(const RunConfig& cfg);
/// FNV-1a 64 of the compact resolved JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

struct ReportRow {
  std::string trajectory, split, method;
  /// Template size for ablation rows; 0 elsewhere.
  Index template_points = 0;
  std::vector<double> per_seed;
  double success_mean = 0.0;
  /// Sample standard deviation over seeds; absent with fewer than two seeds.
  std::optional<double> success_std;
  int episodes = 0;  ///< per seed
  double mean_steps_to_success = 0.0;
};

struct BenchmarkReport {
  std::string kind;  ///< "eval" or "ablate"
  std::string config_hash;
  std::vector<std::uint64_t> seeds;
  std::vector<ReportRow> rows;
};

/// Fills mean and std from per_seed.
void summarize(ReportRow& row);
/// One JSON object per line: a header record, then one record per row.
std::string render_records(const BenchmarkReport& report);
/// Fixed-width text table, "mean +- std" cells.
std::string render_table(const BenchmarkReport& report);

/// Evaluation over trajectory_modes x splits x methods for every seed. SAC
/// weights come from `checkpoint` with "{seed}" replaced by the seed; an
/// empty pattern evaluates freshly initialised networks.
BenchmarkReport run_eval(const RunConfig& cfg, const std::string& checkpoint);

/// ablate_variants x ablate_template_points, each trained and
/// evaluated per seed on the first trajectory mode and split.
BenchmarkReport run_ablation(const RunConfig& cfg, std::ostream& log);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, const std::string& checkpoint, std::ostream& out);
int cmd_ablate(const RunConfig& cfg, std::ostream& out);
int cmd_selfcheck(std::ostream& out);
/// Writes output_dir/trace_<seed>.jsonl for one episode of the first method.
int cmd_trace(const RunConfig& cfg, const std::string& checkpoint, std::uint64_t episode_seed, std::ostream& out);

}  // namespace dyngrasp
