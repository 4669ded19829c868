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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dyngrasp/bench.hpp"
#include "dyngrasp/errors.hpp"

namespace dyngrasp {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dyngrasp_bench_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(RunConfigTest, EmptyObjectGivesDefaults) {
  const RunConfig c = parse_run_config("{}");
  EXPECT_EQ(c.representation, Representation::gaussian_points);
  EXPECT_EQ(c.encoder, nets::EncoderKind::ggn);
  EXPECT_EQ(c.seeds.size(), 5u);
  EXPECT_EQ(c.template_points, 16);
  EXPECT_EQ(c.agent.features.template_points, 16);
  EXPECT_EQ(c.env.template_points, 16);
  EXPECT_EQ(c.agent.hp.batch_size, 256);
}

TEST(RunConfigTest, NestedFieldsAndDerivedSizes) {
  const RunConfig c = parse_run_config(R"({
    "representation": "keypoints", "template_points": 7,
    "trajectory_modes": ["line", "circle"], "methods": ["heuristic", "random"],
    "env": {"max_grasps": 5, "workspace": {"min": [-1, -1, 0], "max": [1, 1, 2]}},
    "network": {"intra": [8, 16], "hidden": [32]},
    "sac": {"batch_size": 16, "tau": 0.01}})");
  EXPECT_EQ(c.representation, Representation::keypoints);
  EXPECT_EQ(c.trajectory_modes, (std::vector<TrajectoryMode>{TrajectoryMode::line, TrajectoryMode::circle}));
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::heuristic, Method::random}));
  EXPECT_EQ(c.agent.features.max_grasps, 5);
  EXPECT_EQ(c.agent.features.template_points, 7);
  EXPECT_EQ(c.agent.features.rep, Representation::keypoints);
  EXPECT_EQ(c.agent.encoder_widths.intra, (std::array<int, 2>{8, 16}));
  EXPECT_EQ(c.agent.hidden, (std::vector<int>{32}));
  EXPECT_DOUBLE_EQ(c.agent.hp.tau, 0.01);
  EXPECT_DOUBLE_EQ(c.env.workspace.max_corner.z(), 2.0);
}

TEST(RunConfigTest, NinedSetsInputWidth) {
  const RunConfig c = parse_run_config(R"({"representation": "ninety_d", "encoder": "ninety_d_encoder"})");
  EXPECT_EQ(c.agent.encoder_widths.input_dim, 9);
}

TEST(RunConfigTest, RejectsUnknownKeysAtAnyDepth) {
  EXPECT_THROW(parse_run_config(R"({"seed": 1})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"sac": {"gamma": 0.9}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"env": {"trajectory": {"sped_max": 1}}})"), ConfigError);
}

TEST(RunConfigTest, RejectsBadValues) {
  EXPECT_THROW(parse_run_config("not json"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"seeds": "zero"})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"methods": ["ppo"]})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"trajectory_modes": []})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"eval_episodes": 0})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"ablate_variants": ["full", "other"]})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"sac": {"tau": 0}})"), ConfigError);
}

TEST(RunConfigTest, RejectsIncompatibleRepresentationAndEncoder) {
  EXPECT_THROW(parse_run_config(R"({"representation": "ninety_d"})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"encoder": "ninety_d_encoder"})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"representation": "object_points_raw"})"), ConfigError);
  EXPECT_NO_THROW(parse_run_config(R"({"representation": "object_points_raw", "encoder": "pn_flat"})"));
}

TEST(RunConfigTest, ResolvedJsonRoundTripsAndHashIsStable) {
  const RunConfig a = parse_run_config(R"({"template_points": 9, "sac": {"batch_size": 32}})");
  const RunConfig b = parse_run_config(resolved_config_json(a));
  EXPECT_EQ(resolved_config_json(a), resolved_config_json(b));
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  const RunConfig c = parse_run_config(R"({"template_points": 10, "sac": {"batch_size": 32}})");
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(RunConfigTest, TrainConfigPerSeed) {
  const RunConfig c = parse_run_config(R"({"output_dir": "out", "trajectory_modes": ["line"]})");
  const TrainConfig t = c.train_config(3);
  EXPECT_EQ(t.seed, 3u);
  EXPECT_EQ(t.out_dir, "out/seed_3");
  EXPECT_EQ(t.env.trajectory.mode, TrajectoryMode::line);
}

TEST(ReportTest, SummaryStatistics) {
  ReportRow one;
  one.per_seed = {0.5};
  summarize(one);
  EXPECT_DOUBLE_EQ(one.success_mean, 0.5);
  EXPECT_FALSE(one.success_std.has_value());

  ReportRow three;
  three.per_seed = {0.2, 0.4, 0.6};
  summarize(three);
  EXPECT_NEAR(three.success_mean, 0.4, 1e-12);
  ASSERT_TRUE(three.success_std.has_value());
  EXPECT_NEAR(*three.success_std, 0.2, 1e-12);
}

TEST(ReportTest, RenderedForms) {
  BenchmarkReport r{"eval", "0123456789abcdef", {0, 1}, {}};
  ReportRow row;
  row.trajectory = "line";
  row.split = "seen";
  row.method = "heuristic";
  row.per_seed = {1.0, 0.5};
  row.episodes = 10;
  summarize(row);
  r.rows.push_back(row);

  const std::string records = render_records(r);
  EXPECT_EQ(std::count(records.begin(), records.end(), '\n'), 2);
  EXPECT_NE(records.find("\"config_hash\":\"0123456789abcdef\""), std::string::npos);
  EXPECT_NE(records.find("\"success_mean\":0.75"), std::string::npos);

  const std::string table = render_table(r);
  EXPECT_NE(table.find("0.750 +- 0.354"), std::string::npos);
}

TEST(EvalTest, HeuristicAndRandomBaselines) {
  const RunConfig c = parse_run_config(R"({"methods": ["heuristic", "random"], "seeds": [0], "eval_episodes": 10})");
  const BenchmarkReport r = run_eval(c, "");
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].method, "heuristic");
  EXPECT_GE(r.rows[0].success_mean, 0.9);
  EXPECT_LE(r.rows[1].success_mean, 0.2);
}

TEST(EvalTest, ReportFilesAreReproducible) {
  const auto dir = scratch("eval");
  const std::string text = R"({"methods": ["sac", "heuristic", "random"], "seeds": [0, 1], "eval_episodes": 3,
    "env": {"max_grasps": 4}, "template_points": 4,
    "network": {"intra": [4, 8], "inter": [8, 8], "hidden": [16]}, "output_dir": ")" +
                           dir.string() + "\"}";
  const RunConfig c = parse_run_config(text);
  std::ostringstream sink;
  ASSERT_EQ(cmd_eval(c, "", sink), kExitOk);
  const std::string first = read_file(dir / "eval_report.jsonl");
  ASSERT_EQ(cmd_eval(c, "", sink), kExitOk);
  EXPECT_EQ(first, read_file(dir / "eval_report.jsonl"));
  EXPECT_FALSE(first.empty());
  std::filesystem::remove_all(dir);
}

TEST(TrainCommandTest, WritesResolvedConfigAndCheckpoints) {
  const auto dir = scratch("train");
  const std::string text = R"({"seeds": [4], "env": {"max_grasps": 3}, "template_points": 3,
    "network": {"intra": [4, 4], "inter": [4, 4], "hidden": [8], "aux_hidden": 4},
    "sac": {"batch_size": 4, "total_steps": 60, "warmup_steps": 30, "update_every": 5}, "output_dir": ")" +
                           dir.string() + "\"}";
  const RunConfig c = parse_run_config(text);
  std::ostringstream sink;
  ASSERT_EQ(cmd_train(c, sink), kExitOk);
  EXPECT_TRUE(std::filesystem::exists(dir / "config.resolved.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "seed_4" / "checkpoint.bin"));
  EXPECT_TRUE(std::filesystem::exists(dir / "seed_4" / "metrics.jsonl"));
  EXPECT_EQ(config_hash(load_run_config((dir / "config.resolved.json").string())), config_hash(c));

  // The trained weights load back for evaluation.
  RunConfig e = c;
  e.methods = {Method::sac};
  e.eval_episodes = 2;
  EXPECT_NO_THROW(run_eval(e, (dir / "seed_{seed}" / "checkpoint.bin").string()));
  std::filesystem::remove_all(dir);
}

TEST(TraceCommandTest, OneRecordPerStep) {
  const auto dir = scratch("trace");
  const RunConfig c = parse_run_config(R"({"methods": ["heuristic"], "output_dir": ")" + dir.string() + "\"}");
  std::ostringstream sink;
  ASSERT_EQ(cmd_trace(c, "", 5, sink), kExitOk);
  std::ifstream f(dir / "trace_5.jsonl");
  std::string line, last;
  int lines = 0;
  while (std::getline(f, line)) {
    ++lines;
    last = line;
  }
  EXPECT_GT(lines, 0);
  EXPECT_NE(last.find("\"done\":true"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(SelfcheckCommandTest, Passes) {
  std::ostringstream out;
  EXPECT_EQ(cmd_selfcheck(out), kExitOk);
  EXPECT_NE(out.str().find("selfcheck passed"), std::string::npos);
}

}  // namespace
}  // namespace dyngrasp
