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

#include <malloc.h>

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dyngrasp/bench.hpp"
#include "dyngrasp/errors.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run config (defaults apply when omitted)");
  cmd->add_option("--seed", c.seed, "run a single seed instead of the configured list");
  cmd->add_option("--out", c.out, "output directory");
}

dyngrasp::RunConfig resolve(const Common& c) {
  dyngrasp::RunConfig cfg = c.config.empty() ? dyngrasp::parse_run_config("{}") : dyngrasp::load_run_config(c.config);
  if (c.seed) cfg.seeds = {*c.seed};
  if (!c.out.empty()) cfg.output_dir = c.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  // Large activation buffers are reused from the heap instead of fresh mmap pages.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);

  CLI::App app{"Dynamic grasping benchmark: train, evaluate, ablate, self-check and trace."};
  app.require_subcommand(1);

  Common train_opts, eval_opts, ablate_opts, trace_opts;
  std::string eval_checkpoint, trace_checkpoint;
  std::uint64_t episode_seed = 0;

  auto* train = app.add_subcommand("train", "train SAC agents, one per seed");
  add_common(train, train_opts);
  auto* eval = app.add_subcommand("eval", "evaluate methods over trajectories and splits");
  add_common(eval, eval_opts);
  eval->add_option("--checkpoint", eval_checkpoint, "agent checkpoint path; {seed} expands to the seed");
  auto* ablate = app.add_subcommand("ablate", "train and evaluate the representation and encoder variants");
  add_common(ablate, ablate_opts);
  auto* selfcheck = app.add_subcommand("selfcheck", "run the built-in numerical checks");
  auto* trace = app.add_subcommand("trace", "write a per-step JSONL trace of one episode");
  add_common(trace, trace_opts);
  trace->add_option("--checkpoint", trace_checkpoint, "agent checkpoint path; {seed} expands to the seed");
  trace->add_option("--episode-seed", episode_seed, "episode seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return dyngrasp::cmd_train(resolve(train_opts), std::cout);
    if (*eval) return dyngrasp::cmd_eval(resolve(eval_opts), eval_checkpoint, std::cout);
    if (*ablate) return dyngrasp::cmd_ablate(resolve(ablate_opts), std::cout);
    if (*selfcheck) return dyngrasp::cmd_selfcheck(std::cout);
    if (*trace) return dyngrasp::cmd_trace(resolve(trace_opts), trace_checkpoint, episode_seed, std::cout);
  } catch (const dyngrasp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return dyngrasp::kExitConfigError;
  } catch (const dyngrasp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dyngrasp::kExitCheckFailed;
  }
  return dyngrasp::kExitOk;
}
