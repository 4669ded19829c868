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

// Training loop: rollouts interleaved with SAC updates.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dyngrasp/env.hpp"
#include "dyngrasp/sac.hpp"

namespace dyngrasp {

struct TrainConfig {
  EnvConfig env;
  AgentConfig agent;
  std::uint64_t seed = 0;
  /// Directory for metrics.jsonl and checkpoint.bin; empty writes nothing.
  std::string out_dir;
  /// Environment steps between checkpoints; 0 writes one at the end only.
  long checkpoint_every = 0;
};

struct EpisodeRecord {
  long episode = 0;
  long env_steps = 0;  ///< total after this episode
  int length = 0;
  double episode_return = 0.0;
  bool success = false;
  long updates = 0;  ///< gradient updates during this episode
  /// Means over this episode's updates; zero when there were none.
  UpdateReport losses;
};

struct TrainResult {
  std::vector<EpisodeRecord> episodes;
  long env_steps = 0;
  long updates = 0;
};

/// Seed of episode `index` for a run seeded with `run_seed`.
std::uint64_t episode_seed(std::uint64_t run_seed, long index);

/// Trains a float agent from scratch. The agent is written to
/// out_dir/checkpoint.bin periodically and at the end; writes go through a
/// temporary file that is removed if the write fails.
TrainResult train(const TrainConfig& cfg, SacAgent<float>& agent,
                  const std::function<void(const EpisodeRecord&)>& on_episode = {});

/// Mean of the previous `window` returns at each episode (fewer at the start).
std::vector<double> moving_average(const std::vector<double>& values, std::size_t window);

void save_agent(SacAgent<float>& agent, const std::string& path);
void load_agent(SacAgent<float>& agent, const std::string& path);

}  // namespace dyngrasp
