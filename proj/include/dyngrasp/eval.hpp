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

// Policy rollouts for evaluation, baselines and episode traces.

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "dyngrasp/env.hpp"
#include "dyngrasp/sac.hpp"

namespace dyngrasp {

class Policy {
 public:
  virtual ~Policy() = default;
  /// Called before every episode with that episode's seed.
  virtual void reset(std::uint64_t seed) = 0;
  virtual Action act(const Observation& obs) = 0;
};

/// Uniform actions in [-1, 1]^7.
class RandomPolicy : public Policy {
 public:
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  Action act(const Observation& obs) override;

 private:
  std::mt19937_64 rng_;
};

class HeuristicPolicy : public Policy {
 public:
  explicit HeuristicPolicy(const EnvConfig& cfg) : controller_(cfg) {}
  void reset(std::uint64_t) override { controller_.reset(); }
  Action act(const Observation& obs) override { return controller_.act(obs); }

 private:
  HeuristicController controller_;
};

/// Deterministic actor output (tanh of the mean).
class AgentPolicy : public Policy {
 public:
  explicit AgentPolicy(const SacAgent<float>& agent) : agent_(agent) {}
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  Action act(const Observation& obs) override;

 private:
  const SacAgent<float>& agent_;
  std::mt19937_64 rng_;
};

/// Runs the inner policy until terminal_macro_trigger fires on the visible
/// grasps, then hands control to the scripted move-close-retract macro for
/// the rest of the episode.
class MacroSwitchPolicy : public Policy {
 public:
  MacroSwitchPolicy(std::unique_ptr<Policy> inner, const EnvConfig& cfg) : inner_(std::move(inner)), macro_(cfg) {}
  void reset(std::uint64_t seed) override;
  Action act(const Observation& obs) override;
  bool switched() const { return switched_; }

 private:
  std::unique_ptr<Policy> inner_;
  GraspMacro macro_;
  bool switched_ = false;
};

/// One environment step as written to episode traces.
struct TraceRecord {
  int step = 0;
  Posed object_pose;
  Posed ee_pose;
  std::size_t grasp_count = 0;
  RewardTerms reward;
  StageFlags stages;
  bool done = false;
};

struct EpisodeOutcome {
  bool success = false;
  int steps = 0;
  double episode_return = 0.0;
};

/// One episode from env.reset(seed); every step is passed to `on_step` when set.
EpisodeOutcome run_episode(DynGraspEnv& env, Policy& policy, std::uint64_t seed,
                           const std::function<void(const TraceRecord&)>& on_step = {});

struct EvalResult {
  int episodes = 0;
  int successes = 0;
  /// Mean length of the successful episodes; 0 when there were none.
  double mean_steps_to_success = 0.0;
  double mean_return = 0.0;
  double success_rate() const { return episodes ? static_cast<double>(successes) / episodes : 0.0; }
};

/// Seed of evaluation episode `index`; disjoint from the training stream.
std::uint64_t eval_episode_seed(std::uint64_t seed, int index);

EvalResult evaluate_policy(const EnvConfig& cfg, Policy& policy, int episodes, std::uint64_t seed);

}  // namespace dyngrasp
