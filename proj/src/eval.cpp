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

#include "dyngrasp/eval.hpp"

#include "dyngrasp/train.hpp"

namespace dyngrasp {

Action RandomPolicy::act(const Observation&) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Action a;
  for (int i = 0; i < kActionDim; ++i) a[i] = u(rng_);
  return a;
}

Action AgentPolicy::act(const Observation& obs) {
  const FeaturizerConfig& fc = agent_.config().features;
  return agent_.act(compact(obs, fc.rep, fc.max_grasps), true, rng_);
}

void MacroSwitchPolicy::reset(std::uint64_t seed) {
  inner_->reset(seed);
  macro_.reset();
  switched_ = false;
}

Action MacroSwitchPolicy::act(const Observation& obs) {
  if (!switched_ && terminal_macro_trigger(obs.grasps)) switched_ = true;
  return switched_ ? macro_.act(obs) : inner_->act(obs);
}

EpisodeOutcome run_episode(DynGraspEnv& env, Policy& policy, std::uint64_t seed,
                           const std::function<void(const TraceRecord&)>& on_step) {
  Observation obs = env.reset(seed);
  policy.reset(seed);
  EpisodeOutcome out;
  for (bool done = false; !done;) {
    StepResult r = env.step(policy.act(obs));
    ++out.steps;
    out.episode_return += r.reward;
    out.success = out.success || r.info.success;
    done = r.done;
    if (on_step) {
      on_step({env.state().step, env.state().object_pose, env.state().ee_pose, r.observation.grasps.size(),
               r.info.reward, r.info.stages, r.done});
    }
    obs = std::move(r.observation);
  }
  return out;
}

std::uint64_t eval_episode_seed(std::uint64_t seed, int index) {
  return episode_seed(seed ^ 0xe7a1e7a1e7a1e7a1ull, index);
}

EvalResult evaluate_policy(const EnvConfig& cfg, Policy& policy, int episodes, std::uint64_t seed) {
  DynGraspEnv env(cfg);
  EvalResult res;
  double success_steps = 0.0, returns = 0.0;
  for (int i = 0; i < episodes; ++i) {
    const EpisodeOutcome o = run_episode(env, policy, eval_episode_seed(seed, i));
    ++res.episodes;
    returns += o.episode_return;
    if (o.success) {
      ++res.successes;
      success_steps += o.steps;
    }
  }
  res.mean_return = episodes ? returns / episodes : 0.0;
  res.mean_steps_to_success = res.successes ? success_steps / res.successes : 0.0;
  return res;
}

}  // namespace dyngrasp
