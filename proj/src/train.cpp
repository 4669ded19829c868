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

#include "dyngrasp/train.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "dyngrasp/errors.hpp"

namespace dyngrasp {
namespace {

void accumulate(UpdateReport& sum, const UpdateReport& r) {
  sum.critic_loss += r.critic_loss;
  sum.actor_loss += r.actor_loss;
  sum.alpha_loss += r.alpha_loss;
  sum.target_loss += r.target_loss;
  sum.goal_loss += r.goal_loss;
  sum.aux_weight += r.aux_weight;
  sum.total_loss += r.total_loss;
  sum.alpha += r.alpha;
  sum.entropy += r.entropy;
  sum.q_mean += r.q_mean;
}

void scale(UpdateReport& r, double s) {
  for (double* v : {&r.critic_loss, &r.actor_loss, &r.alpha_loss, &r.target_loss, &r.goal_loss, &r.aux_weight,
                    &r.total_loss, &r.alpha, &r.entropy, &r.q_mean}) {
    *v *= s;
  }
}

nlohmann::json to_json(const EpisodeRecord& e) {
  const UpdateReport& l = e.losses;
  return {{"episode", e.episode},
          {"env_steps", e.env_steps},
          {"length", e.length},
          {"return", e.episode_return},
          {"success", e.success},
          {"updates", e.updates},
          {"critic_loss", l.critic_loss},
          {"actor_loss", l.actor_loss},
          {"alpha_loss", l.alpha_loss},
          {"target_loss", l.target_loss},
          {"goal_loss", l.goal_loss},
          {"aux_weight", l.aux_weight},
          {"total_loss", l.total_loss},
          {"alpha", l.alpha},
          {"entropy", l.entropy},
          {"q_mean", l.q_mean}};
}

Transition make_transition(const CompactObservation& obs, const Action& action, const StepInfo& before,
                           const StepResult& r, const FeaturizerConfig& fc) {
  Transition t;
  t.observation = obs;
  t.action = action.cast<float>();
  t.reward = static_cast<float>(r.reward);
  t.next_observation = compact(r.observation, fc.rep, fc.max_grasps);
  t.terminal = r.terminal;
  t.stages = stage_labels(before.stages);
  if (before.nearest_target) {
    const auto s = serialize_pose(before.nearest_target->pose);
    for (int i = 0; i < 7; ++i) t.goal[i] = static_cast<float>(s[static_cast<std::size_t>(i)]);
    t.goal_valid = true;
  }
  return t;
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t run_seed, long index) {
  std::seed_seq seq{static_cast<std::uint32_t>(run_seed), static_cast<std::uint32_t>(run_seed >> 32),
                    static_cast<std::uint32_t>(index), 0x5eedu};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

void save_agent(SacAgent<float>& agent, const std::string& path) {
  const std::string tmp = path + ".partial";
  try {
    write_checkpoint(tmp, agent.state_blocks());
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move checkpoint into place: " + path);
  }
}

void load_agent(SacAgent<float>& agent, const std::string& path) { agent.load_state(read_checkpoint(path)); }

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

TrainResult train(const TrainConfig& cfg, SacAgent<float>& agent,
                  const std::function<void(const EpisodeRecord&)>& on_episode) {
  cfg.env.validate();
  cfg.agent.validate();
  const SacHyperparams& hp = cfg.agent.hp;
  const FeaturizerConfig& fc = cfg.agent.features;

  std::ofstream metrics;
  std::string checkpoint_path;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    metrics.open(cfg.out_dir + "/metrics.jsonl");
    if (!metrics) throw IoError("cannot open metrics log in " + cfg.out_dir);
    checkpoint_path = cfg.out_dir + "/checkpoint.bin";
  }

  DynGraspEnv env(cfg.env);
  ReplayBuffer replay(static_cast<std::size_t>(hp.replay_capacity));
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  TrainResult result;
  long step = 0;
  for (long episode = 0; step < hp.total_steps; ++episode) {
    Observation obs = env.reset(episode_seed(cfg.seed, episode));
    CompactObservation cobs = compact(obs, fc.rep, fc.max_grasps);
    EpisodeRecord rec;
    rec.episode = episode;
    UpdateReport sum;
    bool done = false;
    while (!done && step < hp.total_steps) {
      Action action;
      if (step < hp.warmup_steps) {
        for (int i = 0; i < kActionDim; ++i) action[i] = uniform(rng);
      } else {
        action = agent.act(cobs, false, rng);
      }
      const StepInfo before = env.evaluate();
      StepResult r = env.step(action);
      Transition t = make_transition(cobs, action, before, r, fc);
      cobs = t.next_observation;
      replay.add(std::move(t));
      ++step;
      ++rec.length;
      rec.episode_return += r.reward;
      rec.success = rec.success || r.info.success;
      done = r.done;

      if (step >= hp.warmup_steps && step % hp.update_every == 0) {
        const auto batch = replay.sample(static_cast<std::size_t>(hp.batch_size), rng);
        accumulate(sum, agent.update(batch, step, rng));
        ++rec.updates;
        ++result.updates;
      }
      if (!checkpoint_path.empty() && cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
        save_agent(agent, checkpoint_path);
      }
    }
    if (rec.updates > 0) scale(sum, 1.0 / static_cast<double>(rec.updates));
    rec.losses = sum;
    rec.env_steps = step;
    if (metrics.is_open()) metrics << to_json(rec).dump() << '\n' << std::flush;
    if (on_episode) on_episode(rec);
    result.episodes.push_back(rec);
  }
  result.env_steps = step;
  if (!checkpoint_path.empty()) save_agent(agent, checkpoint_path);
  return result;
}

}  // namespace dyngrasp
