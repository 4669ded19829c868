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

#include "dyngrasp/sac.hpp"

#include "dyngrasp/errors.hpp"

namespace dyngrasp {

void SacHyperparams::validate() const {
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must lie in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(aux_target_weight >= 0.0 && aux_goal_weight >= 0.0)) throw ConfigError("auxiliary weights must be >= 0");
  if (!(aux_horizon > 0.0)) throw ConfigError("aux_horizon must be positive");
  if (!(actor_lr > 0.0 && critic_lr > 0.0 && alpha_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(init_temperature > 0.0)) throw ConfigError("init_temperature must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (total_steps < 0 || warmup_steps < 0) throw ConfigError("step counts must be >= 0");
  if (update_every < 1) throw ConfigError("update_every must be >= 1");
  if (replay_capacity < 1) throw ConfigError("replay_capacity must be >= 1");
}

void AgentConfig::validate() const {
  hp.validate();
  encoder_widths.validate();
  check_compatible(features.rep, encoder);
  if (features.input_rows() != (encoder == nets::EncoderKind::nined ? 9 : encoder_widths.input_dim)) {
    throw ConfigError("encoder input width does not match the representation");
  }
  if (hidden.empty() || aux_hidden < 1) throw ConfigError("head widths must be non-empty");
  if (features.max_grasps < 1 || features.template_points < 1 || features.raw_points < 1) {
    throw ConfigError("featurizer sizes must be >= 1");
  }
}

double aux_weight(long t, double discount, double horizon) {
  return std::pow(discount, static_cast<double>(t) / horizon);
}

double combined_loss(double l_sac, double l_target, double l_goal, long t, const SacHyperparams& hp) {
  return l_sac + (hp.aux_target_weight * l_target + hp.aux_goal_weight * l_goal) *
                     aux_weight(t, hp.discount, hp.aux_horizon);
}

double aux_target_loss(const Eigen::Vector3d& logits, const std::array<float, 3>& labels) {
  const nets::Matrix<double> y = Eigen::Vector3d(labels[0], labels[1], labels[2]);
  return stage_bce<double>(nets::Matrix<double>(logits), y).loss;
}

double aux_goal_loss(const Eigen::Matrix<double, 7, 1>& pred, const Grasp& target) {
  const auto s = serialize_pose(target.pose);
  nets::Matrix<double> t(7, 1);
  for (int i = 0; i < 7; ++i) t(i, 0) = s[static_cast<std::size_t>(i)];
  return goal_distance_loss<double>(nets::Matrix<double>(pred), t, {true}).loss;
}

std::array<float, 3> stage_labels(const StageFlags& flags) { return flags.labels(); }

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
  if (capacity == 0) throw InvalidArgument("ReplayBuffer: capacity must be >= 1");
  slots_.resize(capacity);
}

void ReplayBuffer::add(Transition t) {
  slots_[next_] = std::move(t);
  next_ = (next_ + 1) % slots_.size();
  size_ = std::min(size_ + 1, slots_.size());
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  if (size_ == 0) throw EmptySetError("ReplayBuffer::sample: buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<const Transition*> out(n);
  for (auto& p : out) p = &slots_[pick(rng)];
  return out;
}

const Transition& ReplayBuffer::slot(std::size_t i) const {
  if (i >= size_) throw InvalidArgument("ReplayBuffer::slot: slot not written");
  return slots_[i];
}

template class SacAgent<float>;
template class SacAgent<double>;

}  // namespace dyngrasp
