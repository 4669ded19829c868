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

// Soft actor-critic with auxiliary stage and goal-grasp heads.
//
// Critics, the stage head and the goal head share the grasp encoder and are
// optimised together; their gradients are the only ones reaching the
// encoder. The actor reads encoder features without propagating into them.
// The auxiliary terms are scaled by discount^(t / aux_horizon).

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dyngrasp/checkpoint.hpp"
#include "dyngrasp/featurize.hpp"
#include "dyngrasp/nets.hpp"

namespace dyngrasp {

struct SacHyperparams {
  double discount = 0.98;
  double aux_target_weight = 1.0;
  double aux_goal_weight = 1.0;
  double aux_horizon = 20000.0;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double alpha_lr = 3e-4;
  double tau = 0.005;
  double init_temperature = 0.1;
  double target_entropy = -static_cast<double>(kActionDim);
  int batch_size = 256;
  long total_steps = 2'000'000;
  long warmup_steps = 1000;
  /// Environment steps between gradient updates.
  int update_every = 1;
  long replay_capacity = 1'000'000;

  void validate() const;
};

/// discount^(t / horizon).
double aux_weight(long t, double discount, double horizon = 20000.0);

/// L_sac + (a * L_target + b * L_goal) * aux_weight(t).
double combined_loss(double l_sac, double l_target, double l_goal, long t, const SacHyperparams& hp);

/// Binary cross-entropy floor applied to each log term.
inline constexpr double kBceLogFloor = -100.0;

template <typename S>
struct LossAndGrad {
  double loss = 0.0;
  nets::Matrix<S> grad;
};

/// Mean over all entries of -[y log p + (1 - y) log(1 - p)], p = sigmoid(z),
/// each log floored at kBceLogFloor. The gradient is zero where the floor is active.
template <typename S>
LossAndGrad<S> stage_bce(const nets::Matrix<S>& logits, const nets::Matrix<S>& labels) {
  nets::require_shape(logits.rows() == labels.rows() && logits.cols() == labels.cols(), "stage_bce: shape mismatch");
  LossAndGrad<S> out{0.0, nets::Matrix<S>::Zero(logits.rows(), logits.cols())};
  const double n = static_cast<double>(logits.size());
  for (Index i = 0; i < logits.size(); ++i) {
    const double z = static_cast<double>(logits.data()[i]);
    const double y = static_cast<double>(labels.data()[i]);
    // log p = -softplus(-z), log(1 - p) = -softplus(z)
    const auto softplus = [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
    const double log_p = std::isinf(z) ? (z > 0 ? 0.0 : -std::numeric_limits<double>::infinity()) : -softplus(-z);
    const double log_q = std::isinf(z) ? (z < 0 ? 0.0 : -std::numeric_limits<double>::infinity()) : -softplus(z);
    const bool floor_p = log_p < kBceLogFloor, floor_q = log_q < kBceLogFloor;
    double loss = 0.0, grad = 0.0;
    if (y != 0.0) loss -= y * (floor_p ? kBceLogFloor : log_p);
    if (y != 1.0) loss -= (1.0 - y) * (floor_q ? kBceLogFloor : log_q);
    const double p = std::isinf(z) ? (z > 0 ? 1.0 : 0.0) : 1.0 / (1.0 + std::exp(-z));
    if (!floor_p) grad -= y * (1.0 - p);
    if (!floor_q) grad += (1.0 - y) * p;
    out.loss += loss / n;
    out.grad.data()[i] = static_cast<S>(grad / n);
  }
  return out;
}

/// Mean over valid columns of |p - p*|^2 + 1 - |q . q*|. Rows 3..6 of `pred`
/// are expected unit-norm.
template <typename S>
LossAndGrad<S> goal_distance_loss(const nets::Matrix<S>& pred, const nets::Matrix<S>& target,
                                  const std::vector<bool>& valid) {
  nets::require_shape(pred.rows() == 7 && target.rows() == 7 && pred.cols() == target.cols() &&
                          static_cast<Index>(valid.size()) == pred.cols(),
                      "goal_distance_loss: shape mismatch");
  LossAndGrad<S> out{0.0, nets::Matrix<S>::Zero(7, pred.cols())};
  Index count = 0;
  for (bool v : valid) count += v ? 1 : 0;
  if (count == 0) return out;
  const S inv = S(1) / static_cast<S>(count);
  for (Index c = 0; c < pred.cols(); ++c) {
    if (!valid[static_cast<std::size_t>(c)]) continue;
    const auto dp = (pred.col(c).template head<3>() - target.col(c).template head<3>()).eval();
    const S dot = pred.col(c).template tail<4>().dot(target.col(c).template tail<4>());
    out.loss += static_cast<double>(dp.squaredNorm() + S(1) - std::abs(dot)) / static_cast<double>(count);
    out.grad.col(c).template head<3>() = S(2) * inv * dp;
    out.grad.col(c).template tail<4>() = -(dot < S(0) ? S(-1) : S(1)) * inv * target.col(c).template tail<4>();
  }
  return out;
}

/// Scalar forms over a single sample.
double aux_target_loss(const Eigen::Vector3d& logits, const std::array<float, 3>& labels);
double aux_goal_loss(const Eigen::Matrix<double, 7, 1>& pred, const Grasp& target);

/// Approached / grasped / lifted flags as 0-1 labels.
std::array<float, 3> stage_labels(const StageFlags& flags);

struct Transition {
  CompactObservation observation;
  Eigen::Matrix<float, kActionDim, 1> action;
  float reward = 0.0f;
  CompactObservation next_observation;
  /// Set only when the episode ended by success; time-limit ends still bootstrap.
  bool terminal = false;
  std::array<float, 3> stages{};
  /// Nearest target grasp pose [p, q] in the end-effector frame, before the action.
  Eigen::Matrix<float, 7, 1> goal = Eigen::Matrix<float, 7, 1>::Zero();
  bool goal_valid = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(Transition t);
  /// Uniform with replacement over written slots. Throws EmptySetError when empty.
  std::vector<const Transition*> sample(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return slots_.size(); }
  /// Slot index the next add() writes to.
  std::size_t cursor() const { return next_; }
  const Transition& slot(std::size_t i) const;

 private:
  std::vector<Transition> slots_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
};

struct AgentConfig {
  nets::EncoderKind encoder = nets::EncoderKind::ggn;
  nets::GgnConfig encoder_widths;
  std::vector<int> hidden{256, 256};
  int aux_hidden = 64;
  FeaturizerConfig features;
  SacHyperparams hp;

  void validate() const;
};

struct UpdateReport {
  double critic_loss = 0.0;  // L_q1 + L_q2
  double actor_loss = 0.0;
  double alpha_loss = 0.0;
  double target_loss = 0.0;
  double goal_loss = 0.0;
  double aux_weight = 0.0;
  double total_loss = 0.0;  // combined_loss over critic, actor and auxiliary terms
  double alpha = 0.0;
  double entropy = 0.0;  // -mean log pi of the sampled actions
  double q_mean = 0.0;
};

/// One sampled minibatch, featurized.
template <typename S>
struct SacBatch {
  FeatureBatch<S> obs, next;
  nets::Matrix<S> action, reward, not_terminal, stages, goal;
  std::vector<bool> goal_valid;
  Index size() const { return action.cols(); }
};

template <typename S>
class SacAgent {
 public:
  using Matrix = nets::Matrix<S>;
  using Encoder = nets::GraspEncoder<S>;
  using Heads = nets::PolicyHeads<S>;

  SacAgent(const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        encoder_(cfg.encoder, cfg.encoder_widths),
        target_encoder_(cfg.encoder, cfg.encoder_widths),
        heads_(heads_config(cfg, encoder_.feature_dim())),
        target_heads_(heads_config(cfg, encoder_.feature_dim())),
        log_alpha_(Matrix::Constant(1, 1, static_cast<S>(std::log(cfg.hp.init_temperature)))),
        log_alpha_grad_(Matrix::Zero(1, 1)) {
    cfg_.validate();
    std::mt19937_64 rng(seed);
    encoder_.init(rng);
    heads_.init(rng);
    collect_all();
    nets::soft_update(online_params_, target_params_, 1.0);

    std::vector<nets::ParamRef<S>> critic_side;
    encoder_.collect("encoder", critic_side);
    heads_.critic1().collect("heads.critic1", critic_side);
    heads_.critic2().collect("heads.critic2", critic_side);
    heads_.stage().collect("heads.stage", critic_side);
    heads_.goal().collect("heads.goal", critic_side);
    critic_opt_ = nets::Adam<S>(critic_side, cfg.hp.critic_lr);
    std::vector<nets::ParamRef<S>> actor_side;
    heads_.actor().collect("heads.actor", actor_side);
    actor_opt_ = nets::Adam<S>(actor_side, cfg.hp.actor_lr);
    alpha_opt_ = nets::Adam<S>({{"log_alpha", &log_alpha_, &log_alpha_grad_}}, cfg.hp.alpha_lr);
  }

  // Parameter lists hold pointers into this object.
  SacAgent(const SacAgent&) = delete;
  SacAgent& operator=(const SacAgent&) = delete;

  const AgentConfig& config() const { return cfg_; }
  double alpha() const { return std::exp(static_cast<double>(log_alpha_(0, 0))); }
  long long updates() const { return critic_opt_.steps(); }
  Encoder& encoder() { return encoder_; }
  Encoder& target_encoder() { return target_encoder_; }
  Heads& heads() { return heads_; }
  Heads& target_heads() { return target_heads_; }
  nets::Adam<S>& critic_optimizer() { return critic_opt_; }
  nets::Adam<S>& actor_optimizer() { return actor_opt_; }
  nets::Adam<S>& alpha_optimizer() { return alpha_opt_; }
  const std::vector<nets::ParamRef<S>>& online_params() const { return online_params_; }
  const std::vector<nets::ParamRef<S>>& target_params() const { return target_params_; }

  SacBatch<S> prepare(const std::vector<const Transition*>& batch) const {
    nets::require_shape(!batch.empty(), "SacAgent::prepare: empty batch");
    const Index b = static_cast<Index>(batch.size());
    std::vector<const CompactObservation*> obs, next;
    SacBatch<S> out;
    out.action.resize(kActionDim, b);
    out.reward.resize(1, b);
    out.not_terminal.resize(1, b);
    out.stages.resize(3, b);
    out.goal.resize(7, b);
    out.goal_valid.resize(static_cast<std::size_t>(b));
    for (Index i = 0; i < b; ++i) {
      const Transition& t = *batch[static_cast<std::size_t>(i)];
      obs.push_back(&t.observation);
      next.push_back(&t.next_observation);
      out.action.col(i) = t.action.cast<S>();
      out.reward(0, i) = static_cast<S>(t.reward);
      out.not_terminal(0, i) = t.terminal ? S(0) : S(1);
      for (int k = 0; k < 3; ++k) out.stages(k, i) = static_cast<S>(t.stages[static_cast<std::size_t>(k)]);
      out.goal.col(i) = t.goal.cast<S>();
      out.goal_valid[static_cast<std::size_t>(i)] = t.goal_valid;
    }
    out.obs = featurize<S>(obs, cfg_.features);
    out.next = featurize<S>(next, cfg_.features);
    return out;
  }

  /// Encoder features with the columns of grasp-free samples zeroed.
  static Matrix encode(const Encoder& enc, const FeatureBatch<S>& fb, typename Encoder::Cache* cache) {
    Matrix f = enc.forward(fb.set, cache);
    mask_empty(f, fb.empty);
    return f;
  }

  /// Mean, clamped log-std, squashed action and log-probability for each column.
  struct PolicySample {
    Matrix raw, mean, log_std, noise, action, log_prob;
  };

  PolicySample sample_policy(const nets::DenseStack<S>& actor, const Matrix& trunk, std::mt19937_64& rng,
                             typename nets::DenseStack<S>::Cache* cache) const {
    PolicySample p;
    p.raw = actor.forward(trunk, cache);
    p.mean = p.raw.topRows(kActionDim);
    p.log_std = p.raw.bottomRows(kActionDim).cwiseMax(S(nets::kLogStdMin)).cwiseMin(S(nets::kLogStdMax));
    p.noise.resize(kActionDim, trunk.cols());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < p.noise.size(); ++i) p.noise.data()[i] = static_cast<S>(normal(rng));
    const Matrix u = p.mean + (p.log_std.array().exp() * p.noise.array()).matrix();
    p.action = u.array().tanh().matrix();
    p.log_prob = Matrix::Zero(1, trunk.cols());
    const double half_log_2pi = 0.5 * std::log(2.0 * M_PI);
    for (Index c = 0; c < trunk.cols(); ++c) {
      double lp = 0.0;
      for (Index r = 0; r < kActionDim; ++r) {
        const double e = static_cast<double>(p.noise(r, c));
        const double x = static_cast<double>(u(r, c));
        // log(1 - tanh(x)^2) = 2 (log 2 - x - softplus(-2x))
        const double softplus = -2.0 * x > 0 ? -2.0 * x + std::log1p(std::exp(2.0 * x)) : std::log1p(std::exp(-2.0 * x));
        lp += -0.5 * e * e - static_cast<double>(p.log_std(r, c)) - half_log_2pi - 2.0 * (std::log(2.0) - x - softplus);
      }
      p.log_prob(0, c) = static_cast<S>(lp);
    }
    return p;
  }

  /// Soft Bellman targets r + discount * (1 - terminal) * (min target Q - alpha log pi).
  Matrix critic_targets(const SacBatch<S>& b, std::mt19937_64& rng) const {
    const Matrix f = encode(target_encoder_, b.next, nullptr);
    const Matrix trunk = Heads::concat_rows(f, b.next.state);
    const PolicySample next = sample_policy(heads_.actor(), trunk, rng, nullptr);
    const Matrix in = Heads::concat_rows(trunk, next.action);
    const Matrix q = target_heads_.critic1().forward(in).cwiseMin(target_heads_.critic2().forward(in));
    const Matrix soft = q - static_cast<S>(alpha()) * next.log_prob;
    return b.reward + static_cast<S>(cfg_.hp.discount) * b.not_terminal.cwiseProduct(soft);
  }

  struct CriticPass {
    double q_loss = 0.0, target_loss = 0.0, goal_loss = 0.0, aux_weight = 0.0, q_mean = 0.0;
    Matrix trunk;  // [features; state] before the step, reused by the actor pass
  };

  /// Zeroes and fills the critic-side gradients for L_q + w (a L_target + b L_goal).
  /// Auxiliary terms whose weight is zero contribute no gradient at all.
  CriticPass critic_backward(const SacBatch<S>& b, const Matrix& y, long t) {
    critic_opt_.zero_grad();
    CriticPass out;
    typename Encoder::Cache enc_cache;
    const Matrix f = encode(encoder_, b.obs, &enc_cache);
    typename Heads::Cache cache;
    const auto o = heads_.forward(f, b.obs.state, b.action, &cache);
    const double n = static_cast<double>(b.size());
    const Matrix e1 = o.q1 - y, e2 = o.q2 - y;
    out.q_loss = static_cast<double>(e1.squaredNorm() + e2.squaredNorm()) / n;
    out.q_mean = static_cast<double>(o.q1.sum() + o.q2.sum()) / (2.0 * n);
    typename Heads::Upstream up;
    up.q1 = (S(2) / static_cast<S>(n)) * e1;
    up.q2 = (S(2) / static_cast<S>(n)) * e2;

    out.aux_weight = aux_weight(t, cfg_.hp.discount, cfg_.hp.aux_horizon);
    const auto bce = stage_bce<S>(o.stage_logits, b.stages);
    const auto goal = goal_distance_loss<S>(o.goal, b.goal, b.goal_valid);
    out.target_loss = bce.loss;
    out.goal_loss = goal.loss;
    const double wt = out.aux_weight * cfg_.hp.aux_target_weight;
    const double wg = out.aux_weight * cfg_.hp.aux_goal_weight;
    if (wt != 0.0) up.stage_logits = static_cast<S>(wt) * bce.grad;
    if (wg != 0.0) up.goal = static_cast<S>(wg) * goal.grad;

    const auto grads = heads_.backward(cache, up);
    Matrix df = grads.feature;
    mask_empty(df, b.obs.empty);
    encoder_.backward(enc_cache, df);
    out.trunk = Heads::concat_rows(f, b.obs.state);
    return out;
  }

  /// Forward-only value of the critic-side objective; used by gradient checks.
  double critic_objective(const SacBatch<S>& b, const Matrix& y, long t) const {
    const Matrix f = encode(encoder_, b.obs, nullptr);
    const auto o = heads_.forward(f, b.obs.state, b.action);
    const double n = static_cast<double>(b.size());
    const double q = static_cast<double>((o.q1 - y).squaredNorm() + (o.q2 - y).squaredNorm()) / n;
    const double w = aux_weight(t, cfg_.hp.discount, cfg_.hp.aux_horizon);
    return q + w * (cfg_.hp.aux_target_weight * stage_bce<S>(o.stage_logits, b.stages).loss +
                    cfg_.hp.aux_goal_weight * goal_distance_loss<S>(o.goal, b.goal, b.goal_valid).loss);
  }

  struct ActorPass {
    double actor_loss = 0.0, alpha_loss = 0.0, entropy = 0.0;
  };

  /// Reparameterised policy loss mean(alpha log pi - min Q) on fixed features,
  /// and the temperature loss mean(alpha (-log pi - target entropy)).
  ActorPass actor_backward(const Matrix& trunk, std::mt19937_64& rng) {
    actor_opt_.zero_grad();
    alpha_opt_.zero_grad();
    ActorPass out;
    typename nets::DenseStack<S>::Cache cache;
    const PolicySample p = sample_policy(heads_.actor(), trunk, rng, &cache);
    const Matrix in = Heads::concat_rows(trunk, p.action);
    typename nets::DenseStack<S>::Cache c1, c2;
    const Matrix q1 = heads_.critic1().forward(in, &c1);
    const Matrix q2 = heads_.critic2().forward(in, &c2);
    const Index b = trunk.cols();
    const S a = static_cast<S>(alpha());
    const S inv = S(1) / static_cast<S>(b);
    Matrix dq1 = Matrix::Zero(1, b), dq2 = Matrix::Zero(1, b);
    double loss = 0.0;
    for (Index c = 0; c < b; ++c) {
      const bool first = q1(0, c) <= q2(0, c);
      (first ? dq1 : dq2)(0, c) = -inv;
      loss += static_cast<double>(a * p.log_prob(0, c) - (first ? q1(0, c) : q2(0, c)));
    }
    out.actor_loss = loss / static_cast<double>(b);
    out.entropy = -static_cast<double>(p.log_prob.mean());

    // Only the action rows of the critic input gradient are used; the critic
    // weight gradients this leaves behind are cleared before the next critic step.
    const Matrix da = heads_.critic1().backward(c1, dq1).bottomRows(kActionDim) +
                      heads_.critic2().backward(c2, dq2).bottomRows(kActionDim);
    const Matrix sigma = p.log_std.array().exp().matrix();
    const Matrix du = (da.array() * (S(1) - p.action.array().square()) + S(2) * a * inv * p.action.array()).matrix();
    Matrix d_raw(2 * kActionDim, b);
    d_raw.topRows(kActionDim) = du;
    const Matrix dlog_std = (du.array() * sigma.array() * p.noise.array() - a * inv).matrix();
    d_raw.bottomRows(kActionDim) = Heads::log_std_clamp_backward(p.raw.bottomRows(kActionDim), dlog_std);
    heads_.actor().backward(cache, d_raw);

    const double gap = -static_cast<double>(p.log_prob.mean()) - cfg_.hp.target_entropy;
    out.alpha_loss = alpha() * gap;
    log_alpha_grad_(0, 0) = static_cast<S>(alpha() * gap);
    return out;
  }

  /// One full update: critic and auxiliary step, actor step, temperature step,
  /// target smoothing. Throws TrainingDiverged on a non-finite loss.
  UpdateReport update(const std::vector<const Transition*>& batch, long t, std::mt19937_64& rng) {
    const SacBatch<S> b = prepare(batch);
    const Matrix y = critic_targets(b, rng);
    const CriticPass cp = critic_backward(b, y, t);
    UpdateReport r;
    r.critic_loss = cp.q_loss;
    r.target_loss = cp.target_loss;
    r.goal_loss = cp.goal_loss;
    r.aux_weight = cp.aux_weight;
    r.q_mean = cp.q_mean;
    check_finite(r.critic_loss, "critic", t, r);
    check_finite(r.target_loss + r.goal_loss, "auxiliary", t, r);
    critic_opt_.step();

    const ActorPass ap = actor_backward(cp.trunk, rng);
    r.actor_loss = ap.actor_loss;
    r.alpha_loss = ap.alpha_loss;
    r.entropy = ap.entropy;
    check_finite(r.actor_loss, "actor", t, r);
    actor_opt_.step();
    alpha_opt_.step();
    r.alpha = alpha();
    r.total_loss = combined_loss(r.critic_loss + r.actor_loss, r.target_loss, r.goal_loss, t, cfg_.hp);

    nets::soft_update(online_params_, target_params_, cfg_.hp.tau);
    return r;
  }

  /// Action for one observation: tanh(mean) when deterministic, a policy sample otherwise.
  Action act(const CompactObservation& obs, bool deterministic, std::mt19937_64& rng) const {
    const FeatureBatch<S> fb = featurize<S>({&obs}, cfg_.features);
    const Matrix trunk = Heads::concat_rows(encode(encoder_, fb, nullptr), fb.state);
    Matrix a;
    if (deterministic) {
      a = heads_.actor().forward(trunk).topRows(kActionDim).array().tanh().matrix();
    } else {
      a = sample_policy(heads_.actor(), trunk, rng, nullptr).action;
    }
    return a.col(0).template cast<double>();
  }

  /// Online and target weights, optimiser moments and step counts, temperature.
  std::vector<TensorBlock> state_blocks() {
    std::vector<TensorBlock> out;
    append_blocks(online_params_, out);
    append_blocks(target_params_, out);
    out.push_back(to_block("log_alpha", log_alpha_));
    auto optimiser = [&](nets::Adam<S>& opt, const std::string& name) {
      for (std::size_t i = 0; i < opt.params().size(); ++i) {
        out.push_back(to_block("opt." + name + ".m." + opt.params()[i].name, opt.first_moments()[i]));
        out.push_back(to_block("opt." + name + ".v." + opt.params()[i].name, opt.second_moments()[i]));
      }
      TensorBlock steps{"opt." + name + ".steps", {1, 1}, {static_cast<double>(opt.steps())}, false};
      out.push_back(steps);
    };
    optimiser(critic_opt_, "critic");
    optimiser(actor_opt_, "actor");
    optimiser(alpha_opt_, "alpha");
    return out;
  }

  /// Restores what state_blocks wrote. Optimiser state is optional so that
  /// weight-only files load for evaluation.
  void load_state(const std::vector<TensorBlock>& blocks) {
    load_blocks(blocks, online_params_);
    load_blocks(blocks, target_params_);
    from_block(find_block(blocks, "log_alpha"), log_alpha_);
    auto optimiser = [&](nets::Adam<S>& opt, const std::string& name) {
      const std::string steps_name = "opt." + name + ".steps";
      bool present = false;
      for (const auto& b : blocks) present = present || b.name == steps_name;
      if (!present) return;
      for (std::size_t i = 0; i < opt.params().size(); ++i) {
        from_block(find_block(blocks, "opt." + name + ".m." + opt.params()[i].name), opt.first_moments()[i]);
        from_block(find_block(blocks, "opt." + name + ".v." + opt.params()[i].name), opt.second_moments()[i]);
      }
      opt.steps() = static_cast<long long>(find_block(blocks, steps_name).values.at(0));
    };
    optimiser(critic_opt_, "critic");
    optimiser(actor_opt_, "actor");
    optimiser(alpha_opt_, "alpha");
  }

 private:
  static nets::HeadsConfig heads_config(const AgentConfig& cfg, int feature_dim) {
    return {feature_dim, kStateDim, kActionDim, cfg.hidden, cfg.aux_hidden};
  }

  static void mask_empty(Matrix& m, const std::vector<bool>& empty) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (empty[static_cast<std::size_t>(c)]) m.col(c).setZero();
    }
  }

  void collect_all() {
    encoder_.collect("encoder", online_params_);
    heads_.collect("heads", online_params_);
    target_encoder_.collect("target.encoder", target_params_);
    target_heads_.collect("target.heads", target_params_);
  }

  void check_finite(double v, const char* what, long t, const UpdateReport& r) const {
    if (std::isfinite(v)) return;
    std::ostringstream snap;
    snap << "step=" << t << " critic_loss=" << r.critic_loss << " actor_loss=" << r.actor_loss
         << " target_loss=" << r.target_loss << " goal_loss=" << r.goal_loss << " q_mean=" << r.q_mean
         << " alpha=" << alpha() << " updates=" << critic_opt_.steps();
    throw TrainingDiverged(std::string("non-finite ") + what + " loss", snap.str());
  }

  AgentConfig cfg_;
  Encoder encoder_, target_encoder_;
  Heads heads_, target_heads_;
  Matrix log_alpha_, log_alpha_grad_;
  std::vector<nets::ParamRef<S>> online_params_, target_params_;
  nets::Adam<S> critic_opt_, actor_opt_, alpha_opt_;
};

extern template class SacAgent<float>;
extern template class SacAgent<double>;

}  // namespace dyngrasp
