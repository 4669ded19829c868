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

// Small dense-network toolkit with hand-written reverse mode.
//
// Every batch is a matrix with one sample per column. Layers keep their own
// gradient buffers; backward() accumulates into them, zero_grad() clears.
// Everything is templated on the scalar so the same code runs in double for
// gradient checks and in float for training.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "dyngrasp/errors.hpp"

namespace dyngrasp::nets {

using Eigen::Index;

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using IndexMatrix = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>;

enum class Activation { relu, linear };

/// A trainable tensor and its gradient buffer, addressed by a stable name.
template <typename S>
struct ParamRef {
  std::string name;
  Matrix<S>* value = nullptr;
  Matrix<S>* grad = nullptr;
};

template <typename S>
struct DenseLayer {
  Matrix<S> weight;  // out x in
  Matrix<S> bias;    // out x 1
  Matrix<S> weight_grad;
  Matrix<S> bias_grad;
  Activation activation = Activation::relu;
};

inline void require_shape(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

/// Affine layers with per-layer activation (ReLU hidden, linear last unless told otherwise).
/// w * h + b. The coefficient-based product evaluates each output column on
/// its own, so a column's bits do not depend on where it sits in the batch and
/// set encoders are exactly permutation invariant. Blocked GEMM does not
/// guarantee this.
template <typename S>
Matrix<S> affine_columns(const Matrix<S>& w, const Matrix<S>& b, const Matrix<S>& h) {
  Matrix<S> z = w.lazyProduct(h);
  z.colwise() += b.col(0);
  return z;
}

template <typename S>
class DenseStack {
 public:
  struct Cache {
    std::vector<Matrix<S>> inputs;
    std::vector<Matrix<S>> pre;
  };

  DenseStack() = default;

  explicit DenseStack(std::vector<int> widths, Activation hidden = Activation::relu,
                      Activation last = Activation::linear)
      : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw InvalidArgument("DenseStack: need at least input and output widths");
    for (int w : widths_) {
      if (w < 1) throw InvalidArgument("DenseStack: widths must be >= 1");
    }
    for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
      DenseLayer<S> layer;
      layer.weight = Matrix<S>::Zero(widths_[i + 1], widths_[i]);
      layer.bias = Matrix<S>::Zero(widths_[i + 1], 1);
      layer.weight_grad = Matrix<S>::Zero(widths_[i + 1], widths_[i]);
      layer.bias_grad = Matrix<S>::Zero(widths_[i + 1], 1);
      layer.activation = (i + 2 == widths_.size()) ? last : hidden;
      layers_.push_back(std::move(layer));
    }
  }

  /// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases. Draws are
  /// made in double so float and double stacks initialised from the same
  /// seed agree up to rounding.
  void init(std::mt19937_64& rng) {
    for (auto& layer : layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = static_cast<S>(u(rng));
      for (Index i = 0; i < layer.bias.size(); ++i) layer.bias.data()[i] = static_cast<S>(u(rng));
    }
  }

  Matrix<S> forward(const Matrix<S>& x, Cache* cache = nullptr) const {
    require_shape(x.rows() == in_dim(), "DenseStack::forward: input rows != input width");
    if (cache) {
      cache->inputs.resize(layers_.size());
      cache->pre.resize(layers_.size());
    }
    Matrix<S> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& layer = layers_[i];
      Matrix<S> z = affine_columns(layer.weight, layer.bias, h);
      if (cache) {
        cache->inputs[i] = std::move(h);
        cache->pre[i] = z;
      }
      h = layer.activation == Activation::relu ? Matrix<S>(z.cwiseMax(S(0))) : std::move(z);
    }
    return h;
  }

  /// Accumulates parameter gradients and returns d(loss)/d(input).
  Matrix<S> backward(const Cache& cache, const Matrix<S>& dy) {
    require_shape(cache.inputs.size() == layers_.size(), "DenseStack::backward: cache does not match stack");
    require_shape(dy.rows() == out_dim() && dy.cols() == cache.pre.back().cols(),
                  "DenseStack::backward: upstream gradient shape mismatch");
    Matrix<S> g = dy;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      auto& layer = layers_[k];
      if (layer.activation == Activation::relu) g = g.cwiseProduct((cache.pre[k].array() > S(0)).template cast<S>().matrix());
      layer.weight_grad.noalias() += g * cache.inputs[k].transpose();
      layer.bias_grad.noalias() += g.rowwise().sum();
      g = layer.weight.transpose() * g;
    }
    return g;
  }

  void zero_grad() {
    for (auto& layer : layers_) {
      layer.weight_grad.setZero();
      layer.bias_grad.setZero();
    }
  }

  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      auto& layer = layers_[i];
      out.push_back({prefix + "." + std::to_string(i) + ".weight", &layer.weight, &layer.weight_grad});
      out.push_back({prefix + "." + std::to_string(i) + ".bias", &layer.bias, &layer.bias_grad});
    }
  }

  Index parameter_count() const {
    Index n = 0;
    for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
    return n;
  }

  int in_dim() const { return widths_.front(); }
  int out_dim() const { return widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  std::vector<DenseLayer<S>>& layers() { return layers_; }
  const std::vector<DenseLayer<S>>& layers() const { return layers_; }

 private:
  std::vector<int> widths_;
  std::vector<DenseLayer<S>> layers_;
};

/// Max over consecutive runs of `group` columns. Ties go to the lowest column.
template <typename S>
Matrix<S> group_max_pool(const Matrix<S>& x, Index group, IndexMatrix* argmax) {
  require_shape(group >= 1 && x.cols() % group == 0, "group_max_pool: columns not divisible by group size");
  const Index groups = x.cols() / group;
  Matrix<S> out(x.rows(), groups);
  for (Index g = 0; g < groups; ++g) {
    const Index first = g * group;
    auto best = out.col(g).array();
    best = x.col(first).array();
    for (Index k = 1; k < group; ++k) {
      const auto xc = x.col(first + k).array();
      best = (xc > best).select(xc, best);
    }
  }
  if (argmax) {
    // First column in each group that attains the max.
    argmax->resize(x.rows(), groups);
    for (Index g = 0; g < groups; ++g) {
      for (Index r = 0; r < x.rows(); ++r) {
        Index c = g * group;
        while (x(r, c) != out(r, g)) ++c;
        (*argmax)(r, g) = c;
      }
    }
  }
  return out;
}

/// Routes each pooled gradient entry to the column that won the max.
template <typename S>
Matrix<S> group_max_pool_backward(const Matrix<S>& dy, const IndexMatrix& argmax, Index input_cols) {
  Matrix<S> dx = Matrix<S>::Zero(dy.rows(), input_cols);
  for (Index g = 0; g < dy.cols(); ++g) {
    for (Index r = 0; r < dy.rows(); ++r) dx(r, argmax(r, g)) += dy(r, g);
  }
  return dx;
}

/// Widths of the two-level grasp encoder.
struct GgnConfig {
  int input_dim = 3;
  std::array<int, 2> intra{64, 128};
  std::array<int, 2> inter{256, 256};

  int feature_dim() const { return inter[1]; }
  void validate() const {
    if (input_dim < 1 || intra[0] < 1 || intra[1] < 1 || inter[0] < 1 || inter[1] < 1) {
      throw InvalidArgument("GgnConfig: all widths must be >= 1");
    }
  }
};

/// A batch of point groups: `samples` x `groups` x `group_size` columns,
/// sample-major, then group-major.
template <typename S>
struct SetBatch {
  Matrix<S> data;
  Index samples = 0;
  Index groups = 0;
  Index group_size = 0;

  void validate(Index rows) const {
    require_shape(data.rows() == rows, "SetBatch: wrong feature rows");
    require_shape(samples >= 1 && groups >= 1 && group_size >= 1, "SetBatch: empty dimension");
    require_shape(data.cols() == samples * groups * group_size, "SetBatch: column count mismatch");
  }
};

/// Shared per-point stack, max within each grasp, shared per-grasp stack,
/// max across grasps.
template <typename S>
class GraspGroupNet {
 public:
  struct Cache {
    typename DenseStack<S>::Cache intra, inter;
    IndexMatrix pool_points, pool_grasps;
    Index input_cols = 0, grasp_cols = 0;
  };

  explicit GraspGroupNet(const GgnConfig& cfg = {})
      : cfg_((cfg.validate(), cfg)),
        intra_({cfg.input_dim, cfg.intra[0], cfg.intra[1]}, Activation::relu, Activation::relu),
        inter_({cfg.intra[1], cfg.inter[0], cfg.inter[1]}, Activation::relu, Activation::relu) {}

  void init(std::mt19937_64& rng) {
    intra_.init(rng);
    inter_.init(rng);
  }

  Matrix<S> forward(const SetBatch<S>& in, Cache* cache = nullptr) const {
    in.validate(cfg_.input_dim);
    Matrix<S> h = intra_.forward(in.data, cache ? &cache->intra : nullptr);
    Matrix<S> per_grasp = group_max_pool(h, in.group_size, cache ? &cache->pool_points : nullptr);
    Matrix<S> g = inter_.forward(per_grasp, cache ? &cache->inter : nullptr);
    if (cache) {
      cache->input_cols = h.cols();
      cache->grasp_cols = g.cols();
    }
    return group_max_pool(g, in.groups, cache ? &cache->pool_grasps : nullptr);
  }

  /// Returns the gradient with respect to the input points.
  Matrix<S> backward(const Cache& cache, const Matrix<S>& dy) {
    Matrix<S> d = group_max_pool_backward(dy, cache.pool_grasps, cache.grasp_cols);
    d = inter_.backward(cache.inter, d);
    d = group_max_pool_backward(d, cache.pool_points, cache.input_cols);
    return intra_.backward(cache.intra, d);
  }

  void zero_grad() {
    intra_.zero_grad();
    inter_.zero_grad();
  }
  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) {
    intra_.collect(prefix + ".intra", out);
    inter_.collect(prefix + ".inter", out);
  }
  Index parameter_count() const { return intra_.parameter_count() + inter_.parameter_count(); }
  int feature_dim() const { return cfg_.feature_dim(); }
  int input_dim() const { return cfg_.input_dim; }
  DenseStack<S>& intra() { return intra_; }
  DenseStack<S>& inter() { return inter_; }
  const DenseStack<S>& intra() const { return intra_; }
  const DenseStack<S>& inter() const { return inter_; }

 private:
  GgnConfig cfg_;
  DenseStack<S> intra_;
  DenseStack<S> inter_;
};

/// Flat point-set baseline: the same two stacks as GraspGroupNet but a
/// single max over every point of the sample, ignoring grasp membership.
/// With one grasp per sample it computes exactly what GraspGroupNet does.
template <typename S>
class PnFlat {
 public:
  struct Cache {
    typename DenseStack<S>::Cache pre, post;
    IndexMatrix pool;
    Index input_cols = 0;
  };

  explicit PnFlat(const GgnConfig& cfg = {})
      : cfg_((cfg.validate(), cfg)),
        pre_({cfg.input_dim, cfg.intra[0], cfg.intra[1]}, Activation::relu, Activation::relu),
        post_({cfg.intra[1], cfg.inter[0], cfg.inter[1]}, Activation::relu, Activation::relu) {}

  void init(std::mt19937_64& rng) {
    pre_.init(rng);
    post_.init(rng);
  }

  Matrix<S> forward(const SetBatch<S>& in, Cache* cache = nullptr) const {
    in.validate(cfg_.input_dim);
    Matrix<S> h = pre_.forward(in.data, cache ? &cache->pre : nullptr);
    if (cache) cache->input_cols = h.cols();
    Matrix<S> pooled = group_max_pool(h, in.groups * in.group_size, cache ? &cache->pool : nullptr);
    return post_.forward(pooled, cache ? &cache->post : nullptr);
  }

  Matrix<S> backward(const Cache& cache, const Matrix<S>& dy) {
    Matrix<S> d = post_.backward(cache.post, dy);
    d = group_max_pool_backward(d, cache.pool, cache.input_cols);
    return pre_.backward(cache.pre, d);
  }

  void zero_grad() {
    pre_.zero_grad();
    post_.zero_grad();
  }
  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) {
    pre_.collect(prefix + ".intra", out);
    post_.collect(prefix + ".inter", out);
  }
  Index parameter_count() const { return pre_.parameter_count() + post_.parameter_count(); }
  int feature_dim() const { return cfg_.feature_dim(); }
  int input_dim() const { return cfg_.input_dim; }
  DenseStack<S>& pre() { return pre_; }
  DenseStack<S>& post() { return post_; }
  const DenseStack<S>& pre() const { return pre_; }
  const DenseStack<S>& post() const { return post_; }

 private:
  GgnConfig cfg_;
  DenseStack<S> pre_;
  DenseStack<S> post_;
};

/// Per-grasp stack on 9D features followed by a max across grasps.
template <typename S>
class NineDEncoder {
 public:
  struct Cache {
    typename DenseStack<S>::Cache stack;
    IndexMatrix pool;
    Index input_cols = 0;
  };

  explicit NineDEncoder(std::array<int, 2> widths = {256, 256})
      : stack_({9, widths[0], widths[1]}, Activation::relu, Activation::relu) {}

  void init(std::mt19937_64& rng) { stack_.init(rng); }

  Matrix<S> forward(const SetBatch<S>& in, Cache* cache = nullptr) const {
    in.validate(9);
    require_shape(in.group_size == 1, "NineDEncoder: one feature column per grasp");
    Matrix<S> h = stack_.forward(in.data, cache ? &cache->stack : nullptr);
    if (cache) cache->input_cols = h.cols();
    return group_max_pool(h, in.groups, cache ? &cache->pool : nullptr);
  }

  Matrix<S> backward(const Cache& cache, const Matrix<S>& dy) {
    return stack_.backward(cache.stack, group_max_pool_backward(dy, cache.pool, cache.input_cols));
  }

  void zero_grad() { stack_.zero_grad(); }
  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) { stack_.collect(prefix + ".stack", out); }
  Index parameter_count() const { return stack_.parameter_count(); }
  int feature_dim() const { return stack_.out_dim(); }
  int input_dim() const { return 9; }
  DenseStack<S>& stack() { return stack_; }
  const DenseStack<S>& stack() const { return stack_; }

 private:
  DenseStack<S> stack_;
};

enum class EncoderKind { ggn, pn_flat, nined };

/// Runtime choice between the three set encoders.
template <typename S>
class GraspEncoder {
 public:
  using Impl = std::variant<GraspGroupNet<S>, PnFlat<S>, NineDEncoder<S>>;
  using Cache = std::variant<typename GraspGroupNet<S>::Cache, typename PnFlat<S>::Cache,
                             typename NineDEncoder<S>::Cache>;

  GraspEncoder(EncoderKind kind, const GgnConfig& cfg) : kind_(kind), impl_(make(kind, cfg)) {}

  void init(std::mt19937_64& rng) {
    std::visit([&](auto& e) { e.init(rng); }, impl_);
  }

  Matrix<S> forward(const SetBatch<S>& in, Cache* cache = nullptr) const {
    return std::visit(
        [&](const auto& e) -> Matrix<S> {
          using E = std::decay_t<decltype(e)>;
          if (!cache) return e.forward(in, nullptr);
          *cache = typename E::Cache{};
          return e.forward(in, &std::get<typename E::Cache>(*cache));
        },
        impl_);
  }

  Matrix<S> backward(const Cache& cache, const Matrix<S>& dy) {
    return std::visit(
        [&](auto& e) -> Matrix<S> {
          using E = std::decay_t<decltype(e)>;
          return e.backward(std::get<typename E::Cache>(cache), dy);
        },
        impl_);
  }

  void zero_grad() {
    std::visit([](auto& e) { e.zero_grad(); }, impl_);
  }
  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) {
    std::visit([&](auto& e) { e.collect(prefix, out); }, impl_);
  }
  Index parameter_count() const {
    return std::visit([](const auto& e) { return e.parameter_count(); }, impl_);
  }
  int feature_dim() const {
    return std::visit([](const auto& e) { return e.feature_dim(); }, impl_);
  }
  int input_dim() const {
    return std::visit([](const auto& e) { return e.input_dim(); }, impl_);
  }
  EncoderKind kind() const { return kind_; }
  Impl& impl() { return impl_; }

 private:
  static Impl make(EncoderKind kind, const GgnConfig& cfg) {
    switch (kind) {
      case EncoderKind::ggn: return GraspGroupNet<S>(cfg);
      case EncoderKind::pn_flat: return PnFlat<S>(cfg);
      case EncoderKind::nined: return NineDEncoder<S>(cfg.inter);
    }
    throw InvalidArgument("GraspEncoder: unknown kind");
  }

  EncoderKind kind_;
  Impl impl_;
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

struct HeadsConfig {
  int feature_dim = 256;
  int state_dim = 9;
  int action_dim = 7;
  std::vector<int> hidden{256, 256};
  int aux_hidden = 64;
};

/// Actor, twin critics and the two auxiliary heads on top of [feature; state].
template <typename S>
class PolicyHeads {
 public:
  struct Output {
    Matrix<S> mean, log_std;  // action_dim x B
    Matrix<S> q1, q2;         // 1 x B
    Matrix<S> stage_logits;   // 3 x B
    Matrix<S> goal;           // 7 x B; rows 3..6 form a unit quaternion (w, x, y, z)
  };
  struct Cache {
    typename DenseStack<S>::Cache actor, critic1, critic2, stage, goal;
    Matrix<S> actor_raw, goal_raw;
  };
  struct Upstream {
    Matrix<S> mean, log_std, q1, q2, stage_logits, goal;
  };
  struct InputGrads {
    Matrix<S> feature, state, action;
  };

  explicit PolicyHeads(const HeadsConfig& cfg = {})
      : cfg_(cfg),
        actor_(widths(cfg.feature_dim + cfg.state_dim, cfg.hidden, 2 * cfg.action_dim)),
        critic1_(widths(cfg.feature_dim + cfg.state_dim + cfg.action_dim, cfg.hidden, 1)),
        critic2_(widths(cfg.feature_dim + cfg.state_dim + cfg.action_dim, cfg.hidden, 1)),
        stage_({cfg.feature_dim + cfg.state_dim, cfg.aux_hidden, 3}),
        goal_({cfg.feature_dim + cfg.state_dim, cfg.aux_hidden, 7}) {}

  void init(std::mt19937_64& rng) {
    actor_.init(rng);
    critic1_.init(rng);
    critic2_.init(rng);
    stage_.init(rng);
    goal_.init(rng);
  }

  Output forward(const Matrix<S>& feature, const Matrix<S>& state, const Matrix<S>& action, Cache* cache = nullptr) const {
    require_shape(feature.rows() == cfg_.feature_dim && state.rows() == cfg_.state_dim &&
                      action.rows() == cfg_.action_dim,
                  "PolicyHeads::forward: input widths do not match config");
    require_shape(feature.cols() == state.cols() && state.cols() == action.cols(),
                  "PolicyHeads::forward: batch sizes differ");
    const Matrix<S> trunk = concat_rows(feature, state);
    const Matrix<S> critic_in = concat_rows(trunk, action);
    Output out;
    Matrix<S> raw = actor_.forward(trunk, cache ? &cache->actor : nullptr);
    out.mean = raw.topRows(cfg_.action_dim);
    out.log_std = raw.bottomRows(cfg_.action_dim).cwiseMax(S(kLogStdMin)).cwiseMin(S(kLogStdMax));
    out.q1 = critic1_.forward(critic_in, cache ? &cache->critic1 : nullptr);
    out.q2 = critic2_.forward(critic_in, cache ? &cache->critic2 : nullptr);
    out.stage_logits = stage_.forward(trunk, cache ? &cache->stage : nullptr);
    Matrix<S> goal_raw = goal_.forward(trunk, cache ? &cache->goal : nullptr);
    out.goal = normalize_goal(goal_raw);
    if (cache) {
      cache->actor_raw = std::move(raw);
      cache->goal_raw = std::move(goal_raw);
    }
    return out;
  }

  /// Any empty upstream block is treated as zero.
  InputGrads backward(const Cache& cache, const Upstream& up) {
    const Index batch = cache.actor_raw.cols();
    const int trunk_dim = cfg_.feature_dim + cfg_.state_dim;
    Matrix<S> d_trunk = Matrix<S>::Zero(trunk_dim, batch);
    Matrix<S> d_action = Matrix<S>::Zero(cfg_.action_dim, batch);

    if (up.mean.size() || up.log_std.size()) {
      Matrix<S> d_raw = Matrix<S>::Zero(2 * cfg_.action_dim, batch);
      if (up.mean.size()) d_raw.topRows(cfg_.action_dim) = up.mean;
      if (up.log_std.size()) {
        d_raw.bottomRows(cfg_.action_dim) = log_std_clamp_backward(cache.actor_raw.bottomRows(cfg_.action_dim), up.log_std);
      }
      d_trunk += actor_.backward(cache.actor, d_raw);
    }
    auto critic_back = [&](DenseStack<S>& critic, const typename DenseStack<S>::Cache& c, const Matrix<S>& dq) {
      if (!dq.size()) return;
      const Matrix<S> d = critic.backward(c, dq);
      d_trunk += d.topRows(trunk_dim);
      d_action += d.bottomRows(cfg_.action_dim);
    };
    critic_back(critic1_, cache.critic1, up.q1);
    critic_back(critic2_, cache.critic2, up.q2);
    if (up.stage_logits.size()) d_trunk += stage_.backward(cache.stage, up.stage_logits);
    if (up.goal.size()) d_trunk += goal_.backward(cache.goal, normalize_goal_backward(cache.goal_raw, up.goal));

    return {d_trunk.topRows(cfg_.feature_dim), d_trunk.bottomRows(cfg_.state_dim), d_action};
  }

  void zero_grad() {
    for (auto* s : {&actor_, &critic1_, &critic2_, &stage_, &goal_}) s->zero_grad();
  }
  void collect(const std::string& prefix, std::vector<ParamRef<S>>& out) {
    actor_.collect(prefix + ".actor", out);
    critic1_.collect(prefix + ".critic1", out);
    critic2_.collect(prefix + ".critic2", out);
    stage_.collect(prefix + ".stage", out);
    goal_.collect(prefix + ".goal", out);
  }

  const HeadsConfig& config() const { return cfg_; }
  DenseStack<S>& actor() { return actor_; }
  DenseStack<S>& critic1() { return critic1_; }
  DenseStack<S>& critic2() { return critic2_; }
  DenseStack<S>& stage() { return stage_; }
  DenseStack<S>& goal() { return goal_; }
  const DenseStack<S>& actor() const { return actor_; }
  const DenseStack<S>& critic1() const { return critic1_; }
  const DenseStack<S>& critic2() const { return critic2_; }
  const DenseStack<S>& stage() const { return stage_; }
  const DenseStack<S>& goal() const { return goal_; }

  static Matrix<S> concat_rows(const Matrix<S>& a, const Matrix<S>& b) {
    Matrix<S> out(a.rows() + b.rows(), a.cols());
    out.topRows(a.rows()) = a;
    out.bottomRows(b.rows()) = b;
    return out;
  }

  /// Rows 0..2 pass through; rows 3..6 are scaled to unit norm.
  static Matrix<S> normalize_goal(const Matrix<S>& raw) {
    Matrix<S> out = raw;
    for (Index c = 0; c < raw.cols(); ++c) {
      const S n = raw.col(c).template segment<4>(3).norm();
      out.col(c).template segment<4>(3) /= n;
    }
    return out;
  }

  static Matrix<S> normalize_goal_backward(const Matrix<S>& raw, const Matrix<S>& dy) {
    Matrix<S> dx = dy;
    for (Index c = 0; c < raw.cols(); ++c) {
      const auto v = raw.col(c).template segment<4>(3);
      const S n = v.norm();
      const Eigen::Matrix<S, 4, 1> q = v / n;
      const Eigen::Matrix<S, 4, 1> g = dy.col(c).template segment<4>(3);
      dx.col(c).template segment<4>(3) = (g - q * q.dot(g)) / n;
    }
    return dx;
  }

  static Matrix<S> log_std_clamp_backward(const Matrix<S>& raw, const Matrix<S>& dy) {
    const auto inside = (raw.array() >= S(kLogStdMin) && raw.array() <= S(kLogStdMax)).template cast<S>();
    return (dy.array() * inside).matrix();
  }

 private:
  static std::vector<int> widths(int in, const std::vector<int>& hidden, int out) {
    std::vector<int> w{in};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(out);
    return w;
  }

  HeadsConfig cfg_;
  DenseStack<S> actor_, critic1_, critic2_, stage_, goal_;
};

/// Adam over a fixed list of parameters.
template <typename S>
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<ParamRef<S>> params, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const auto& p : params_) {
      m_.push_back(Matrix<S>::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Matrix<S>::Zero(p.value->rows(), p.value->cols()));
    }
  }

  void step() {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const S step_size = static_cast<S>(lr_ * std::sqrt(c2) / c1);
    const S b1 = static_cast<S>(beta1_), b2 = static_cast<S>(beta2_);
    const S eps = static_cast<S>(eps_ * std::sqrt(c2));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& g = *params_[i].grad;
      m_[i] = b1 * m_[i] + (S(1) - b1) * g;
      v_[i] = b2 * v_[i] + (S(1) - b2) * g.cwiseAbs2();
      params_[i].value->array() -= step_size * m_[i].array() / (v_[i].array().sqrt() + eps);
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.grad->setZero();
  }

  std::vector<ParamRef<S>>& params() { return params_; }
  std::vector<Matrix<S>>& first_moments() { return m_; }
  std::vector<Matrix<S>>& second_moments() { return v_; }
  long long& steps() { return t_; }
  long long steps() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  std::vector<ParamRef<S>> params_;
  std::vector<Matrix<S>> m_, v_;
  long long t_ = 0;
  double lr_ = 3e-4, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
};

/// target <- tau * online + (1 - tau) * target, parameter by parameter.
template <typename S>
void soft_update(const std::vector<ParamRef<S>>& online, const std::vector<ParamRef<S>>& target, double tau) {
  require_shape(online.size() == target.size(), "soft_update: parameter lists differ");
  for (std::size_t i = 0; i < online.size(); ++i) {
    if (tau == 1.0) {
      *target[i].value = *online[i].value;
    } else {
      *target[i].value = static_cast<S>(tau) * *online[i].value + static_cast<S>(1.0 - tau) * *target[i].value;
    }
  }
}

}  // namespace dyngrasp::nets
