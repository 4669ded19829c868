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

#include "dyngrasp/check/gradcheck.hpp"

#include <algorithm>
#include <limits>

#include "dyngrasp/check/oracles.hpp"

namespace dyngrasp::testing {
namespace {

using nets::DenseStack;
using nets::SetBatch;
using Eigen::Index;

constexpr double kInf = std::numeric_limits<double>::infinity();

MatD uniform(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatD m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

double weighted_sum(const MatD& y, const MatD& r) { return y.cwiseProduct(r).sum(); }

/// Collects parameter tensors of a module plus extra input tensors.
template <typename Module>
void register_params(Module& m, GradProbe& p) {
  std::vector<nets::ParamRef<double>> refs;
  m.collect("m", refs);
  for (auto& r : refs) {
    p.values.push_back(r.value);
    p.grads.push_back(r.grad);
  }
}

struct SetState {
  SetBatch<double> batch;
  MatD batch_grad, upstream;
};

template <typename Net>
ProbeFactory set_probe(std::function<Net()> build, Index rows, Index groups, Index group_size, Index samples,
                       std::function<double(const Net&, const typename Net::Cache&, const SetBatch<double>&)> margin) {
  return [=](std::mt19937_64& rng) {
    struct State {
      Net net;
      SetState s;
    };
    auto st = std::make_shared<State>(State{build(), {}});
    st->net.init(rng);
    st->s.batch = {uniform(rng, rows, samples * groups * group_size), samples, groups, group_size};
    st->s.upstream = uniform(rng, st->net.feature_dim(), samples);
    st->s.batch_grad = MatD::Zero(rows, st->s.batch.data.cols());
    GradProbe p;
    register_params(st->net, p);
    p.values.push_back(&st->s.batch.data);
    p.grads.push_back(&st->s.batch_grad);
    p.loss = [st] { return weighted_sum(st->net.forward(st->s.batch), st->s.upstream); };
    p.analytic = [st] {
      st->net.zero_grad();
      typename Net::Cache cache;
      st->net.forward(st->s.batch, &cache);
      st->s.batch_grad = st->net.backward(cache, st->s.upstream);
    };
    p.margin = [st, margin] {
      typename Net::Cache cache;
      st->net.forward(st->s.batch, &cache);
      return margin(st->net, cache, st->s.batch);
    };
    p.owner = st;
    return p;
  };
}

MatD relu_out(const DenseStack<double>::Cache& c) { return c.pre.back().cwiseMax(0.0); }

}  // namespace

double pool_gap(const MatD& x, Index group) {
  double gap = kInf;
  for (Index g = 0; g < x.cols() / group; ++g) {
    for (Index r = 0; r < x.rows(); ++r) {
      double first = -kInf, second = -kInf;
      for (Index k = 0; k < group; ++k) {
        const double v = x(r, g * group + k);
        if (v > first) {
          second = first;
          first = v;
        } else if (v > second) {
          second = v;
        }
      }
      if (first > 0.0 && group > 1) gap = std::min(gap, first - second);
    }
  }
  return gap;
}

double relu_margin(const DenseStack<double>::Cache& cache, const DenseStack<double>& stack) {
  double m = kInf;
  for (std::size_t i = 0; i < cache.pre.size(); ++i) {
    if (stack.layers()[i].activation == nets::Activation::relu) m = std::min(m, cache.pre[i].cwiseAbs().minCoeff());
  }
  return m;
}

double probe_relative_error(GradProbe& probe, double eps) {
  probe.analytic();
  Index total = 0;
  for (auto* g : probe.grads) total += g->size();
  Eigen::VectorXd analytic(total), numeric(total);
  Index k = 0;
  for (std::size_t t = 0; t < probe.values.size(); ++t) {
    MatD& v = *probe.values[t];
    for (Index i = 0; i < v.size(); ++i, ++k) {
      analytic[k] = probe.grads[t]->data()[i];
      const double saved = v.data()[i];
      v.data()[i] = saved + eps;
      const double up = probe.loss();
      v.data()[i] = saved - eps;
      const double down = probe.loss();
      v.data()[i] = saved;
      numeric[k] = (up - down) / (2.0 * eps);
    }
  }
  return max_relative_error(analytic, numeric);
}

GradCheckResult run_gradcheck(const ProbeFactory& make, int draws, std::uint64_t seed, double eps,
                              double min_margin) {
  std::mt19937_64 rng(seed);
  GradCheckResult result;
  while (result.draws < draws) {
    GradProbe probe = make(rng);
    if (probe.margin() < min_margin) {
      ++result.rejected;
      if (result.rejected > 50 * draws) break;
      continue;
    }
    result.max_relative_error = std::max(result.max_relative_error, probe_relative_error(probe, eps));
    ++result.draws;
  }
  return result;
}

ProbeFactory dense_probe() {
  return [](std::mt19937_64& rng) {
    struct State {
      DenseStack<double> stack{{4, 6, 5, 3}};
      MatD x, x_grad, upstream;
    };
    auto st = std::make_shared<State>();
    st->stack.init(rng);
    st->x = uniform(rng, 4, 5);
    st->x_grad = MatD::Zero(4, 5);
    st->upstream = uniform(rng, 3, 5);
    GradProbe p;
    register_params(st->stack, p);
    p.values.push_back(&st->x);
    p.grads.push_back(&st->x_grad);
    p.loss = [st] { return weighted_sum(st->stack.forward(st->x), st->upstream); };
    p.analytic = [st] {
      st->stack.zero_grad();
      DenseStack<double>::Cache c;
      st->stack.forward(st->x, &c);
      st->x_grad = st->stack.backward(c, st->upstream);
    };
    p.margin = [st] {
      DenseStack<double>::Cache c;
      st->stack.forward(st->x, &c);
      return relu_margin(c, st->stack);
    };
    p.owner = st;
    return p;
  };
}

namespace {
const nets::GgnConfig kSmallGgn{3, {5, 6}, {6, 4}};
}

ProbeFactory ggn_probe() {
  using Net = nets::GraspGroupNet<double>;
  return set_probe<Net>(
      [] { return Net(kSmallGgn); }, 3, 3, 4, 2,
      [](const Net& net, const Net::Cache& c, const SetBatch<double>& b) {
        return std::min({relu_margin(c.intra, net.intra()), relu_margin(c.inter, net.inter()),
                         pool_gap(relu_out(c.intra), b.group_size), pool_gap(relu_out(c.inter), b.groups)});
      });
}

ProbeFactory pn_flat_probe() {
  using Net = nets::PnFlat<double>;
  return set_probe<Net>(
      [] { return Net(kSmallGgn); }, 3, 3, 4, 2,
      [](const Net& net, const Net::Cache& c, const SetBatch<double>& b) {
        return std::min({relu_margin(c.pre, net.pre()), relu_margin(c.post, net.post()),
                         pool_gap(relu_out(c.pre), b.groups * b.group_size)});
      });
}

ProbeFactory nined_probe() {
  using Net = nets::NineDEncoder<double>;
  return set_probe<Net>(
      [] { return Net({6, 4}); }, 9, 4, 1, 2,
      [](const Net& net, const Net::Cache& c, const SetBatch<double>& b) {
        return std::min(relu_margin(c.stack, net.stack()), pool_gap(relu_out(c.stack), b.groups));
      });
}

ProbeFactory heads_probe() {
  return [](std::mt19937_64& rng) {
    using Heads = nets::PolicyHeads<double>;
    struct State {
      Heads heads{nets::HeadsConfig{4, 3, 7, {5}, 4}};
      MatD feature, state, action, d_feature, d_state, d_action;
      Heads::Upstream up;
    };
    auto st = std::make_shared<State>();
    st->heads.init(rng);
    const Index b = 3;
    st->feature = uniform(rng, 4, b);
    st->state = uniform(rng, 3, b);
    st->action = uniform(rng, 7, b);
    st->d_feature = MatD::Zero(4, b);
    st->d_state = MatD::Zero(3, b);
    st->d_action = MatD::Zero(7, b);
    st->up = {uniform(rng, 7, b), uniform(rng, 7, b), uniform(rng, 1, b),
              uniform(rng, 1, b), uniform(rng, 3, b), uniform(rng, 7, b)};
    GradProbe p;
    register_params(st->heads, p);
    for (auto [v, g] : {std::pair{&st->feature, &st->d_feature}, std::pair{&st->state, &st->d_state},
                        std::pair{&st->action, &st->d_action}}) {
      p.values.push_back(v);
      p.grads.push_back(g);
    }
    p.loss = [st] {
      const auto o = st->heads.forward(st->feature, st->state, st->action);
      return weighted_sum(o.mean, st->up.mean) + weighted_sum(o.log_std, st->up.log_std) +
             weighted_sum(o.q1, st->up.q1) + weighted_sum(o.q2, st->up.q2) +
             weighted_sum(o.stage_logits, st->up.stage_logits) + weighted_sum(o.goal, st->up.goal);
    };
    p.analytic = [st] {
      st->heads.zero_grad();
      Heads::Cache c;
      st->heads.forward(st->feature, st->state, st->action, &c);
      const auto g = st->heads.backward(c, st->up);
      st->d_feature = g.feature;
      st->d_state = g.state;
      st->d_action = g.action;
    };
    p.margin = [st] {
      Heads::Cache c;
      st->heads.forward(st->feature, st->state, st->action, &c);
      double m = std::min({relu_margin(c.actor, st->heads.actor()), relu_margin(c.critic1, st->heads.critic1()),
                           relu_margin(c.critic2, st->heads.critic2()), relu_margin(c.stage, st->heads.stage()),
                           relu_margin(c.goal, st->heads.goal())});
      const auto log_std = c.actor_raw.bottomRows(7).array();
      m = std::min({m, (log_std - nets::kLogStdMin).abs().minCoeff(), (log_std - nets::kLogStdMax).abs().minCoeff()});
      for (Index k = 0; k < c.goal_raw.cols(); ++k) m = std::min(m, c.goal_raw.col(k).segment<4>(3).norm());
      return m;
    };
    p.owner = st;
    return p;
  };
}

std::vector<std::pair<std::string, ProbeFactory>> all_probes() {
  return {{"dense", dense_probe()},     {"ggn", ggn_probe()},     {"pn_flat", pn_flat_probe()},
          {"nined", nined_probe()},     {"heads", heads_probe()}};
}

}  // namespace dyngrasp::testing
