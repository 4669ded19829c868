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

#include "dyngrasp/check/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dyngrasp/check/gradcheck.hpp"
#include "dyngrasp/check/oracles.hpp"
#include "dyngrasp/cloud.hpp"
#include "dyngrasp/grasp.hpp"
#include "dyngrasp/nets.hpp"
#include "dyngrasp/trajectory.hpp"

namespace dyngrasp::testing {
namespace {

Quat<double> random_unit_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Quat<double>(n(rng), n(rng), n(rng), n(rng)).normalized();
}

Vec3<double> random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

/// Collects failures; the check passes when none were recorded.
class Tally {
 public:
  explicit Tally(std::string name) : start_(std::chrono::steady_clock::now()) { result_.name = std::move(name); }

  void expect(bool ok, const std::string& what) {
    ++checked_;
    if (ok) return;
    if (failures_++ < 3) detail_ << what << "; ";
  }

  CheckResult finish() {
    result_.passed = failures_ == 0;
    std::ostringstream d;
    d << checked_ - failures_ << "/" << checked_ << " assertions";
    if (failures_) d << "; " << detail_.str();
    result_.detail = d.str();
    result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return result_;
  }

 private:
  CheckResult result_;
  std::chrono::steady_clock::time_point start_;
  long checked_ = 0, failures_ = 0;
  std::ostringstream detail_;
};

}  // namespace

CheckResult check_quaternion_metric(std::uint64_t seed) {
  Tally t("quaternion metric");
  std::mt19937_64 rng(seed);
  const Quat<double> id = Quat<double>::Identity();
  t.expect(quat_rotational_distance(id, id) == 0.0, "identity distance not 0");
  const Quat<double> quarter(Eigen::AngleAxisd(M_PI / 2, Vec3<double>::UnitZ()));
  t.expect(std::abs(quat_rotational_distance(id, quarter) - (1.0 - std::sqrt(0.5))) < 1e-15, "quarter turn");
  const Quat<double> half(Eigen::AngleAxisd(M_PI, Vec3<double>::UnitX()));
  t.expect(std::abs(quat_rotational_distance(id, half) - 1.0) < 1e-15, "half turn not 1");
  for (int i = 0; i < 10000; ++i) {
    const Quat<double> a = random_unit_quat(rng), b = random_unit_quat(rng);
    const double d = quat_rotational_distance(a, b);
    t.expect(d >= 0.0 && d <= 1.0, "out of [0, 1]");
    t.expect(d == quat_rotational_distance(b, a), "not symmetric");
    const Quat<double> neg(-b.w(), -b.x(), -b.y(), -b.z());
    t.expect(d == quat_rotational_distance(a, neg), "double cover");
    t.expect(std::abs(quat_rotational_distance(a, a)) < 1e-15, "self distance");
  }
  return t.finish();
}

CheckResult check_grasp_distance(std::uint64_t seed) {
  Tally t("grasp-set distance");
  std::mt19937_64 rng(seed);
  const Quat<double> q = random_unit_quat(rng);
  const GraspSet one(Frame::world, {Grasp(Posed(Vec3<double>(0.3, 0.1, 0.2), q), 0.05)});
  const double shifted = grasp_set_distance(one, Posed(Vec3<double>(0.4, 0.1, 0.2), q)).distance;
  t.expect(std::abs(shifted - 0.01) < 1e-15, "0.1 m offset does not give 0.01");
  t.expect(grasp_set_distance(one, one[0].pose).distance == 0.0, "coincident grasp not 0");
  for (int i = 0; i < 1000; ++i) {
    std::uniform_int_distribution<int> size(1, 12);
    GraspSet set(Frame::world);
    const int n = size(rng);
    for (int j = 0; j < n; ++j) set.grasps.emplace_back(Posed(random_point(rng, 0.5), random_unit_quat(rng)), 0.05);
    if (i % 10 == 0) set.grasps.push_back(set.grasps.front());
    const Posed ee(random_point(rng, 0.5), random_unit_quat(rng));
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < set.size(); ++j) {
      const double dp = (set[j].pose.position - ee.position).squaredNorm();
      const double dq = 1.0 - std::min(1.0, std::abs(set[j].pose.orientation.dot(ee.orientation)));
      if (dp + dq < best) {
        best = dp + dq;
        arg = j;
      }
    }
    const GraspDistance got = grasp_set_distance(set, ee);
    t.expect(std::abs(got.distance - best) < 1e-14, "minimum differs from brute force");
    t.expect(got.index == arg, "argmin is not the lowest index");
  }
  return t.finish();
}

CheckResult check_bezier(std::uint64_t seed) {
  Tally t("bezier");
  std::mt19937_64 rng(seed);
  const std::vector<Vec3<double>> cubic{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}};
  const Vec3<double> mid = bezier_eval(cubic, 0.5);
  t.expect((mid - Vec3<double>(0.5, 0.75, 0.0)).norm() < 1e-15, "cubic midpoint is not (0.5, 0.75)");
  t.expect((bezier_eval(cubic, 0.0) - cubic.front()).norm() == 0.0, "start point");
  t.expect((bezier_eval(cubic, 1.0) - cubic.back()).norm() == 0.0, "end point");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    std::vector<Vec3<double>> control;
    const int n = 2 + i % 6;
    for (int k = 0; k < n; ++k) control.push_back(random_point(rng, 1.0));
    const double s = u(rng);
    t.expect((bezier_eval(control, s) - bernstein_bezier(control, s)).norm() < 1e-12, "differs from Bernstein form");
  }
  return t.finish();
}

CheckResult check_fps(std::uint64_t seed, int clouds) {
  Tally t("farthest point sampling");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> size(1, 64);
  for (int i = 0; i < clouds; ++i) {
    const Index n = size(rng);
    PointCloud p(3, n);
    for (Index k = 0; k < n; ++k) p.col(k) = random_point(rng, 1.0);
    std::uniform_int_distribution<Index> first(0, n - 1);
    const Index s = first(rng);
    const auto full = farthest_point_sampling(p, n, s);
    t.expect(full == brute_force_fps(p, n, s), "differs from brute force");
    for (Index m = 1; m <= n; m += std::max<Index>(1, n / 7)) {
      const auto prefix = farthest_point_sampling(p, m, s);
      t.expect(std::equal(prefix.begin(), prefix.end(), full.begin()), "not a greedy prefix");
    }
  }
  return t.finish();
}

CheckResult check_ball_query(std::uint64_t seed, int clouds) {
  Tally t("ball query");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> size(1, 256);
  std::uniform_real_distribution<double> radius(0.05, 0.6);
  for (int i = 0; i < clouds; ++i) {
    const Index n = size(rng);
    PointCloud p(3, n);
    for (Index k = 0; k < n; ++k) p.col(k) = random_point(rng, 1.0);
    PointCloud centers(3, 4);
    for (Index c = 0; c < 4; ++c) centers.col(c) = random_point(rng, 1.0);
    const double r = radius(rng);
    const Index m = 1 + i % 32;
    const auto regions = ball_query(p, centers, r, m);
    for (Index c = 0; c < 4; ++c) {
      const auto expected = brute_force_ball(p, centers.col(c), r, m);
      const Region& got = regions[static_cast<std::size_t>(c)];
      t.expect(got.empty() ? expected.empty() : got.indices == expected, "differs from brute force");
    }
  }
  return t.finish();
}

std::vector<CheckResult> check_gradients(std::uint64_t seed, int draws) {
  std::vector<CheckResult> out;
  for (const auto& [name, factory] : all_probes()) {
    const auto start = std::chrono::steady_clock::now();
    const GradCheckResult r = run_gradcheck(factory, draws, seed);
    CheckResult c;
    c.name = "gradient " + name;
    c.passed = r.draws >= draws && r.max_relative_error < 1e-4;
    std::ostringstream d;
    d << "max relative error " << r.max_relative_error << " over " << r.draws << " draws (" << r.rejected
      << " near-kink draws redrawn)";
    c.detail = d.str();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(c);
  }
  return out;
}

CheckResult check_ggn_invariance(std::uint64_t seed, int inputs) {
  Tally t("grasp group net invariance");
  std::mt19937_64 rng(seed);
  nets::GraspGroupNet<float> net{nets::GgnConfig{}};
  net.init(rng);
  std::uniform_int_distribution<Index> groups(1, 12), size(1, 24);
  std::normal_distribution<float> normal(0.0f, 0.05f);
  for (int i = 0; i < inputs; ++i) {
    const Index n = groups(rng), l = size(rng);
    nets::Matrix<float> x(3, n * l);
    for (Index k = 0; k < x.size(); ++k) x.data()[k] = normal(rng);
    const nets::Matrix<float> base = net.forward({x, 1, n, l});

    nets::Matrix<float> intra = x;
    for (Index g = 0; g < n; ++g) {
      std::vector<Index> perm(static_cast<std::size_t>(l));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (Index k = 0; k < l; ++k) intra.col(g * l + k) = x.col(g * l + perm[static_cast<std::size_t>(k)]);
    }
    t.expect(net.forward({intra, 1, n, l}) == base, "intra-grasp permutation changed the output");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    nets::Matrix<float> inter(3, n * l);
    for (Index g = 0; g < n; ++g) inter.middleCols(g * l, l) = x.middleCols(order[static_cast<std::size_t>(g)] * l, l);
    t.expect(net.forward({inter, 1, n, l}) == base, "inter-grasp permutation changed the output");

    std::uniform_int_distribution<Index> pick(0, n - 1);
    nets::Matrix<float> dup(3, (n + 1) * l);
    dup.leftCols(n * l) = x;
    dup.rightCols(l) = x.middleCols(pick(rng) * l, l);
    t.expect(net.forward({dup, 1, n + 1, l}) == base, "grasp duplication changed the output");
  }
  return t.finish();
}

CheckResult check_explorer_tracking(std::uint64_t seed, int seeds) {
  Tally t("explorer tracking");
  const ExplorerParams params;
  const WorkspaceBox ws{{-2.0, -2.0, -0.5}, {2.0, 2.0, 1.0}};
  constexpr double kReach = 0.05;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937_64 rng(seed * 1000 + static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const double a = angle(rng);
    const Vec3<double> velocity(0.01 * std::cos(a), 0.01 * std::sin(a), 0.0);
    Vec3<double> center = Vec3<double>(0.0, 0.0, 0.1) - 50.0 * velocity;
    std::normal_distribution<double> noise(0.0, 0.002);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto sample = [&]() {
      PointCloud p(3, 300);
      for (Index k = 0; k < p.cols(); ++k) {
        Vec3<double> d;
        do d = Vec3<double>(u(rng), u(rng), u(rng));
        while (d.squaredNorm() > 1.0);
        p.col(k) = center + 0.02 * d + Vec3<double>(noise(rng), noise(rng), noise(rng));
      }
      return p;
    };
    RegionCenters c = explorer_init(sample(), ws, params);
    for (int step = 0; step < 100; ++step) {
      center += velocity;
      const PointCloud p = sample();
      c = explorer_step(c, p, params, ws);
      const Vec3<double> centroid = p.rowwise().mean();
      double nearest = std::numeric_limits<double>::infinity();
      for (Index k = 0; k < c.size(); ++k) nearest = std::min(nearest, (c.centers.col(k) - centroid).norm());
      t.expect(nearest <= kReach, "seed " + std::to_string(s) + " step " + std::to_string(step) + " lost the cluster");
    }
  }
  return t.finish();
}

std::vector<CheckResult> run_selfcheck(std::uint64_t seed) {
  std::vector<CheckResult> out{check_quaternion_metric(seed), check_grasp_distance(seed), check_bezier(seed),
                               check_fps(seed), check_ball_query(seed)};
  for (auto& g : check_gradients(seed)) out.push_back(std::move(g));
  out.push_back(check_ggn_invariance(seed));
  out.push_back(check_explorer_tracking(seed));
  return out;
}

}  // namespace dyngrasp::testing
