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

#include "dyngrasp/check/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dyngrasp::testing {

using Eigen::Index;

std::vector<Index> brute_force_fps(const Cloud& points, Index n, Index seed) {
  std::vector<Index> chosen{seed};
  const Index target = std::min<Index>(n, points.cols());
  while (static_cast<Index>(chosen.size()) < target) {
    Index best = -1;
    double best_score = -1.0;
    for (Index i = 0; i < points.cols(); ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (Index c : chosen) nearest = std::min(nearest, (points.col(i) - points.col(c)).squaredNorm());
      if (nearest > best_score) {
        best_score = nearest;
        best = i;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

std::vector<Index> brute_force_ball(const Cloud& points, const Eigen::Vector3d& center, double radius, Index m) {
  std::vector<Index> inside;
  for (Index i = 0; i < points.cols(); ++i) {
    if ((points.col(i) - center).squaredNorm() <= radius * radius) inside.push_back(i);
  }
  if (inside.empty()) return {};
  if (static_cast<Index>(inside.size()) > m) inside.resize(static_cast<std::size_t>(m));
  Index nearest = inside.front();
  for (Index i : inside) {
    if ((points.col(i) - center).squaredNorm() < (points.col(nearest) - center).squaredNorm()) nearest = i;
  }
  inside.resize(static_cast<std::size_t>(m), nearest);
  return inside;
}

Eigen::Vector3d bernstein_bezier(const std::vector<Eigen::Vector3d>& control, double t) {
  const int n = static_cast<int>(control.size()) - 1;
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  double binom = 1.0;
  for (int i = 0; i <= n; ++i) {
    out += binom * std::pow(t, i) * std::pow(1.0 - t, n - i) * control[static_cast<std::size_t>(i)];
    binom = binom * (n - i) / (i + 1);
  }
  return out;
}

Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                   double eps) {
  Eigen::VectorXd g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = f(x);
    x[i] = saved - eps;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric, double floor) {
  if (analytic.size() == 0) return 0.0;
  const double scale = std::max({analytic.cwiseAbs().maxCoeff(), numeric.cwiseAbs().maxCoeff(), floor});
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

}  // namespace dyngrasp::testing
