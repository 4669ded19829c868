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

#include "dyngrasp/cloud.hpp"

#include <algorithm>
#include <limits>

namespace dyngrasp {

WorkspaceBox::WorkspaceBox(const Vec3<double>& lo, const Vec3<double>& hi) : min_corner(lo), max_corner(hi) {
  if (!(lo.array() < hi.array()).all()) throw InvalidArgument("WorkspaceBox: min must be < max componentwise");
}

void ExplorerParams::validate() const {
  if (!(radius > 0.0) || points_per_region < 1 || tracked < 1 || complement < 1 || !(stale_distance > 0.0)) {
    throw InvalidArgument("ExplorerParams: all parameters must be positive");
  }
}

PointCloud gather(const PointCloud& points, const std::vector<Index>& indices) {
  PointCloud out(3, static_cast<Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) out.col(static_cast<Index>(i)) = points.col(indices[i]);
  return out;
}

PointCloud workspace_filter(const PointCloud& points, const WorkspaceBox& ws) {
  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(points.cols()));
  for (Index i = 0; i < points.cols(); ++i) {
    if (ws.contains(points.col(i))) keep.push_back(i);
  }
  return gather(points, keep);
}

std::vector<Index> farthest_point_sampling(const PointCloud& points, Index n, Index seed_index) {
  const Index count = points.cols();
  if (count == 0) throw EmptySetError("farthest_point_sampling: empty cloud");
  if (seed_index < 0 || seed_index >= count) throw InvalidArgument("farthest_point_sampling: seed index out of range");
  const Index picks = std::clamp<Index>(n, 0, count);
  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(picks));
  if (picks == 0) return chosen;

  Eigen::VectorXd min_dist = Eigen::VectorXd::Constant(count, std::numeric_limits<double>::infinity());
  Index current = seed_index;
  for (Index k = 0; k < picks; ++k) {
    chosen.push_back(current);
    const Vec3<double> c = points.col(current);
    Index best = 0;
    double best_dist = -1.0;
    for (Index i = 0; i < count; ++i) {
      const double d = (points.col(i) - c).squaredNorm();
      if (d < min_dist[i]) min_dist[i] = d;
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    current = best;
  }
  return chosen;
}

std::vector<Index> farthest_point_sampling(const PointCloud& points, Index n, std::mt19937_64& rng) {
  if (points.cols() == 0) throw EmptySetError("farthest_point_sampling: empty cloud");
  std::uniform_int_distribution<Index> pick(0, points.cols() - 1);
  return farthest_point_sampling(points, n, pick(rng));
}

std::vector<Region> ball_query(const PointCloud& points, const PointCloud& centers, double radius,
                               Index max_points) {
  if (!(radius > 0.0)) throw InvalidArgument("ball_query: radius must be positive");
  if (max_points < 1) throw InvalidArgument("ball_query: M must be positive");
  const double r2 = radius * radius;
  std::vector<Region> regions(static_cast<std::size_t>(centers.cols()));
  for (Index c = 0; c < centers.cols(); ++c) {
    Region& region = regions[static_cast<std::size_t>(c)];
    const Vec3<double> center = centers.col(c);
    Index nearest = -1;
    double nearest_d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < points.cols() && region.members < max_points; ++i) {
      const double d = (points.col(i) - center).squaredNorm();
      if (d <= r2) {
        region.indices.push_back(i);
        ++region.members;
        if (d < nearest_d) {
          nearest_d = d;
          nearest = i;
        }
      }
    }
    if (region.members > 0) region.indices.resize(static_cast<std::size_t>(max_points), nearest);
  }
  return regions;
}

PointCloud drop_stale_centers(const PointCloud& centers, const PointCloud& points, double max_distance) {
  const double limit = max_distance * max_distance;
  std::vector<Index> keep;
  for (Index c = 0; c < centers.cols(); ++c) {
    if (points.cols() == 0) break;
    const double nn = (points.colwise() - centers.col(c)).colwise().squaredNorm().minCoeff();
    if (nn <= limit) keep.push_back(c);
  }
  return gather(centers, keep);
}

namespace {

// Lexicographic (x, y, z) order. Running the explorer on this order makes its
// output independent of how the sensor enumerated the points.
PointCloud canonical_order(const PointCloud& points) {
  std::vector<Index> order(static_cast<std::size_t>(points.cols()));
  for (Index i = 0; i < points.cols(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const auto pa = points.col(a);
    const auto pb = points.col(b);
    return std::lexicographical_compare(pa.data(), pa.data() + 3, pb.data(), pb.data() + 3);
  });
  return gather(points, order);
}

}  // namespace

RegionCenters explorer_init(const PointCloud& raw_points, const WorkspaceBox& ws, const ExplorerParams& params) {
  params.validate();
  const PointCloud filtered = workspace_filter(canonical_order(raw_points), ws);
  if (filtered.cols() == 0) throw TrackingLost("explorer_init: no points inside the workspace");
  RegionCenters out;
  out.capacity = params.capacity();
  out.centers = gather(filtered, farthest_point_sampling(filtered, params.capacity()));
  return out;
}

RegionCenters explorer_step(const RegionCenters& previous, const PointCloud& raw_points,
                            const ExplorerParams& params, const WorkspaceBox& ws) {
  params.validate();
  const PointCloud points = canonical_order(raw_points);
  const PointCloud filtered = workspace_filter(points, ws);
  if (filtered.cols() == 0) throw TrackingLost("explorer_step: no points inside the workspace");

  // Regions overlap heavily; pooling the distinct member indices gives the
  // same point set as concatenating the padded regions.
  std::vector<Index> pooled;
  if (!previous.empty()) {
    std::vector<char> seen(static_cast<std::size_t>(points.cols()), 0);
    for (const Region& region : ball_query(points, previous.centers, params.radius, params.points_per_region)) {
      for (Index k = 0; k < region.members; ++k) {
        const Index i = region.indices[static_cast<std::size_t>(k)];
        if (!seen[static_cast<std::size_t>(i)]) {
          seen[static_cast<std::size_t>(i)] = 1;
          pooled.push_back(i);
        }
      }
    }
    std::sort(pooled.begin(), pooled.end());
  }
  const PointCloud target = workspace_filter(gather(points, pooled), ws);

  PointCloud tracked(3, 0);
  if (target.cols() > 0) tracked = gather(target, farthest_point_sampling(target, params.tracked));
  const PointCloud complement = gather(filtered, farthest_point_sampling(filtered, params.complement));

  PointCloud all(3, tracked.cols() + complement.cols());
  all.leftCols(tracked.cols()) = tracked;
  all.rightCols(complement.cols()) = complement;

  RegionCenters out;
  out.capacity = params.capacity();
  out.centers = drop_stale_centers(all, points, params.stale_distance);
  return out;
}

}  // namespace dyngrasp
