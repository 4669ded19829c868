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

// Point-cloud primitives and the region center explorer.
//
// All scans are brute force. Clouds in this project stay below ~10k points
// and regions at 512 points, where a kd-tree does not pay for itself.

#include <cstdint>
#include <random>
#include <vector>

#include "dyngrasp/se3.hpp"

namespace dyngrasp {

using Index = Eigen::Index;

struct WorkspaceBox {
  Vec3<double> min_corner;
  Vec3<double> max_corner;

  WorkspaceBox(const Vec3<double>& lo, const Vec3<double>& hi);

  bool contains(const Vec3<double>& p) const {
    return (p.array() >= min_corner.array()).all() && (p.array() <= max_corner.array()).all();
  }
  Vec3<double> extent() const { return max_corner - min_corner; }
};

struct RegionCenters {
  PointCloud centers = PointCloud(3, 0);
  Index capacity = 0;

  Index size() const { return centers.cols(); }
  bool empty() const { return centers.cols() == 0; }
};

struct ExplorerParams {
  double radius = 0.05;         ///< ball-query radius r (m)
  Index points_per_region = 512;  ///< M
  Index tracked = 48;           ///< N_o
  Index complement = 16;        ///< N_c
  double stale_distance = 0.05; ///< d_th; centers farther than this from every point are dropped

  Index capacity() const { return tracked + complement; }
  void validate() const;
};

/// Columns of P gathered by index.
PointCloud gather(const PointCloud& points, const std::vector<Index>& indices);

/// Points inside the closed box, in input order.
PointCloud workspace_filter(const PointCloud& points, const WorkspaceBox& ws);

/// Greedy max-min subset starting from `seed_index`. Returns min(n, |P|)
/// indices; each pick maximises the distance to the chosen set, lowest index
/// on ties. The result for n = k is a prefix of the result for n = k + 1.
/// Throws EmptySetError for an empty cloud.
std::vector<Index> farthest_point_sampling(const PointCloud& points, Index n, Index seed_index = 0);

/// As above with the first index drawn uniformly from `rng`.
std::vector<Index> farthest_point_sampling(const PointCloud& points, Index n, std::mt19937_64& rng);

struct Region {
  /// Exactly M indices when non-empty; real members first, then padding.
  std::vector<Index> indices;
  /// Number of distinct in-radius points before padding (at most M).
  Index members = 0;

  bool empty() const { return members == 0; }
};

/// For each center, the first M points (in cloud order) within `radius`,
/// padded to M by repeating the member nearest the center. Centers with no
/// neighbour yield an empty region.
std::vector<Region> ball_query(const PointCloud& points, const PointCloud& centers, double radius,
                               Index max_points);

/// Drops centers whose nearest neighbour in `points` is farther than `max_distance`.
PointCloud drop_stale_centers(const PointCloud& centers, const PointCloud& points, double max_distance);

/// K = N_o + N_c centers by FPS over the workspace-filtered cloud.
/// Throws TrackingLost if nothing survives the filter.
RegionCenters explorer_init(const PointCloud& points, const WorkspaceBox& ws, const ExplorerParams& params);

/// One update of the explorer:
///   1. ball-query the current cloud around the previous centers,
///   2. pool the regional points and workspace-filter them,
///   3. FPS N_o tracked centers from that pool,
///   4. FPS N_c complement centers from the whole filtered cloud,
///   5. concatenate and drop stale centers.
/// Throws TrackingLost if the filtered cloud is empty.
RegionCenters explorer_step(const RegionCenters& previous, const PointCloud& points,
                            const ExplorerParams& params, const WorkspaceBox& ws);

}  // namespace dyngrasp
