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

// Grasp representations consumed by the encoders:
//  - Gaussian points: every grasp pose applied to one shared random template,
//  - fixed gripper keypoints (4 per grasp),
//  - 9D features: translation plus the first two rotation-matrix columns.

#include <cstdint>
#include <random>

#include "dyngrasp/cloud.hpp"
#include "dyngrasp/grasp.hpp"

namespace dyngrasp {

struct GaussianTemplate {
  PointCloud points = PointCloud(3, 0);
  double sigma = 0.0;
  /// Nominal width the template was drawn for; sigma = width / 6.
  double width = 0.0;
  std::uint64_t episode = 0;

  Index size() const { return points.cols(); }
};

/// L i.i.d. draws from N(0, sigma^2 I) with sigma = nominal_width / 6.
GaussianTemplate sample_gaussian_template(Index num_points, double nominal_width, std::mt19937_64& rng,
                                          std::uint64_t episode = 0);

/// N groups of L points stored contiguously: group j occupies columns
/// [j * L, (j + 1) * L).
struct GraspPointSet {
  PointCloud points = PointCloud(3, 0);
  Index num_grasps = 0;
  Index points_per_grasp = 0;

  auto group(Index j) const { return points.middleCols(j * points_per_grasp, points_per_grasp); }
};

enum class TemplateScaling {
  nominal,   ///< one shared template for every grasp
  per_grasp  ///< template rescaled by width_j / template.width
};

/// Group j = grasp j's pose applied to the template. The set must be in the
/// end-effector frame (FrameError otherwise).
GraspPointSet grasps_to_points(const GraspSet& grasps, const GaussianTemplate& tmpl,
                               TemplateScaling scaling = TemplateScaling::nominal);

using NineDFeatures = Eigen::Matrix<double, 9, Eigen::Dynamic>;

/// Per grasp: (tx, ty, tz, r00, r10, r20, r01, r11, r21).
NineDFeatures grasps_to_9d(const GraspSet& grasps);

/// Gram-Schmidt reconstruction of a rotation from its first two columns.
Mat3<double> rotation_from_6d(const Eigen::Ref<const Eigen::Matrix<double, 6, 1>>& six);

inline constexpr Index kKeypointsPerGrasp = 4;

/// Wrist, palm center, left fingertip, right fingertip in the gripper frame.
PointCloud gripper_keypoints(const GripperModel& gripper, double width);

/// The 4 gripper keypoints rigidly attached to each grasp (fingertip
/// separation = that grasp's width).
GraspPointSet grasps_to_keypoints(const GraspSet& grasps, const GripperModel& gripper);

}  // namespace dyngrasp
