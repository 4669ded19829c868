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

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "dyngrasp/se3.hpp"

namespace dyngrasp {

enum class Frame { camera, region, end_effector, world };

std::string_view to_string(Frame f);

/// Parallel-jaw gripper geometry shared by the grasp oracle, the keypoint
/// baseline and the environment.
///
/// Gripper frame: +z is the approach axis, the fingers close along x. The
/// frame origin sits at the wrist; the closing point between the fingertips
/// is at (0, 0, finger_depth).
struct GripperModel {
  double max_opening = 0.08;
  double finger_depth = 0.06;
  double palm_depth = 0.02;
  /// Added to the object's span when choosing a grasp width.
  double clearance = 0.01;
};

struct Grasp {
  Posed pose;
  double width = 0.0;
  double score = 1.0;

  Grasp() = default;
  Grasp(const Posed& p, double w, double s = 1.0);

  /// Point between the fingertips, in the grasp's parent frame.
  Vec3<double> center(const GripperModel& gripper) const {
    return pose * Vec3<double>(0.0, 0.0, gripper.finger_depth);
  }
  Vec3<double> approach_axis() const { return pose.orientation * Vec3<double>::UnitZ(); }
  Vec3<double> closing_axis() const { return pose.orientation * Vec3<double>::UnitX(); }
};

/// Builds a grasp from a region center plus the detector's
/// (dx, dy, dz, theta, gamma, beta, width) parameterisation.
Grasp grasp_from_region_params(const Vec3<double>& region_center, const Vec3<double>& offset,
                               double theta, double gamma, double beta, double width,
                               double max_opening);

struct GraspSet {
  Frame frame = Frame::world;
  std::vector<Grasp> grasps;

  GraspSet() = default;
  explicit GraspSet(Frame f) : frame(f) {}
  GraspSet(Frame f, std::vector<Grasp> g) : frame(f), grasps(std::move(g)) {}

  bool empty() const { return grasps.empty(); }
  std::size_t size() const { return grasps.size(); }
  const Grasp& operator[](std::size_t i) const { return grasps[i]; }
};

/// Re-expresses every grasp through `t` (new = t * old) and retags the frame.
GraspSet transform_grasps(const Posed& t, const GraspSet& set, Frame new_frame);

struct GraspDistance {
  double distance = 0.0;
  std::size_t index = 0;
};

/// Squared position gap plus quaternion distance to a single grasp pose.
double grasp_pose_distance(const Posed& grasp, const Posed& ee);

/// min_j |p_ee - p_j|^2 + (1 - |q_j . q_ee|) and its argmin, lowest index on
/// ties. The position term is squared. Throws EmptySetError on an empty set.
GraspDistance grasp_set_distance(const GraspSet& set, const Posed& ee);

/// Same, but verifies that `ee_frame` matches the set's frame.
GraspDistance grasp_set_distance(const GraspSet& set, const Posed& ee, Frame ee_frame);

/// [px, py, pz, qw, qx, qy, qz, width, score].
std::array<double, 9> serialize_grasp(const Grasp& g);
Grasp deserialize_grasp(std::span<const double> v);

}  // namespace dyngrasp
