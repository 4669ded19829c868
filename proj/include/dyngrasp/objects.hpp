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

// Procedural objects, their surface samples and analytic antipodal grasps.
//
// Object frame: origin at the volume center, z along the primitive's axis.
// Objects rest on the table (world z = 0) with object z parallel to world z.

#include <random>
#include <string_view>
#include <vector>

#include "dyngrasp/cloud.hpp"
#include "dyngrasp/grasp.hpp"

namespace dyngrasp {

enum class Primitive { box, cylinder, sphere };
enum class ObjectSplit { seen, unseen, novel };

std::string_view to_string(Primitive p);
std::string_view to_string(ObjectSplit s);
ObjectSplit object_split_from_string(std::string_view s);

struct ObjectModel {
  Primitive primitive = Primitive::box;
  /// box: full extents (x, y, z); cylinder: (radius, radius, height); sphere: (radius, radius, radius).
  Vec3<double> dims{0.05, 0.05, 0.05};
  ObjectSplit split = ObjectSplit::seen;

  static ObjectModel box(double x, double y, double z, ObjectSplit split = ObjectSplit::seen);
  static ObjectModel cylinder(double radius, double height, ObjectSplit split = ObjectSplit::seen);
  static ObjectModel sphere(double radius, ObjectSplit split = ObjectSplit::seen);

  /// Height of the object center when resting on the table.
  double rest_height() const;
  /// Narrowest span a parallel-jaw gripper can close across.
  double min_graspable_span() const;
  bool graspable(const GripperModel& gripper) const {
    return min_graspable_span() + gripper.clearance <= gripper.max_opening;
  }
};

/// Draws one object from a split. Dimension ranges of the splits are disjoint,
/// and every sampled object is graspable by the default gripper.
ObjectModel sample_object(ObjectSplit split, std::mt19937_64& rng);

struct SurfaceSample {
  PointCloud points = PointCloud(3, 0);
  PointCloud normals = PointCloud(3, 0);
  /// Face label: box 0..5 = (+x, -x, +y, -y, +z, -z); cylinder 0 = side, 1 = top, 2 = bottom; sphere 0.
  std::vector<int> faces;
};

/// n area-weighted samples on the surface, mapped through `pose`, with
/// isotropic Gaussian noise of `noise_std` added to the points.
SurfaceSample sample_surface_points(const ObjectModel& obj, const Posed& pose, Index n, double noise_std,
                                    std::mt19937_64& rng);

/// Keeps samples whose normal faces the viewpoint.
SurfaceSample cull_back_faces(const SurfaceSample& s, const Vec3<double>& viewpoint);

/// Antipodal grasps in the object frame, mapped through `pose` (world frame).
/// Box: opposing face pairs no wider than max_opening - clearance, each
/// approached along the two other axes (never from below) at three offsets
/// and both finger assignments. Cylinder: diametral grasps from the side at
/// eight azimuths and three heights, plus top-down grasps across the cap.
/// Sphere: diametral grasps through the center from a hemisphere of
/// approach directions. Width is the span plus clearance. Empty when the
/// object has no graspable span.
GraspSet grasp_oracle(const ObjectModel& obj, const Posed& pose, const GripperModel& gripper);

/// Drops grasps whose wrist, palm or fingertips would sit below the table.
GraspSet drop_table_collisions(const GraspSet& world_grasps, const GripperModel& gripper, double table_z = 0.0);

}  // namespace dyngrasp
