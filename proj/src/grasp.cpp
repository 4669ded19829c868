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

#include "dyngrasp/grasp.hpp"

#include <cmath>
#include <limits>

namespace dyngrasp {

std::string_view to_string(Frame f) {
  switch (f) {
    case Frame::camera: return "camera";
    case Frame::region: return "region";
    case Frame::end_effector: return "end_effector";
    case Frame::world: return "world";
  }
  return "unknown";
}

Grasp::Grasp(const Posed& p, double w, double s) : pose(p), width(w), score(s) {
  if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("Grasp: width must be positive");
}

Grasp grasp_from_region_params(const Vec3<double>& region_center, const Vec3<double>& offset,
                               double theta, double gamma, double beta, double width,
                               double max_opening) {
  if (width > max_opening) throw InvalidArgument("grasp width exceeds gripper opening");
  return Grasp(Posed(region_center + offset, quat_from_grasp_euler(theta, gamma, beta)), width);
}

GraspSet transform_grasps(const Posed& t, const GraspSet& set, Frame new_frame) {
  GraspSet out(new_frame);
  out.grasps.reserve(set.size());
  for (const auto& g : set.grasps) {
    Grasp moved = g;
    moved.pose = t * g.pose;
    out.grasps.push_back(moved);
  }
  return out;
}

double grasp_pose_distance(const Posed& grasp, const Posed& ee) {
  return (ee.position - grasp.position).squaredNorm() +
         quat_rotational_distance(grasp.orientation, ee.orientation);
}

GraspDistance grasp_set_distance(const GraspSet& set, const Posed& ee) {
  if (set.empty()) throw EmptySetError("grasp_set_distance: empty grasp set");
  GraspDistance best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < set.size(); ++j) {
    const double d = grasp_pose_distance(set[j].pose, ee);
    if (d < best.distance) best = {d, j};
  }
  return best;
}

GraspDistance grasp_set_distance(const GraspSet& set, const Posed& ee, Frame ee_frame) {
  if (set.frame != ee_frame) {
    throw FrameError("grasp_set_distance: set in " + std::string(to_string(set.frame)) +
                     " frame, end effector in " + std::string(to_string(ee_frame)));
  }
  return grasp_set_distance(set, ee);
}

std::array<double, 9> serialize_grasp(const Grasp& g) {
  const auto p = serialize_pose(g.pose);
  return {p[0], p[1], p[2], p[3], p[4], p[5], p[6], g.width, g.score};
}

Grasp deserialize_grasp(std::span<const double> v) {
  if (v.size() < 9) throw InvalidArgument("deserialize_grasp: need 9 numbers");
  return Grasp(deserialize_pose(v.first(7)), v[7], v[8]);
}

}  // namespace dyngrasp
