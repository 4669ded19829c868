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

#include "dyngrasp/objects.hpp"

#include <array>
#include <cmath>

#include "dyngrasp/errors.hpp"
#include "dyngrasp/grasp_points.hpp"

namespace dyngrasp {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Rotation whose columns are (closing, approach x closing, approach).
Quat<double> grasp_orientation(const Vec3<double>& approach, const Vec3<double>& closing) {
  Mat3<double> r;
  r.col(0) = closing.normalized();
  r.col(2) = approach.normalized();
  r.col(1) = r.col(2).cross(r.col(0));
  return Quat<double>(r);
}

/// Grasp whose fingertip midpoint is at `contact`.
Grasp grasp_at(const Vec3<double>& contact, const Vec3<double>& approach, const Vec3<double>& closing, double width,
               const GripperModel& gripper) {
  const Vec3<double> a = approach.normalized();
  return Grasp(Posed(contact - gripper.finger_depth * a, grasp_orientation(a, closing)), width);
}

void add_both_finger_assignments(std::vector<Grasp>& out, const Vec3<double>& contact, const Vec3<double>& approach,
                                 const Vec3<double>& closing, double width, const GripperModel& gripper) {
  out.push_back(grasp_at(contact, approach, closing, width, gripper));
  out.push_back(grasp_at(contact, approach, -closing, width, gripper));
}

std::vector<Grasp> box_grasps(const Vec3<double>& dims, const GripperModel& gripper) {
  std::vector<Grasp> out;
  const double reach = gripper.max_opening - gripper.clearance;
  const Mat3<double> axes = Mat3<double>::Identity();
  for (int u = 0; u < 3; ++u) {
    if (dims[u] > reach) continue;
    for (int a = 0; a < 3; ++a) {
      if (a == u) continue;
      const int free = 3 - u - a;
      for (double sign : {1.0, -1.0}) {
        // Approach direction points from the gripper into the object; never upward.
        const Vec3<double> approach = sign * axes.col(a);
        if (approach.z() > 0.5) continue;
        const double depth = std::min(0.02, 0.5 * dims[a]);
        const double half_free = 0.5 * dims[free];
        for (double f : {-0.5, 0.0, 0.5}) {
          const Vec3<double> contact = -(0.5 * dims[a] - depth) * approach + f * half_free * axes.col(free);
          add_both_finger_assignments(out, contact, approach, axes.col(u), dims[u] + gripper.clearance, gripper);
        }
      }
    }
  }
  return out;
}

std::vector<Grasp> cylinder_grasps(double r, double h, const GripperModel& gripper) {
  std::vector<Grasp> out;
  if (2.0 * r > gripper.max_opening - gripper.clearance) return out;
  const double width = 2.0 * r + gripper.clearance;
  for (int k = 0; k < 8; ++k) {
    const double phi = k * M_PI / 4.0;
    const Vec3<double> radial(std::cos(phi), std::sin(phi), 0.0);
    const Vec3<double> tangent(-std::sin(phi), std::cos(phi), 0.0);
    for (double z : {-0.25 * h, 0.0, 0.25 * h}) {
      out.push_back(grasp_at(Vec3<double>(0, 0, z), -radial, tangent, width, gripper));
    }
    if (k < 4) {
      const double depth = std::min(0.02, 0.5 * h);
      add_both_finger_assignments(out, Vec3<double>(0, 0, 0.5 * h - depth), -Vec3<double>::UnitZ(), radial, width,
                                  gripper);
    }
  }
  return out;
}

std::vector<Grasp> sphere_grasps(double r, const GripperModel& gripper) {
  std::vector<Grasp> out;
  if (2.0 * r > gripper.max_opening - gripper.clearance) return out;
  const double width = 2.0 * r + gripper.clearance;
  // Top-down approach, then rings at 45 and 90 degrees from vertical.
  for (int k = 0; k < 4; ++k) {
    const double phi = k * M_PI / 4.0;
    out.push_back(grasp_at(Vec3<double>::Zero(), -Vec3<double>::UnitZ(), Vec3<double>(std::cos(phi), std::sin(phi), 0),
                           width, gripper));
  }
  for (double elevation : {M_PI / 4.0, M_PI / 2.0}) {
    for (int k = 0; k < 8; ++k) {
      const double phi = k * M_PI / 4.0;
      const Vec3<double> approach(-std::sin(elevation) * std::cos(phi), -std::sin(elevation) * std::sin(phi),
                                  -std::cos(elevation));
      const Vec3<double> closing(-std::sin(phi), std::cos(phi), 0.0);
      out.push_back(grasp_at(Vec3<double>::Zero(), approach, closing, width, gripper));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::box: return "box";
    case Primitive::cylinder: return "cylinder";
    case Primitive::sphere: return "sphere";
  }
  return "?";
}

std::string_view to_string(ObjectSplit s) {
  switch (s) {
    case ObjectSplit::seen: return "seen";
    case ObjectSplit::unseen: return "unseen";
    case ObjectSplit::novel: return "novel";
  }
  return "?";
}

ObjectSplit object_split_from_string(std::string_view s) {
  for (auto v : {ObjectSplit::seen, ObjectSplit::unseen, ObjectSplit::novel}) {
    if (to_string(v) == s) return v;
  }
  throw InvalidArgument("unknown object split: " + std::string(s));
}

ObjectModel ObjectModel::box(double x, double y, double z, ObjectSplit split) {
  if (!(x > 0 && y > 0 && z > 0)) throw InvalidArgument("box dimensions must be positive");
  return {Primitive::box, {x, y, z}, split};
}

ObjectModel ObjectModel::cylinder(double radius, double height, ObjectSplit split) {
  if (!(radius > 0 && height > 0)) throw InvalidArgument("cylinder dimensions must be positive");
  return {Primitive::cylinder, {radius, radius, height}, split};
}

ObjectModel ObjectModel::sphere(double radius, ObjectSplit split) {
  if (!(radius > 0)) throw InvalidArgument("sphere radius must be positive");
  return {Primitive::sphere, {radius, radius, radius}, split};
}

double ObjectModel::rest_height() const {
  return primitive == Primitive::sphere ? dims.x() : 0.5 * dims.z();
}

double ObjectModel::min_graspable_span() const {
  switch (primitive) {
    case Primitive::box: return dims.minCoeff();
    case Primitive::cylinder:
    case Primitive::sphere: return 2.0 * dims.x();
  }
  return dims.minCoeff();
}

ObjectModel sample_object(ObjectSplit split, std::mt19937_64& rng) {
  const bool first = uniform(rng, 0.0, 1.0) < 0.5;
  auto horizontal_box = [&](double narrow, double wide, double height) {
    // The narrow axis is x or y with equal probability.
    return uniform(rng, 0.0, 1.0) < 0.5 ? ObjectModel::box(narrow, wide, height, split)
                                        : ObjectModel::box(wide, narrow, height, split);
  };
  switch (split) {
    case ObjectSplit::seen:
      if (first) return horizontal_box(uniform(rng, 0.03, 0.05), uniform(rng, 0.05, 0.10), uniform(rng, 0.05, 0.10));
      return ObjectModel::cylinder(uniform(rng, 0.015, 0.025), uniform(rng, 0.05, 0.10), split);
    case ObjectSplit::unseen:
      if (first) return horizontal_box(uniform(rng, 0.05, 0.065), uniform(rng, 0.10, 0.14), uniform(rng, 0.10, 0.14));
      return ObjectModel::cylinder(uniform(rng, 0.025, 0.0325), uniform(rng, 0.10, 0.14), split);
    case ObjectSplit::novel:
      if (first) return ObjectModel::sphere(uniform(rng, 0.02, 0.035), split);
      // Extreme aspect ratio: a thin slab or a tall slender stick.
      if (uniform(rng, 0.0, 1.0) < 0.5) {
        return horizontal_box(uniform(rng, 0.01, 0.02), uniform(rng, 0.14, 0.20), uniform(rng, 0.10, 0.16));
      }
      return ObjectModel::cylinder(uniform(rng, 0.008, 0.012), uniform(rng, 0.16, 0.22), split);
  }
  throw InvalidArgument("unknown split");
}

SurfaceSample sample_surface_points(const ObjectModel& obj, const Posed& pose, Index n, double noise_std,
                                    std::mt19937_64& rng) {
  if (n < 1) throw InvalidArgument("sample_surface_points: n must be >= 1");
  SurfaceSample s;
  s.points.resize(3, n);
  s.normals.resize(3, n);
  s.faces.resize(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const Vec3<double>& d = obj.dims;

  std::vector<double> areas;
  switch (obj.primitive) {
    case Primitive::box:
      areas = {d.y() * d.z(), d.y() * d.z(), d.x() * d.z(), d.x() * d.z(), d.x() * d.y(), d.x() * d.y()};
      break;
    case Primitive::cylinder:
      areas = {2.0 * M_PI * d.x() * d.z(), M_PI * d.x() * d.x(), M_PI * d.x() * d.x()};
      break;
    case Primitive::sphere:
      areas = {1.0};
      break;
  }
  std::discrete_distribution<int> face_pick(areas.begin(), areas.end());

  for (Index i = 0; i < n; ++i) {
    const int face = face_pick(rng);
    Vec3<double> p, nrm;
    switch (obj.primitive) {
      case Primitive::box: {
        const int axis = face / 2;
        const double sign = face % 2 == 0 ? 1.0 : -1.0;
        p = Vec3<double>((u(rng) - 0.5) * d.x(), (u(rng) - 0.5) * d.y(), (u(rng) - 0.5) * d.z());
        p[axis] = sign * 0.5 * d[axis];
        nrm = Vec3<double>::Zero();
        nrm[axis] = sign;
        break;
      }
      case Primitive::cylinder: {
        const double r = d.x(), h = d.z();
        if (face == 0) {
          const double phi = 2.0 * M_PI * u(rng);
          nrm = Vec3<double>(std::cos(phi), std::sin(phi), 0.0);
          p = r * nrm + Vec3<double>(0, 0, (u(rng) - 0.5) * h);
        } else {
          const double rho = r * std::sqrt(u(rng)), phi = 2.0 * M_PI * u(rng);
          const double sign = face == 1 ? 1.0 : -1.0;
          p = Vec3<double>(rho * std::cos(phi), rho * std::sin(phi), sign * 0.5 * h);
          nrm = Vec3<double>(0, 0, sign);
        }
        break;
      }
      case Primitive::sphere: {
        nrm = Vec3<double>(g(rng), g(rng), g(rng)).normalized();
        p = d.x() * nrm;
        break;
      }
    }
    s.points.col(i) = pose * p;
    s.normals.col(i) = pose.orientation * nrm;
    s.faces[static_cast<std::size_t>(i)] = face;
  }
  if (noise_std > 0.0) {
    for (Index i = 0; i < n; ++i) s.points.col(i) += noise_std * Vec3<double>(g(rng), g(rng), g(rng));
  }
  return s;
}

SurfaceSample cull_back_faces(const SurfaceSample& s, const Vec3<double>& viewpoint) {
  std::vector<Index> keep;
  for (Index i = 0; i < s.points.cols(); ++i) {
    if (s.normals.col(i).dot(viewpoint - s.points.col(i)) > 0.0) keep.push_back(i);
  }
  SurfaceSample out;
  out.points = gather(s.points, keep);
  out.normals = gather(s.normals, keep);
  for (Index i : keep) out.faces.push_back(s.faces[static_cast<std::size_t>(i)]);
  return out;
}

GraspSet grasp_oracle(const ObjectModel& obj, const Posed& pose, const GripperModel& gripper) {
  std::vector<Grasp> local;
  switch (obj.primitive) {
    case Primitive::box: local = box_grasps(obj.dims, gripper); break;
    case Primitive::cylinder: local = cylinder_grasps(obj.dims.x(), obj.dims.z(), gripper); break;
    case Primitive::sphere: local = sphere_grasps(obj.dims.x(), gripper); break;
  }
  return transform_grasps(pose, GraspSet(Frame::world, std::move(local)), Frame::world);
}

GraspSet drop_table_collisions(const GraspSet& world_grasps, const GripperModel& gripper, double table_z) {
  GraspSet out(world_grasps.frame);
  for (const auto& g : world_grasps.grasps) {
    const PointCloud k = transform_points(g.pose, gripper_keypoints(gripper, g.width));
    if (k.row(2).minCoeff() >= table_z) out.grasps.push_back(g);
  }
  return out;
}

}  // namespace dyngrasp
