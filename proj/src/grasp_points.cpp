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

#include "dyngrasp/grasp_points.hpp"

namespace dyngrasp {

GaussianTemplate sample_gaussian_template(Index num_points, double nominal_width, std::mt19937_64& rng,
                                          std::uint64_t episode) {
  if (num_points < 1) throw InvalidArgument("sample_gaussian_template: L must be >= 1");
  if (!(nominal_width > 0.0)) throw InvalidArgument("sample_gaussian_template: width must be positive");
  GaussianTemplate t;
  t.width = nominal_width;
  t.sigma = nominal_width / 6.0;
  t.episode = episode;
  t.points.resize(3, num_points);
  std::normal_distribution<double> normal(0.0, t.sigma);
  for (Index i = 0; i < num_points; ++i) {
    for (Index k = 0; k < 3; ++k) t.points(k, i) = normal(rng);
  }
  return t;
}

GraspPointSet grasps_to_points(const GraspSet& grasps, const GaussianTemplate& tmpl, TemplateScaling scaling) {
  if (grasps.frame != Frame::end_effector) {
    throw FrameError("grasps_to_points: grasps must be in the end-effector frame");
  }
  const Index n = static_cast<Index>(grasps.size());
  const Index l = tmpl.size();
  GraspPointSet out;
  out.num_grasps = n;
  out.points_per_grasp = l;
  out.points.resize(3, n * l);
  for (Index j = 0; j < n; ++j) {
    const Grasp& g = grasps[static_cast<std::size_t>(j)];
    if (scaling == TemplateScaling::per_grasp) {
      out.points.middleCols(j * l, l) = transform_points(g.pose, PointCloud(tmpl.points * (g.width / tmpl.width)));
    } else {
      out.points.middleCols(j * l, l) = transform_points(g.pose, tmpl.points);
    }
  }
  return out;
}

NineDFeatures grasps_to_9d(const GraspSet& grasps) {
  NineDFeatures out(9, static_cast<Index>(grasps.size()));
  for (Index j = 0; j < out.cols(); ++j) {
    const Grasp& g = grasps[static_cast<std::size_t>(j)];
    const Mat3<double> r = g.pose.rotation();
    out.col(j) << g.pose.position, r.col(0), r.col(1);
  }
  return out;
}

Mat3<double> rotation_from_6d(const Eigen::Ref<const Eigen::Matrix<double, 6, 1>>& six) {
  const Vec3<double> a1 = six.head<3>();
  const Vec3<double> a2 = six.tail<3>();
  if (a1.norm() == 0.0) throw InvalidArgument("rotation_from_6d: degenerate first column");
  const Vec3<double> b1 = a1.normalized();
  const Vec3<double> u2 = a2 - b1.dot(a2) * b1;
  if (u2.norm() == 0.0) throw InvalidArgument("rotation_from_6d: columns are parallel");
  const Vec3<double> b2 = u2.normalized();
  Mat3<double> r;
  r << b1, b2, b1.cross(b2);
  return r;
}

PointCloud gripper_keypoints(const GripperModel& gripper, double width) {
  PointCloud k(3, kKeypointsPerGrasp);
  k.col(0) << 0.0, 0.0, 0.0;
  k.col(1) << 0.0, 0.0, gripper.palm_depth;
  k.col(2) << 0.5 * width, 0.0, gripper.finger_depth;
  k.col(3) << -0.5 * width, 0.0, gripper.finger_depth;
  return k;
}

GraspPointSet grasps_to_keypoints(const GraspSet& grasps, const GripperModel& gripper) {
  const Index n = static_cast<Index>(grasps.size());
  GraspPointSet out;
  out.num_grasps = n;
  out.points_per_grasp = kKeypointsPerGrasp;
  out.points.resize(3, n * kKeypointsPerGrasp);
  for (Index j = 0; j < n; ++j) {
    const Grasp& g = grasps[static_cast<std::size_t>(j)];
    out.points.middleCols(j * kKeypointsPerGrasp, kKeypointsPerGrasp) =
        transform_points(g.pose, gripper_keypoints(gripper, g.width));
  }
  return out;
}

}  // namespace dyngrasp
