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

// Rigid-body poses and the quaternion metric used by the grasp distance.
//
// Quaternions are scalar-first everywhere they cross an API boundary:
// serialised poses are [px, py, pz, qw, qx, qy, qz]. Eigen::Quaternion's
// (w, x, y, z) constructor follows the same order; its coeffs() storage
// order (x, y, z, w) is never exposed.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "dyngrasp/errors.hpp"

namespace dyngrasp {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;

template <typename Scalar>
using Quat = Eigen::Quaternion<Scalar>;

/// 3 x n matrix, one point per column.
template <typename Scalar>
using Points3 = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

using PointCloud = Points3<double>;

/// Tolerance on |q| - 1 accepted by the rotational metric.
inline constexpr double kUnitQuatTolerance = 1e-6;

/// Position plus unit orientation. The orientation is renormalised on
/// construction so that every Pose value carries a unit quaternion.
template <typename Scalar>
struct Pose {
  Vec3<Scalar> position = Vec3<Scalar>::Zero();
  Quat<Scalar> orientation = Quat<Scalar>::Identity();

  Pose() = default;
  Pose(const Vec3<Scalar>& p, const Quat<Scalar>& q) : position(p), orientation(q.normalized()) {}
  Pose(const Vec3<Scalar>& p, const Mat3<Scalar>& r) : position(p), orientation(Quat<Scalar>(r).normalized()) {}

  static Pose identity() { return Pose(); }
  static Pose translation(const Vec3<Scalar>& t) { return Pose(t, Quat<Scalar>::Identity()); }

  Mat3<Scalar> rotation() const { return orientation.toRotationMatrix(); }

  Mat4<Scalar> matrix() const {
    Mat4<Scalar> m = Mat4<Scalar>::Identity();
    m.template topLeftCorner<3, 3>() = rotation();
    m.template topRightCorner<3, 1>() = position;
    return m;
  }

  /// Maps a point from this pose's local frame to the parent frame. Only
  /// compile-time 3-vectors are accepted; use transform_points for clouds.
  template <typename Derived>
  Vec3<Scalar> operator*(const Eigen::MatrixBase<Derived>& x) const {
    static_assert(Derived::RowsAtCompileTime == 3 && Derived::ColsAtCompileTime == 1,
                  "Pose * x needs a 3-vector; use transform_points for point sets");
    return orientation * x + position;
  }

  template <typename Other>
  Pose<Other> cast() const {
    return Pose<Other>(position.template cast<Other>(), orientation.template cast<Other>());
  }
};

using Posed = Pose<double>;

template <typename Scalar>
Pose<Scalar> pose_compose(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  return Pose<Scalar>(a.position + a.orientation * b.position, a.orientation * b.orientation);
}

template <typename Scalar>
Pose<Scalar> pose_inverse(const Pose<Scalar>& p) {
  const Quat<Scalar> inv = p.orientation.conjugate();
  return Pose<Scalar>(-(inv * p.position), inv);
}

template <typename Scalar>
Pose<Scalar> operator*(const Pose<Scalar>& a, const Pose<Scalar>& b) {
  return pose_compose(a, b);
}

/// Applies T to every column of P.
template <typename Scalar>
Points3<Scalar> transform_points(const Pose<Scalar>& t, const Points3<Scalar>& points) {
  return (t.rotation() * points).colwise() + t.position;
}

template <typename Scalar>
bool is_unit(const Quat<Scalar>& q, double tol = kUnitQuatTolerance) {
  return std::abs(static_cast<double>(q.norm()) - 1.0) <= tol;
}

/// 1 - |q1 . q2|, in [0, 1]. Zero for identical rotations and invariant under
/// q -> -q. Throws InvalidArgument if either input is not unit-norm.
template <typename Scalar>
Scalar quat_rotational_distance(const Quat<Scalar>& q1, const Quat<Scalar>& q2) {
  if (!is_unit(q1) || !is_unit(q2)) {
    throw InvalidArgument("quat_rotational_distance: non-unit quaternion");
  }
  using std::abs;
  using std::min;
  const Scalar d = Scalar(1) - min(Scalar(1), abs(q1.dot(q2)));
  return d;
}

/// Unrestricted intrinsic Z-Y-X composition, used for action residuals.
template <typename Scalar>
Quat<Scalar> quat_from_zyx(Scalar yaw, Scalar pitch, Scalar roll) {
  using AA = Eigen::AngleAxis<Scalar>;
  Quat<Scalar> q = AA(yaw, Vec3<Scalar>::UnitZ()) * AA(pitch, Vec3<Scalar>::UnitY()) *
                   AA(roll, Vec3<Scalar>::UnitX());
  return q.normalized();
}

/// Rotation from intrinsic Z-Y-X Euler angles, R = Rz(theta) Ry(gamma) Rx(beta).
/// Each angle must lie in [-pi/2, pi/2]; this is the grasp parameterisation's range.
template <typename Scalar>
Quat<Scalar> quat_from_grasp_euler(Scalar theta, Scalar gamma, Scalar beta) {
  constexpr double half_pi = M_PI / 2.0;
  for (Scalar a : {theta, gamma, beta}) {
    if (!(std::abs(static_cast<double>(a)) <= half_pi + 1e-12)) {
      throw InvalidArgument("quat_from_grasp_euler: angle outside [-pi/2, pi/2]");
    }
  }
  return quat_from_zyx(theta, gamma, beta);
}

/// Inverse of quat_from_zyx: returns (yaw, pitch, roll).
template <typename Scalar>
Vec3<Scalar> zyx_from_quat(const Quat<Scalar>& q) {
  const Mat3<Scalar> r = q.toRotationMatrix();
  using std::asin;
  using std::atan2;
  using std::clamp;
  const Scalar pitch = asin(clamp(-r(2, 0), Scalar(-1), Scalar(1)));
  const Scalar yaw = atan2(r(1, 0), r(0, 0));
  const Scalar roll = atan2(r(2, 1), r(2, 2));
  return {yaw, pitch, roll};
}

/// [px, py, pz, qw, qx, qy, qz].
template <typename Scalar>
std::array<Scalar, 7> serialize_pose(const Pose<Scalar>& p) {
  const auto& q = p.orientation;
  return {p.position.x(), p.position.y(), p.position.z(), q.w(), q.x(), q.y(), q.z()};
}

template <typename Scalar>
Pose<Scalar> deserialize_pose(std::span<const Scalar> v) {
  if (v.size() < 7) throw InvalidArgument("deserialize_pose: need 7 numbers");
  const Quat<Scalar> q(v[3], v[4], v[5], v[6]);
  if (q.norm() == Scalar(0)) throw InvalidArgument("deserialize_pose: zero quaternion");
  return Pose<Scalar>(Vec3<Scalar>(v[0], v[1], v[2]), q);
}

}  // namespace dyngrasp
