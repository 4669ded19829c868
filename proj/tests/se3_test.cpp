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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "dyngrasp/grasp.hpp"
#include "test_util.hpp"

namespace dyngrasp {
namespace {

using testing::matrix_oracle;
using testing::random_cloud;
using testing::random_pose;
using testing::random_quat;

Quat<double> about_z(double angle) { return Quat<double>(Eigen::AngleAxisd(angle, Vec3<double>::UnitZ())); }

TEST(QuatRotationalDistance, IdentityAndDoubleCover) {
  std::mt19937_64 rng(1);
  const Quat<double> q = random_quat(rng);
  EXPECT_EQ(quat_rotational_distance(q, q), 0.0);
  const Quat<double> neg(-q.w(), -q.x(), -q.y(), -q.z());
  EXPECT_NEAR(quat_rotational_distance(q, neg), 0.0, 1e-15);
}

TEST(QuatRotationalDistance, QuarterTurnAboutZ) {
  // Half-angle formula: |q1 . q2| = cos(pi/4).
  const double expected = 1.0 - std::cos(M_PI / 4.0);
  EXPECT_NEAR(quat_rotational_distance(Quat<double>::Identity(), about_z(M_PI / 2)), expected, 1e-12);
  EXPECT_NEAR(expected, 0.292893, 1e-6);
}

TEST(QuatRotationalDistance, RejectsNonUnit) {
  const Quat<double> bad(2.0, 0.0, 0.0, 0.0);
  EXPECT_THROW(quat_rotational_distance(bad, Quat<double>::Identity()), InvalidArgument);
}

TEST(QuatRotationalDistance, Properties) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Quat<double> a = random_quat(rng);
    const Quat<double> b = random_quat(rng);
    const double d = quat_rotational_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_EQ(d, quat_rotational_distance(b, a));
    const Quat<double> nb(-b.w(), -b.x(), -b.y(), -b.z());
    EXPECT_NEAR(d, quat_rotational_distance(a, nb), 1e-15);
  }
}

TEST(GraspSetDistance, CoincidentGrasp) {
  std::mt19937_64 rng(3);
  const Posed ee = random_pose(rng);
  const GraspSet set(Frame::world, {Grasp(ee, 0.05)});
  const auto d = grasp_set_distance(set, ee);
  EXPECT_NEAR(d.distance, 0.0, 1e-15);
  EXPECT_EQ(d.index, 0u);
}

TEST(GraspSetDistance, PositionTermIsSquared) {
  const Posed ee = Posed::identity();
  const GraspSet set(Frame::world, {Grasp(Posed::translation({0.1, 0.0, 0.0}), 0.05)});
  const auto d = grasp_set_distance(set, ee);
  EXPECT_NEAR(d.distance, 0.01, 1e-15);
  EXPECT_EQ(d.index, 0u);
}

TEST(GraspSetDistance, TwoGraspsBruteForce) {
  const Posed ee = Posed::identity();
  const GraspSet set(Frame::world, {Grasp(Posed::translation({0.2, 0.0, 0.0}), 0.05),
                                    Grasp(Posed(Vec3<double>::Zero(), about_z(M_PI)), 0.05)});
  // Brute force: 0.2^2 = 0.04 and 1 - |cos(pi/2)| = 1.
  const auto d = grasp_set_distance(set, ee);
  EXPECT_NEAR(d.distance, 0.04, 1e-15);
  EXPECT_EQ(d.index, 0u);
}

TEST(GraspSetDistance, TiesResolveToLowestIndex) {
  const Grasp g(Posed::translation({0.0, 0.1, 0.0}), 0.05);
  const GraspSet set(Frame::world, {Grasp(Posed::translation({0.3, 0, 0}), 0.05), g, g, g});
  EXPECT_EQ(grasp_set_distance(set, Posed::identity()).index, 1u);
}

TEST(GraspSetDistance, Errors) {
  EXPECT_THROW(grasp_set_distance(GraspSet(Frame::world), Posed::identity()), EmptySetError);
  const GraspSet set(Frame::camera, {Grasp(Posed::identity(), 0.05)});
  EXPECT_THROW(grasp_set_distance(set, Posed::identity(), Frame::world), FrameError);
  EXPECT_NO_THROW(grasp_set_distance(set, Posed::identity(), Frame::camera));
}

TEST(GraspSetDistance, MonotoneUnderGrowthAndPermutationConsistent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Posed ee = random_pose(rng, 0.3);
    GraspSet set(Frame::world);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 12; ++k) {
      set.grasps.emplace_back(random_pose(rng, 0.3), 0.05);
      const double d = grasp_set_distance(set, ee).distance;
      EXPECT_LE(d, previous);
      previous = d;
    }
    std::vector<std::size_t> perm(set.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    GraspSet shuffled(Frame::world);
    for (auto p : perm) shuffled.grasps.push_back(set[p]);
    const auto a = grasp_set_distance(set, ee);
    const auto b = grasp_set_distance(shuffled, ee);
    EXPECT_EQ(a.distance, b.distance);
    EXPECT_EQ(perm[b.index], a.index);
  }
}

TEST(PoseAlgebra, IdentityAndInverse) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Posed p = random_pose(rng);
    const Posed left = pose_compose(Posed::identity(), p);
    EXPECT_TRUE(left.position.isApprox(p.position, 1e-15));
    EXPECT_NEAR(quat_rotational_distance(left.orientation, p.orientation), 0.0, 1e-12);

    const Posed id = pose_compose(p, pose_inverse(p));
    EXPECT_LT(id.position.norm(), 1e-9);
    EXPECT_LT(quat_rotational_distance(id.orientation, Quat<double>::Identity()), 1e-9);
    EXPECT_NEAR(id.orientation.norm(), 1.0, 1e-9);
  }
}

TEST(PoseAlgebra, ComposeMatchesHomogeneousProduct) {
  // Translation (1,0,0) then a quarter turn about z, applied to the origin.
  const Posed a = Posed::translation({1.0, 0.0, 0.0});
  const Posed b(Vec3<double>::Zero(), about_z(M_PI / 2));
  const Mat4<double> oracle = a.matrix() * b.matrix();
  const Vec3<double> mapped = pose_compose(a, b) * Vec3<double>::Zero();
  EXPECT_TRUE(mapped.isApprox(oracle.topRightCorner<3, 1>()));
  EXPECT_TRUE(mapped.isApprox(Vec3<double>(1.0, 0.0, 0.0)));

  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Posed x = random_pose(rng);
    const Posed y = random_pose(rng);
    EXPECT_TRUE(pose_compose(x, y).matrix().isApprox(x.matrix() * y.matrix(), 1e-12));
    EXPECT_TRUE(pose_inverse(x).matrix().isApprox(x.matrix().inverse(), 1e-12));
  }
}

TEST(TransformPoints, IdentityAndTranslation) {
  std::mt19937_64 rng(2);
  const PointCloud p = random_cloud(rng, 50);
  EXPECT_EQ(transform_points(Posed::identity(), p), p);
  const Vec3<double> t(0.3, -0.2, 1.0);
  const PointCloud moved = transform_points(Posed::translation(t), p);
  EXPECT_TRUE(moved.isApprox(p.colwise() + t));
}

TEST(TransformPoints, MatchesMatrixOracleAndIsIsometric) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Posed t = random_pose(rng, 2.0);
    const PointCloud p = random_cloud(rng, 40);
    const PointCloud q = transform_points(t, p);
    ASSERT_EQ(q.cols(), p.cols());
    EXPECT_LT((q - matrix_oracle(t.matrix(), p)).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < p.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < p.cols(); ++j) {
        EXPECT_NEAR((q.col(i) - q.col(j)).norm(), (p.col(i) - p.col(j)).norm(), 1e-9);
      }
    }
  }
}

TEST(GraspEuler, ValidRangeGivesUnitQuaternion) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-M_PI / 2, M_PI / 2);
  for (int i = 0; i < 1000; ++i) {
    const double th = u(rng), ga = u(rng), be = u(rng);
    const Quat<double> q = quat_from_grasp_euler(th, ga, be);
    EXPECT_NEAR(q.norm(), 1.0, 1e-12);
    // Independent route: explicit product of elementary rotation matrices.
    Mat3<double> rz, ry, rx;
    rz << std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1;
    ry << std::cos(ga), 0, std::sin(ga), 0, 1, 0, -std::sin(ga), 0, std::cos(ga);
    rx << 1, 0, 0, 0, std::cos(be), -std::sin(be), 0, std::sin(be), std::cos(be);
    EXPECT_TRUE(q.toRotationMatrix().isApprox(rz * ry * rx, 1e-12));
    const Vec3<double> back = zyx_from_quat(q);
    EXPECT_NEAR(back[0], th, 1e-9);
    EXPECT_NEAR(back[1], ga, 1e-9);
    EXPECT_NEAR(back[2], be, 1e-9);
  }
  EXPECT_THROW(quat_from_grasp_euler(2.0, 0.0, 0.0), InvalidArgument);
}

TEST(GraspType, WidthValidationAndRegionParams) {
  EXPECT_THROW(Grasp(Posed::identity(), 0.0), InvalidArgument);
  EXPECT_THROW(grasp_from_region_params({0, 0, 0}, {0, 0, 0}, 0, 0, 0, 0.09, 0.08), InvalidArgument);
  const Grasp g = grasp_from_region_params({0.1, 0.2, 0.3}, {0.01, 0, 0}, 0.0, 0.0, 0.0, 0.05, 0.08);
  EXPECT_TRUE(g.pose.position.isApprox(Vec3<double>(0.11, 0.2, 0.3)));
}

TEST(Serialization, PoseAndGraspLayout) {
  const Posed p(Vec3<double>(1, 2, 3), Quat<double>(0.5, 0.5, 0.5, 0.5));
  const auto s = serialize_pose(p);
  EXPECT_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[3], 0.5);  // qw first
  const Grasp g(p, 0.04, 0.7);
  const auto gs = serialize_grasp(g);
  EXPECT_EQ(gs[7], 0.04);
  EXPECT_EQ(gs[8], 0.7);
  const Grasp back = deserialize_grasp(gs);
  EXPECT_TRUE(back.pose.position.isApprox(p.position));
  EXPECT_NEAR(quat_rotational_distance(back.pose.orientation, p.orientation), 0.0, 1e-15);
}

}  // namespace
}  // namespace dyngrasp
