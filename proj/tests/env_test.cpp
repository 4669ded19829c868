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

#include <cmath>

#include "dyngrasp/check/oracles.hpp"
#include "dyngrasp/env.hpp"
#include "test_util.hpp"

namespace dyngrasp {
namespace {

using testing::random_pose;

TEST(Bezier, EndpointsAndCubicMidpoint) {
  const std::vector<Vec3<double>> p{{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}};
  EXPECT_EQ(bezier_eval(p, 0.0), p.front());
  EXPECT_EQ(bezier_eval(p, 1.0), p.back());
  // (P0 + 3 P1 + 3 P2 + P3) / 8
  EXPECT_TRUE(bezier_eval(p, 0.5).isApprox(Vec3<double>(0.5, 0.75, 0.0)));
  EXPECT_THROW(bezier_eval(p, 1.5), InvalidArgument);
  EXPECT_THROW(bezier_eval({p[0]}, 0.5), InvalidArgument);
}

TEST(Bezier, MatchesBernsteinForm) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec3<double>> c(static_cast<std::size_t>(2 + trial % 5));
    for (auto& v : c) v = testing::random_vec(rng);
    const double t = std::uniform_real_distribution<double>(0, 1)(rng);
    EXPECT_LT((bezier_eval(c, t) - testing::bernstein_bezier(c, t)).norm(), 1e-12);
  }
}

TrajectoryConfig mode_config(TrajectoryMode m) {
  TrajectoryConfig c;
  c.mode = m;
  return c;
}

TEST(Trajectory, RotationIsStaticWithSpin) {
  std::mt19937_64 rng(2);
  const Trajectory t(mode_config(TrajectoryMode::rotation), 0.05, rng);
  for (int k = 0; k <= 100; ++k) {
    EXPECT_EQ(t.position(k), t.position(0));
    EXPECT_NEAR(t.yaw(k) - t.yaw(0), t.omega() * k * t.dt(), 1e-12);
  }
  EXPECT_LE(std::abs(t.omega()), 10.0 * M_PI / 180.0 + 1e-12);
}

TEST(Trajectory, CircleArcLengthAndRadius) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Trajectory t(mode_config(TrajectoryMode::circle), 0.05, rng);
    const Vec3<double> c = t.circle_center();
    for (int k = 0; k < 100; ++k) {
      const Vec3<double> a = t.position(k) - c, b = t.position(k + 1) - c;
      EXPECT_NEAR(a.norm(), t.circle_radius(), 1e-9);
      const double angle = std::atan2(a.cross(b).norm(), a.dot(b));
      EXPECT_NEAR(angle * t.circle_radius(), t.speed() * t.dt(), 1e-6);
    }
  }
}

TEST(Trajectory, PathsStayInWorkspace) {
  std::mt19937_64 rng(4);
  const TrajectoryConfig base;
  for (auto mode : {TrajectoryMode::line, TrajectoryMode::circle, TrajectoryMode::random}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Trajectory t(mode_config(mode), 0.05, rng);
      for (int k = 0; k <= base.steps; k += (mode == TrajectoryMode::random ? 1 : 10)) {
        const Vec3<double> p = t.position(k);
        ASSERT_GE(p.x(), base.xy_min - 1e-12);
        ASSERT_LE(p.x(), base.xy_max + 1e-12);
        ASSERT_GE(p.y(), base.xy_min - 1e-12);
        ASSERT_LE(p.y(), base.xy_max + 1e-12);
        ASSERT_DOUBLE_EQ(p.z(), 0.05);
      }
    }
  }
}

TEST(Trajectory, LineMovesAtConstantSpeed) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Trajectory t(mode_config(TrajectoryMode::line), 0.0, rng);
    for (int k = 0; k < 100; ++k) {
      // The path may end inside the episode; the last segment is partial.
      if (t.position(k + 1) == t.position(k + 2)) break;
      EXPECT_NEAR((t.position(k + 1) - t.position(k)).norm(), t.speed() * t.dt(), 1e-12);
    }
  }
}

TEST(Trajectory, RandomPathIsArcLengthParameterised) {
  std::mt19937_64 rng(15);
  TrajectoryConfig cfg = mode_config(TrajectoryMode::random);
  cfg.steps = 1000;
  for (int trial = 0; trial < 20; ++trial) {
    const Trajectory t(cfg, 0.0, rng);
    // Dense polyline length of the Bernstein-form curve.
    double length = 0.0;
    Vec3<double> prev = t.control_points().front();
    for (int i = 1; i <= 200000; ++i) {
      const Vec3<double> p = testing::bernstein_bezier(t.control_points(), i / 200000.0);
      length += (p - prev).norm();
      prev = p;
    }
    const double step = t.speed() * t.dt();
    int moving = 0;
    while (moving < cfg.steps && t.position(moving + 1) != t.position(moving)) {
      // A chord never exceeds the arc it spans; the arc-length table is accurate to ~1e-5.
      EXPECT_LE((t.position(moving + 1) - t.position(moving)).norm(), step * (1.0 + 1e-4));
      ++moving;
    }
    if (moving < cfg.steps) {
      EXPECT_NEAR(moving, length / step, 1.0 + 1e-3 * length / step);
    }
  }
}

TEST(Trajectory, ModeNamesRoundTrip) {
  for (auto m : {TrajectoryMode::rotation, TrajectoryMode::line, TrajectoryMode::circle, TrajectoryMode::random}) {
    EXPECT_EQ(trajectory_mode_from_string(to_string(m)), m);
  }
  EXPECT_THROW(trajectory_mode_from_string("spiral"), InvalidArgument);
}

TEST(Surface, SphereAndBoxPointsLieOnTheSurface) {
  std::mt19937_64 rng(6);
  const Posed pose = random_pose(rng, 0.2);
  const auto sphere = sample_surface_points(ObjectModel::sphere(0.03), pose, 500, 0.0, rng);
  for (Index i = 0; i < 500; ++i) EXPECT_NEAR((sphere.points.col(i) - pose.position).norm(), 0.03, 1e-9);

  const ObjectModel box = ObjectModel::box(0.04, 0.06, 0.1);
  const auto s = sample_surface_points(box, pose, 500, 0.0, rng);
  const Posed inv = pose_inverse(pose);
  for (Index i = 0; i < 500; ++i) {
    const Vec3<double> local = inv * Vec3<double>(s.points.col(i));
    const int face = s.faces[static_cast<std::size_t>(i)];
    const int axis = face / 2;
    const double sign = face % 2 == 0 ? 1.0 : -1.0;
    EXPECT_NEAR(local[axis], sign * 0.5 * box.dims[axis], 1e-9);
    EXPECT_TRUE((local.cwiseAbs().array() <= 0.5 * box.dims.array() + 1e-9).all());
  }
}

TEST(Surface, FaceFrequenciesFollowAreas) {
  std::mt19937_64 rng(7);
  const ObjectModel box = ObjectModel::box(0.02, 0.05, 0.11);
  const Index n = 100000;
  const auto s = sample_surface_points(box, Posed::identity(), n, 0.0, rng);
  std::array<double, 6> count{};
  for (int f : s.faces) count[static_cast<std::size_t>(f)] += 1.0;
  const Vec3<double> d = box.dims;
  const std::array<double, 6> area{d.y() * d.z(), d.y() * d.z(), d.x() * d.z(), d.x() * d.z(), d.x() * d.y(), d.x() * d.y()};
  const double total = std::accumulate(area.begin(), area.end(), 0.0);
  for (std::size_t f = 0; f < 6; ++f) {
    const double p = area[f] / total;
    const double sigma = std::sqrt(n * p * (1 - p));
    EXPECT_LT(std::abs(count[f] - n * p), 3.0 * sigma) << "face " << f;
  }
}

TEST(Surface, CylinderAndBackFaceCulling) {
  std::mt19937_64 rng(8);
  const ObjectModel cyl = ObjectModel::cylinder(0.02, 0.08);
  const auto s = sample_surface_points(cyl, Posed::identity(), 2000, 0.0, rng);
  for (Index i = 0; i < s.points.cols(); ++i) {
    const Vec3<double> p = s.points.col(i);
    if (s.faces[static_cast<std::size_t>(i)] == 0) {
      EXPECT_NEAR(p.head<2>().norm(), 0.02, 1e-12);
    } else {
      EXPECT_NEAR(std::abs(p.z()), 0.04, 1e-12);
    }
  }
  const Vec3<double> eye(0, 0, 1.0);
  const auto front = cull_back_faces(s, eye);
  EXPECT_GT(front.points.cols(), 0);
  for (Index i = 0; i < front.points.cols(); ++i) {
    EXPECT_GT(front.normals.col(i).dot(eye - front.points.col(i)), 0.0);
    EXPECT_NE(front.faces[static_cast<std::size_t>(i)], 2);
  }
}

TEST(Objects, SplitsAreGraspableAndDisjoint) {
  std::mt19937_64 rng(9);
  const GripperModel gripper;
  for (auto split : {ObjectSplit::seen, ObjectSplit::unseen, ObjectSplit::novel}) {
    for (int i = 0; i < 300; ++i) {
      const ObjectModel o = sample_object(split, rng);
      EXPECT_TRUE(o.graspable(gripper));
      EXPECT_EQ(o.split, split);
      EXPECT_FALSE(drop_table_collisions(grasp_oracle(o, Posed::translation({0, 0, o.rest_height()}), gripper), gripper)
                       .empty());
      if (split == ObjectSplit::seen && o.primitive == Primitive::box) {
        EXPECT_LE(o.dims.maxCoeff(), 0.10);
      }
      if (split == ObjectSplit::unseen && o.primitive == Primitive::box) {
        EXPECT_GE(o.dims.maxCoeff(), 0.10);
      }
      if (split == ObjectSplit::seen && o.primitive == Primitive::cylinder) {
        EXPECT_LE(o.dims.x(), 0.025);
      }
      if (split == ObjectSplit::unseen && o.primitive == Primitive::cylinder) {
        EXPECT_GE(o.dims.x(), 0.025);
      }
    }
  }
}

TEST(GraspOracle, BoxGraspsSpanTheNarrowAxis) {
  const GripperModel gripper;
  const GraspSet set = grasp_oracle(ObjectModel::box(0.04, 0.10, 0.10), Posed::identity(), gripper);
  ASSERT_FALSE(set.empty());
  for (const auto& g : set.grasps) {
    EXPECT_NEAR(std::abs(g.closing_axis().x()), 1.0, 1e-12);
    EXPECT_NEAR(g.width, 0.04 + gripper.clearance, 1e-12);
    EXPECT_NEAR(g.approach_axis().dot(g.closing_axis()), 0.0, 1e-12);
    EXPECT_LE(g.approach_axis().z(), 1e-12);  // never from below
    // Contact center lies inside the box between the two gripped faces.
    EXPECT_LE(std::abs(g.center(gripper).x()), 1e-12);
  }
}

TEST(GraspOracle, SphereGraspsThroughTheCenter) {
  const GripperModel gripper;
  const Posed pose = Posed::translation({0.1, -0.2, 0.03});
  const GraspSet set = grasp_oracle(ObjectModel::sphere(0.03), pose, gripper);
  ASSERT_FALSE(set.empty());
  for (const auto& g : set.grasps) {
    EXPECT_LT((g.center(gripper) - pose.position).norm(), 1e-12);
    EXPECT_NEAR(g.width, 0.06 + gripper.clearance, 1e-12);
  }
}

TEST(GraspOracle, UngraspableObjectGivesEmptySet) {
  EXPECT_TRUE(grasp_oracle(ObjectModel::box(0.1, 0.1, 0.1), Posed::identity(), GripperModel{}).empty());
  EXPECT_TRUE(grasp_oracle(ObjectModel::sphere(0.05), Posed::identity(), GripperModel{}).empty());
}

TEST(GraspOracle, FollowsObjectPose) {
  std::mt19937_64 rng(10);
  const GripperModel gripper;
  for (const ObjectModel& obj :
       {ObjectModel::box(0.03, 0.07, 0.09), ObjectModel::cylinder(0.02, 0.08), ObjectModel::sphere(0.025)}) {
    const GraspSet base = grasp_oracle(obj, Posed::identity(), gripper);
    for (int trial = 0; trial < 20; ++trial) {
      const Posed pose = random_pose(rng, 0.3);
      const GraspSet moved = grasp_oracle(obj, pose, gripper);
      ASSERT_EQ(moved.size(), base.size());
      for (std::size_t j = 0; j < base.size(); ++j) {
        const Mat4<double> expected = pose.matrix() * base[j].pose.matrix();
        EXPECT_LT((moved[j].pose.matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(GraspOracle, TableFilterDropsGraspsReachingBelowTheTable) {
  const GripperModel gripper;
  const ObjectModel flat = ObjectModel::box(0.12, 0.12, 0.04);
  const GraspSet all = grasp_oracle(flat, Posed::translation({0, 0, 0.02}), gripper);
  const GraspSet kept = drop_table_collisions(all, gripper);
  EXPECT_LT(kept.size(), all.size());
  for (const auto& g : kept.grasps) {
    EXPECT_GE(transform_points(g.pose, gripper_keypoints(gripper, g.width)).row(2).minCoeff(), 0.0);
  }
}

TEST(Visibility, ConeTest) {
  const GripperModel gripper;
  const double half = M_PI / 4.0;
  auto grasp_with_center = [&](const Vec3<double>& c) {
    return Grasp(Posed::translation(c - Vec3<double>(0, 0, gripper.finger_depth)), 0.05);
  };
  GraspSet ahead(Frame::end_effector, {grasp_with_center({0, 0, 0.3})});
  EXPECT_EQ(visibility_check(ahead, gripper, half, 1.0).size(), 1u);
  GraspSet behind(Frame::end_effector, {grasp_with_center({0, 0, -0.3})});
  EXPECT_TRUE(visibility_check(behind, gripper, half, 1.0).empty());
  GraspSet far(Frame::end_effector, {grasp_with_center({0, 0, 1.3})});
  EXPECT_TRUE(visibility_check(far, gripper, half, 1.0).empty());

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const Vec3<double> c = testing::random_vec(rng, 0.8);
    const GraspSet one(Frame::end_effector, {grasp_with_center(c)});
    // Angle oracle via acos of the normalised dot product.
    const bool expected = c.norm() <= 1.0 && std::acos(c.normalized().z()) <= half;
    EXPECT_EQ(visibility_check(one, gripper, half, 1.0).size() == 1, expected);
  }
}

TEST(MacroTrigger, Thresholds) {
  const Grasp at(Posed::identity(), 0.05);
  EXPECT_TRUE(terminal_macro_trigger(GraspSet(Frame::end_effector, {at})).has_value());
  const Grasp far(Posed::translation({0.06, 0, 0}), 0.05);
  EXPECT_FALSE(terminal_macro_trigger(GraspSet(Frame::end_effector, {far})).has_value());
  // 1 - cos(theta / 2) = 0.04
  const double theta = 2.0 * std::acos(0.96);
  const Grasp near(Posed(Vec3<double>(0.04, 0, 0), Quat<double>(Eigen::AngleAxisd(theta, Vec3<double>::UnitY()))), 0.05);
  EXPECT_NEAR(quat_rotational_distance(near.pose.orientation, Quat<double>::Identity()), 0.04, 1e-12);
  EXPECT_EQ(terminal_macro_trigger(GraspSet(Frame::end_effector, {far, near})), std::optional<std::size_t>(1));
}

EnvConfig static_config() {
  EnvConfig cfg;
  cfg.trajectory.mode = TrajectoryMode::rotation;
  cfg.trajectory.omega_min_deg = 0.0;
  cfg.trajectory.omega_max_deg = 0.0;
  return cfg;
}

TEST(Env, ResetProducesValidObservation) {
  DynGraspEnv env(static_config());
  const Observation obs = env.reset(3);
  EXPECT_NEAR(obs.ee_pose.orientation.norm(), 1.0, 1e-12);
  EXPECT_EQ(obs.grasps.frame, Frame::end_effector);
  EXPECT_FALSE(obs.no_grasp);
  EXPECT_LE(obs.grasps.size(), 12u);
  EXPECT_EQ(obs.grasp_template.points.cols(), 16);
  EXPECT_GT(obs.object_points.cols(), 0);
  EXPECT_FALSE(env.evaluate().stages.approached);
  const auto s = obs.state_vector();
  EXPECT_DOUBLE_EQ(s[7], 0.08);
  EXPECT_DOUBLE_EQ(s[8], 0.0);
}

TEST(Env, ZeroActionOnStaticObjectKeepsDistance) {
  DynGraspEnv env(static_config());
  env.reset(4);
  const Posed object = env.state().object_pose;
  const double d0 = env.evaluate().distance;
  for (int k = 0; k < 100; ++k) {
    const StepResult r = env.step(Action::Zero());
    EXPECT_EQ(env.state().object_pose.position, object.position);
    EXPECT_NEAR(r.info.distance, d0, 1e-12);
    EXPECT_EQ(r.done, k == 99);
  }
  EXPECT_THROW(env.step(Action::Zero()), InvalidArgument);
}

TEST(Env, DeterministicForSeedAndActions) {
  EnvConfig cfg;
  cfg.trajectory.mode = TrajectoryMode::random;
  DynGraspEnv a(cfg), b(cfg);
  a.reset(77);
  b.reset(77);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 100; ++k) {
    Action act;
    for (int i = 0; i < 7; ++i) act[i] = u(rng);
    const StepResult ra = a.step(act), rb = b.step(act);
    ASSERT_EQ(ra.reward, rb.reward);
    ASSERT_EQ(ra.observation.object_points, rb.observation.object_points);
    ASSERT_EQ(ra.observation.grasps.size(), rb.observation.grasps.size());
    for (std::size_t j = 0; j < ra.observation.grasps.size(); ++j) {
      ASSERT_EQ(serialize_grasp(ra.observation.grasps[j]), serialize_grasp(rb.observation.grasps[j]));
    }
    ASSERT_EQ(a.state().object_pose.matrix(), b.state().object_pose.matrix());
    if (ra.done) break;
  }
}

TEST(Env, ScriptedGraspAndLift) {
  DynGraspEnv env(static_config());
  env.reset(5);
  const GraspSet targets = env.target_grasps();
  ASSERT_FALSE(targets.empty());
  env.override_gripper_pose(targets[0].pose);
  EXPECT_NEAR(env.evaluate().distance, 0.0, 1e-12);
  EXPECT_TRUE(env.evaluate().stages.approached);

  Action close = Action::Zero();
  close[6] = 1.0;
  StepResult r = env.step(close);
  EXPECT_TRUE(env.state().attached);
  EXPECT_TRUE(r.info.stages.grasped);
  EXPECT_DOUBLE_EQ(r.info.reward.grasp, 2.0);
  const Posed relative = pose_inverse(env.state().ee_pose) * env.state().object_pose;

  std::vector<double> rewards{r.reward};
  StageFlags prev = r.info.stages;
  while (!r.done) {
    Action up = close;
    up.head<3>() = env.state().ee_pose.orientation.conjugate() * Vec3<double>::UnitZ();
    r = env.step(up);
    rewards.push_back(r.reward);
    const Posed rel = pose_inverse(env.state().ee_pose) * env.state().object_pose;
    EXPECT_LT((rel.matrix() - relative.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(r.info.stages.grasped);
    EXPECT_GE(r.info.stages.lifted, prev.lifted);
    prev = r.info.stages;
  }
  EXPECT_TRUE(r.terminal);
  EXPECT_TRUE(r.info.success);
  EXPECT_TRUE(r.info.stages.lifted && r.info.stages.grasped && r.info.stages.approached);
  EXPECT_DOUBLE_EQ(r.info.reward.lift, 5.0);
  EXPECT_EQ(*std::max_element(rewards.begin(), rewards.end()), rewards.back());
  EXPECT_LE(env.state().step, 100);
}

TEST(Env, MissedCloseOpensNothing) {
  DynGraspEnv env(static_config());
  env.reset(6);
  Action close = Action::Zero();
  close[6] = 1.0;
  const StepResult r = env.step(close);
  EXPECT_FALSE(env.state().attached);
  EXPECT_DOUBLE_EQ(r.observation.opening, 0.0);
  const StepResult open = env.step(Action::Zero());
  EXPECT_DOUBLE_EQ(open.observation.opening, 0.08);
}

TEST(Env, NoVisibleGraspIsPenalised) {
  EnvConfig blind = static_config();
  blind.fov_half_angle_deg = 1e-3;
  DynGraspEnv a(static_config()), b(blind);
  a.reset(7);
  b.reset(7);
  const StepResult ra = a.step(Action::Zero()), rb = b.step(Action::Zero());
  EXPECT_FALSE(ra.observation.no_grasp);
  EXPECT_TRUE(rb.observation.no_grasp);
  EXPECT_DOUBLE_EQ(rb.info.reward.visibility, -0.1);
  EXPECT_LT(rb.reward, ra.reward);
}

TEST(Env, ObjectLeavingTheViewLosesGrasps) {
  DynGraspEnv env(static_config());
  env.reset(8);
  // Point the camera straight up, away from the table.
  Posed up = env.state().ee_pose;
  up.orientation = Quat<double>::Identity();
  const Observation obs = env.override_gripper_pose(up);
  EXPECT_TRUE(obs.no_grasp);
  EXPECT_TRUE(obs.tracking_lost);
  EXPECT_EQ(obs.object_points.cols(), 0);
  const StepResult r = env.step(Action::Zero());
  EXPECT_LT(r.info.reward.visibility, 0.0);
}

TEST(Heuristic, SucceedsOnStaticObjects) {
  DynGraspEnv env(static_config());
  HeuristicController ctl(env.config());
  int success = 0;
  const int episodes = 30;
  for (int e = 0; e < episodes; ++e) {
    Observation obs = env.reset(1000 + e);
    ctl.reset();
    for (;;) {
      const StepResult r = env.step(ctl.act(obs));
      obs = r.observation;
      if (r.done) {
        success += r.info.success;
        break;
      }
    }
  }
  EXPECT_GE(success, 28);
}

TEST(Heuristic, ZeroActionWithoutGraspsAndRetargets) {
  const EnvConfig cfg = static_config();
  GraspMacro macro(cfg);
  Observation empty;
  EXPECT_EQ(macro.act(empty), Action::Zero());

  Observation obs;
  obs.no_grasp = false;
  obs.grasps = GraspSet(Frame::end_effector, {Grasp(Posed::translation({0.1, 0, 0.1}), 0.05),
                                              Grasp(Posed::translation({-0.2, 0, 0.2}), 0.05)});
  EXPECT_GT(macro.act(obs)[0], 0.0);
  // The nearer grasp moves away; the servo switches to the new argmin.
  obs.grasps.grasps[0].pose.position = Vec3<double>(0.5, 0, 0.5);
  EXPECT_LT(macro.act(obs)[0], 0.0);
}

TEST(Heuristic, ServoRespectsCaps) {
  const EnvConfig cfg;
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Action a = servo_action(Grasp(random_pose(rng, 0.3), 0.05), cfg, 1.0);
    EXPECT_LE(a.cwiseAbs().maxCoeff(), 1.0);
    EXPECT_LE(a.head<3>().norm(), 1.0 + 1e-12);
  }
}

}  // namespace
}  // namespace dyngrasp
