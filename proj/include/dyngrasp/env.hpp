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

// Kinematic dynamic-grasping environment.
//
// World frame: z up, table top at z = 0. A procedural object moves along a
// trajectory while a free-floating parallel-jaw gripper, controlled by
// bounded residual actions in its own frame, tries to grasp and lift it.
// Closing within tolerance of an oracle grasp attaches the object rigidly to
// the gripper; there is no contact simulation.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dyngrasp/cloud.hpp"
#include "dyngrasp/grasp_points.hpp"
#include "dyngrasp/objects.hpp"
#include "dyngrasp/trajectory.hpp"

namespace dyngrasp {

/// [tx, ty, tz, rx, ry, rz, grip], each in [-1, 1] after clamping.
/// Translation and rotation are residuals in the end-effector frame; the
/// rotation is R = Rz(rz) Ry(ry) Rx(rx). grip > 0 closes the gripper.
using Action = Eigen::Matrix<double, 7, 1>;

inline constexpr int kActionDim = 7;
/// Pose (7), gripper opening, no-grasp flag.
inline constexpr int kStateDim = 9;

struct RewardWeights {
  double approach = 1.0;
  double grasp = 2.0;
  double lift = 5.0;
  double visibility = 0.1;
};

struct EnvConfig {
  TrajectoryConfig trajectory;
  ObjectSplit split = ObjectSplit::seen;
  GripperModel gripper;
  ExplorerParams explorer{0.05, 32, 12, 4, 0.05};
  WorkspaceBox workspace{{-0.35, -0.35, -0.01}, {0.35, 0.35, 0.35}};

  Index surface_points = 256;
  double noise_std = 0.002;
  /// Oracle grasps whose center lies within this distance of a region center are detected.
  double detect_radius = 0.08;
  double fov_half_angle_deg = 45.0;
  double max_range = 1.0;
  Index max_grasps = 12;
  Index raw_points = 128;
  Index template_points = 16;

  double max_translation = 0.01;  ///< m per step
  double max_rotation_deg = 3.0;  ///< per Euler angle per step
  double attach_position_tol = 0.01;
  double attach_rotation_tol = 0.1;
  double approach_position_tol = 0.05;
  double approach_rotation_tol = 0.05;
  double lift_height = 0.05;
  RewardWeights reward;

  double start_height_min = 0.18;
  double start_height_max = 0.26;
  double start_lateral = 0.08;

  int max_steps() const { return trajectory.steps; }
  void validate() const;
};

struct StageFlags {
  bool approached = false;
  bool grasped = false;
  bool lifted = false;

  std::array<float, 3> labels() const {
    return {approached ? 1.0f : 0.0f, grasped ? 1.0f : 0.0f, lifted ? 1.0f : 0.0f};
  }
};

struct Observation {
  /// Visible detected grasps in the end-effector frame, nearest first, at most max_grasps.
  GraspSet grasps{Frame::end_effector};
  /// Visible surface points in the end-effector frame, at most raw_points.
  PointCloud object_points = PointCloud(3, 0);
  GaussianTemplate grasp_template;
  Posed ee_pose;  ///< world
  double opening = 0.0;
  bool no_grasp = true;
  bool tracking_lost = false;

  Eigen::Matrix<double, kStateDim, 1> state_vector() const;
};

struct RewardTerms {
  double approach = 0.0;
  double grasp = 0.0;
  double lift = 0.0;
  double visibility = 0.0;
  double total() const { return approach + grasp + lift + visibility; }
};

struct StepInfo {
  RewardTerms reward;
  StageFlags stages;
  /// Grasp-set distance from the gripper to the nearest target grasp.
  double distance = 0.0;
  /// That target grasp in the end-effector frame.
  std::optional<Grasp> nearest_target;
  bool success = false;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;      ///< episode over (success or time limit)
  bool terminal = false;  ///< episode over because of success; no bootstrapping past it
  StepInfo info;
};

/// Keeps grasps whose center lies inside the forward cone of the frame the
/// set is expressed in: angle to +z at most the half angle, range at most max_range.
GraspSet visibility_check(const GraspSet& ee_grasps, const GripperModel& gripper, double fov_half_angle_rad,
                          double max_range);

/// First grasp (in set order) within `position_tol` (unsquared) and
/// `rotation_tol` of `ee`, or nullopt.
std::optional<std::size_t> find_grasp_within(const GraspSet& set, const Posed& ee, double position_tol,
                                             double rotation_tol);

/// The switch from policy to the scripted close: 0.05 m and 0.05 rotational distance.
std::optional<std::size_t> terminal_macro_trigger(const GraspSet& ee_grasps, const Posed& ee = Posed::identity());

struct EnvState {
  Posed object_pose;
  Posed ee_pose;
  double opening = 0.0;
  int step = 0;
  bool attached = false;
  Posed object_in_gripper;
  StageFlags stages;
};

class DynGraspEnv {
 public:
  explicit DynGraspEnv(EnvConfig cfg);

  /// Starts an episode; everything random in it derives from `seed`.
  Observation reset(std::uint64_t seed);
  StepResult step(const Action& action);

  const EnvConfig& config() const { return cfg_; }
  const EnvState& state() const { return state_; }
  const ObjectModel& object() const { return object_; }
  const Trajectory& trajectory() const { return *trajectory_; }
  const Observation& last_observation() const { return last_obs_; }
  /// All table-safe oracle grasps at the current object pose, world frame.
  GraspSet target_grasps() const;
  /// Stage flags and nearest-target data for the current state.
  StepInfo evaluate() const;

  /// Teleports the gripper and refreshes the observation. Test hook.
  Observation override_gripper_pose(const Posed& ee);

 private:
  Observation observe();
  RewardTerms reward_terms(const StepInfo& info, bool just_grasped, bool just_lifted, bool no_grasp) const;

  EnvConfig cfg_;
  std::mt19937_64 rng_;
  ObjectModel object_;
  std::optional<Trajectory> trajectory_;
  GaussianTemplate template_;
  EnvState state_;
  RegionCenters centers_;
  Observation last_obs_;
};

/// Proportional step toward a grasp given in the end-effector frame:
/// translation and rotation each limited to the per-step caps.
Action servo_action(const Grasp& target_ee, const EnvConfig& cfg, double grip);

/// Move-to-grasp, close, retract. Used by the heuristic baseline from the
/// start and by policy evaluation once terminal_macro_trigger fires.
class GraspMacro {
 public:
  enum class Phase { servo, closing, retract };

  explicit GraspMacro(const EnvConfig& cfg) : cfg_(cfg) {}
  Action act(const Observation& obs);
  Phase phase() const { return phase_; }
  void reset() { phase_ = Phase::servo; }

 private:
  EnvConfig cfg_;
  Phase phase_ = Phase::servo;
};

/// Tracks the nearest visible grasp and runs the macro on it; zero action
/// when nothing is visible.
class HeuristicController {
 public:
  explicit HeuristicController(const EnvConfig& cfg) : macro_(cfg) {}
  Action act(const Observation& obs) { return macro_.act(obs); }
  void reset() { macro_.reset(); }

 private:
  GraspMacro macro_;
};

}  // namespace dyngrasp
