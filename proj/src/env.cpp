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

#include "dyngrasp/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dyngrasp/errors.hpp"

namespace dyngrasp {
namespace {

constexpr double kDegToRad = M_PI / 180.0;

Quat<double> top_down(double yaw) {
  return Quat<double>(Eigen::AngleAxisd(yaw, Vec3<double>::UnitZ()) * Eigen::AngleAxisd(M_PI, Vec3<double>::UnitX()));
}

/// Points whose direction from the origin is within the cone about +z.
std::vector<Index> in_cone(const PointCloud& ee_points, double half_angle, double max_range) {
  const double cos_half = std::cos(half_angle);
  std::vector<Index> keep;
  for (Index i = 0; i < ee_points.cols(); ++i) {
    const double r = ee_points.col(i).norm();
    if (r > 0.0 && r <= max_range && ee_points(2, i) >= cos_half * r) keep.push_back(i);
  }
  return keep;
}

}  // namespace

void EnvConfig::validate() const {
  trajectory.validate();
  explorer.validate();
  if (surface_points < 1 || max_grasps < 1 || raw_points < 0 || template_points < 1) {
    throw InvalidArgument("env: point and grasp counts must be positive");
  }
  if (!(max_translation > 0.0 && max_rotation_deg > 0.0)) throw InvalidArgument("env: action caps must be positive");
  if (!(fov_half_angle_deg > 0.0 && fov_half_angle_deg < 90.0 && max_range > 0.0)) {
    throw InvalidArgument("env: bad camera cone");
  }
  if (!(start_height_min > 0.0 && start_height_min <= start_height_max && start_lateral >= 0.0)) {
    throw InvalidArgument("env: bad gripper start range");
  }
  if (!(lift_height > 0.0 && detect_radius > 0.0 && noise_std >= 0.0)) throw InvalidArgument("env: bad tolerances");
}

Eigen::Matrix<double, kStateDim, 1> Observation::state_vector() const {
  Eigen::Matrix<double, kStateDim, 1> s;
  const auto pose = serialize_pose(ee_pose);
  for (int i = 0; i < 7; ++i) s[i] = pose[static_cast<std::size_t>(i)];
  s[7] = opening;
  s[8] = no_grasp ? 1.0 : 0.0;
  return s;
}

GraspSet visibility_check(const GraspSet& ee_grasps, const GripperModel& gripper, double fov_half_angle_rad,
                          double max_range) {
  const double cos_half = std::cos(fov_half_angle_rad);
  GraspSet out(ee_grasps.frame);
  for (const auto& g : ee_grasps.grasps) {
    const Vec3<double> c = g.center(gripper);
    const double r = c.norm();
    if (r > 0.0 && r <= max_range && c.z() >= cos_half * r) out.grasps.push_back(g);
  }
  return out;
}

std::optional<std::size_t> find_grasp_within(const GraspSet& set, const Posed& ee, double position_tol,
                                             double rotation_tol) {
  for (std::size_t j = 0; j < set.size(); ++j) {
    const Posed& p = set[j].pose;
    if ((p.position - ee.position).norm() < position_tol &&
        quat_rotational_distance(p.orientation, ee.orientation) < rotation_tol) {
      return j;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> terminal_macro_trigger(const GraspSet& ee_grasps, const Posed& ee) {
  return find_grasp_within(ee_grasps, ee, 0.05, 0.05);
}

DynGraspEnv::DynGraspEnv(EnvConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

GraspSet DynGraspEnv::target_grasps() const {
  return drop_table_collisions(grasp_oracle(object_, state_.object_pose, cfg_.gripper), cfg_.gripper);
}

Observation DynGraspEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  object_ = sample_object(cfg_.split, rng_);
  trajectory_.emplace(cfg_.trajectory, object_.rest_height(), rng_);
  template_ = sample_gaussian_template(cfg_.template_points, cfg_.gripper.max_opening, rng_,
                                       static_cast<std::int64_t>(seed));
  state_ = EnvState{};
  state_.object_pose = trajectory_->pose(0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lateral = cfg_.start_lateral * std::sqrt(u(rng_));
  const double phi = 2.0 * M_PI * u(rng_);
  const double height = cfg_.start_height_min + (cfg_.start_height_max - cfg_.start_height_min) * u(rng_);
  state_.ee_pose = Posed(state_.object_pose.position + Vec3<double>(lateral * std::cos(phi), lateral * std::sin(phi), height),
                         top_down(2.0 * M_PI * u(rng_)));
  state_.opening = cfg_.gripper.max_opening;
  centers_ = RegionCenters{};
  last_obs_ = observe();
  state_.stages = evaluate().stages;
  return last_obs_;
}

Observation DynGraspEnv::override_gripper_pose(const Posed& ee) {
  state_.ee_pose = ee;
  last_obs_ = observe();
  return last_obs_;
}

Observation DynGraspEnv::observe() {
  Observation obs;
  obs.grasp_template = template_;
  obs.ee_pose = state_.ee_pose;
  obs.opening = state_.opening;
  const Posed world_to_ee = pose_inverse(state_.ee_pose);
  const double half_angle = cfg_.fov_half_angle_deg * kDegToRad;

  // Egocentric camera proxy: front-facing surface inside the view cone.
  const SurfaceSample surface =
      cull_back_faces(sample_surface_points(object_, state_.object_pose, cfg_.surface_points, cfg_.noise_std, rng_),
                      state_.ee_pose.position);
  const PointCloud ee_points = transform_points(world_to_ee, surface.points);
  const std::vector<Index> visible = in_cone(ee_points, half_angle, cfg_.max_range);
  const PointCloud world_points = gather(surface.points, visible);

  try {
    centers_ = centers_.empty() ? explorer_init(world_points, cfg_.workspace, cfg_.explorer)
                                : explorer_step(centers_, world_points, cfg_.explorer, cfg_.workspace);
  } catch (const TrackingLost&) {
    centers_ = RegionCenters{};
    obs.tracking_lost = true;
  }

  GraspSet detected(Frame::world);
  if (!centers_.empty()) {
    const double r2 = cfg_.detect_radius * cfg_.detect_radius;
    for (const auto& g : target_grasps().grasps) {
      const Vec3<double> c = g.center(cfg_.gripper);
      if (((centers_.centers.colwise() - c).colwise().squaredNorm().array() <= r2).any()) detected.grasps.push_back(g);
    }
  }
  GraspSet seen = visibility_check(transform_grasps(world_to_ee, detected, Frame::end_effector), cfg_.gripper,
                                   half_angle, cfg_.max_range);
  std::vector<double> d(seen.size());
  for (std::size_t j = 0; j < seen.size(); ++j) d[j] = grasp_pose_distance(seen[j].pose, Posed::identity());
  std::vector<std::size_t> order(seen.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(cfg_.max_grasps)));
  for (std::size_t j : order) obs.grasps.grasps.push_back(seen[j]);
  obs.no_grasp = obs.grasps.empty();

  const Index raw = std::min<Index>(cfg_.raw_points, static_cast<Index>(visible.size()));
  obs.object_points = gather(ee_points, std::vector<Index>(visible.begin(), visible.begin() + raw));
  return obs;
}

StepInfo DynGraspEnv::evaluate() const {
  StepInfo info;
  info.stages.grasped = state_.attached;
  info.stages.lifted = state_.attached &&
                       state_.object_pose.position.z() >= object_.rest_height() + cfg_.lift_height - 1e-12;
  const GraspSet targets = target_grasps();
  if (!targets.empty()) {
    const GraspDistance nearest = grasp_set_distance(targets, state_.ee_pose);
    info.distance = nearest.distance;
    info.nearest_target = transform_grasps(pose_inverse(state_.ee_pose), GraspSet(Frame::world, {targets[nearest.index]}),
                                           Frame::end_effector)[0];
  }
  info.stages.approached =
      state_.attached ||
      find_grasp_within(targets, state_.ee_pose, cfg_.approach_position_tol, cfg_.approach_rotation_tol).has_value();
  info.success = info.stages.lifted;
  return info;
}

RewardTerms DynGraspEnv::reward_terms(const StepInfo& info, bool just_grasped, bool just_lifted, bool no_grasp) const {
  RewardTerms r;
  r.approach = -cfg_.reward.approach * info.distance;
  r.grasp = just_grasped ? cfg_.reward.grasp : 0.0;
  r.lift = just_lifted ? cfg_.reward.lift : 0.0;
  r.visibility = no_grasp ? -cfg_.reward.visibility : 0.0;
  return r;
}

StepResult DynGraspEnv::step(const Action& action) {
  if (!trajectory_) throw InvalidArgument("step() called before reset()");
  if (state_.step >= cfg_.max_steps() || state_.stages.lifted) throw InvalidArgument("step() after episode end");
  const Action a = action.cwiseMax(-1.0).cwiseMin(1.0);
  if (!a.allFinite()) throw InvalidArgument("step(): non-finite action");

  const double rot_cap = cfg_.max_rotation_deg * kDegToRad;
  const Posed delta(a.head<3>() * cfg_.max_translation, quat_from_zyx(a[5] * rot_cap, a[4] * rot_cap, a[3] * rot_cap));
  state_.ee_pose = state_.ee_pose * delta;
  state_.ee_pose.position = state_.ee_pose.position.cwiseMax(cfg_.workspace.min_corner).cwiseMin(
      cfg_.workspace.max_corner + Vec3<double>(0, 0, 0.3));

  // The grasp test uses the object where it was when the command was issued.
  bool just_grasped = false;
  const bool close = a[6] > 0.0;
  if (!state_.attached) {
    if (close && state_.opening > 0.0) {
      const GraspSet targets = target_grasps();
      const auto hit =
          find_grasp_within(targets, state_.ee_pose, cfg_.attach_position_tol, cfg_.attach_rotation_tol);
      if (hit && targets[*hit].width <= cfg_.gripper.max_opening) {
        state_.attached = true;
        state_.object_in_gripper = pose_inverse(state_.ee_pose) * state_.object_pose;
        state_.opening = targets[*hit].width - cfg_.gripper.clearance;
        just_grasped = true;
      } else {
        state_.opening = 0.0;
      }
    } else if (!close) {
      state_.opening = cfg_.gripper.max_opening;
    }
  }

  ++state_.step;
  state_.object_pose = state_.attached ? state_.ee_pose * state_.object_in_gripper : trajectory_->pose(state_.step);

  StepResult out;
  out.observation = observe();
  out.info = evaluate();
  const bool was_lifted = state_.stages.lifted;
  state_.stages = out.info.stages;
  out.info.reward = reward_terms(out.info, just_grasped, out.info.stages.lifted && !was_lifted, out.observation.no_grasp);
  out.reward = out.info.reward.total();
  out.terminal = out.info.stages.lifted;
  out.done = out.terminal || state_.step >= cfg_.max_steps();
  last_obs_ = out.observation;
  return out;
}

Action servo_action(const Grasp& target_ee, const EnvConfig& cfg, double grip) {
  Action a = Action::Zero();
  Vec3<double> t = target_ee.pose.position;
  if (t.norm() > cfg.max_translation) t *= cfg.max_translation / t.norm();
  a.head<3>() = t / cfg.max_translation;

  const double cap = cfg.max_rotation_deg * kDegToRad;
  Eigen::AngleAxisd aa(target_ee.pose.orientation);
  if (aa.angle() > M_PI) aa.angle() -= 2.0 * M_PI;
  // Per-angle cap, with margin for the ZYX decomposition of an axis-angle step.
  aa.angle() = std::clamp(aa.angle(), -0.9 * cap, 0.9 * cap);
  const Vec3<double> ypr = zyx_from_quat(Quat<double>(aa));
  a[3] = ypr[2] / cap;
  a[4] = ypr[1] / cap;
  a[5] = ypr[0] / cap;
  a[6] = grip;
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

Action GraspMacro::act(const Observation& obs) {
  switch (phase_) {
    case Phase::servo: {
      if (obs.no_grasp) return Action::Zero();
      const GraspDistance nearest = grasp_set_distance(obs.grasps, Posed::identity());
      const Grasp& g = obs.grasps[nearest.index];
      const bool aligned = g.pose.position.norm() < 0.7 * cfg_.attach_position_tol &&
                           quat_rotational_distance(g.pose.orientation, Quat<double>::Identity()) <
                               0.7 * cfg_.attach_rotation_tol;
      if (aligned) {
        phase_ = Phase::closing;
        return servo_action(g, cfg_, 1.0);
      }
      return servo_action(g, cfg_, -1.0);
    }
    case Phase::closing:
      if (obs.opening <= 0.0) {
        // Closed on nothing: reopen and keep tracking.
        phase_ = Phase::servo;
        Action a = Action::Zero();
        a[6] = -1.0;
        return a;
      }
      phase_ = Phase::retract;
      [[fallthrough]];
    case Phase::retract: {
      Action a = Action::Zero();
      a.head<3>() = obs.ee_pose.orientation.conjugate() * Vec3<double>::UnitZ();
      a.head<3>() /= a.head<3>().cwiseAbs().maxCoeff();
      a[6] = 1.0;
      return a;
    }
  }
  return Action::Zero();
}

}  // namespace dyngrasp
