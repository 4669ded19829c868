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

#include "dyngrasp/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "dyngrasp/errors.hpp"

namespace dyngrasp {
namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr int kArcSamples = 2048;

}  // namespace

Vec3<double> bezier_eval(const std::vector<Vec3<double>>& control, double t) {
  if (control.size() < 2) throw InvalidArgument("bezier_eval: need at least two control points");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("bezier_eval: t outside [0, 1]");
  std::vector<Vec3<double>> p = control;
  for (std::size_t level = p.size() - 1; level > 0; --level) {
    for (std::size_t i = 0; i < level; ++i) p[i] = (1.0 - t) * p[i] + t * p[i + 1];
  }
  return p.front();
}

std::string_view to_string(TrajectoryMode m) {
  switch (m) {
    case TrajectoryMode::rotation: return "rotation";
    case TrajectoryMode::line: return "line";
    case TrajectoryMode::circle: return "circle";
    case TrajectoryMode::random: return "random";
  }
  return "?";
}

TrajectoryMode trajectory_mode_from_string(std::string_view s) {
  for (auto m : {TrajectoryMode::rotation, TrajectoryMode::line, TrajectoryMode::circle, TrajectoryMode::random}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidArgument("unknown trajectory mode: " + std::string(s));
}

void TrajectoryConfig::validate() const {
  if (!(speed_min >= 0.0 && speed_min <= speed_max)) throw InvalidArgument("trajectory: bad speed range");
  if (!(omega_min_deg <= omega_max_deg)) throw InvalidArgument("trajectory: bad angular speed range");
  if (control_points < 2) throw InvalidArgument("trajectory: need at least two control points");
  if (!(circle_radius_min > 0.0 && circle_radius_min <= circle_radius_max)) {
    throw InvalidArgument("trajectory: bad circle radius range");
  }
  if (!(xy_min < xy_max) || 2.0 * circle_radius_max >= xy_max - xy_min) {
    throw InvalidArgument("trajectory: workspace too small");
  }
  if (!(line_min_length >= 0.0 && line_min_length < (xy_max - xy_min))) {
    throw InvalidArgument("trajectory: bad minimum line length");
  }
  if (!(dt > 0.0) || steps < 1) throw InvalidArgument("trajectory: dt and steps must be positive");
}

Trajectory::Trajectory(const TrajectoryConfig& cfg, double height, std::mt19937_64& rng)
    : mode_(cfg.mode), dt_(cfg.dt), height_(height) {
  cfg.validate();
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto planar = [&](double margin) {
    return Vec3<double>(uniform(cfg.xy_min + margin, cfg.xy_max - margin),
                        uniform(cfg.xy_min + margin, cfg.xy_max - margin), height);
  };
  speed_ = uniform(cfg.speed_min, cfg.speed_max);
  omega_ = uniform(cfg.omega_min_deg, cfg.omega_max_deg) * kDegToRad;
  yaw0_ = uniform(-M_PI, M_PI);

  switch (mode_) {
    case TrajectoryMode::rotation:
      start_ = planar(0.0);
      break;
    case TrajectoryMode::line:
      do {
        start_ = planar(0.0);
        end_ = planar(0.0);
      } while ((end_ - start_).norm() < cfg.line_min_length);
      break;
    case TrajectoryMode::circle:
      radius_ = uniform(cfg.circle_radius_min, cfg.circle_radius_max);
      center_ = planar(radius_);
      phase_ = uniform(-M_PI, M_PI);
      direction_ = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      break;
    case TrajectoryMode::random: {
      for (int i = 0; i < cfg.control_points; ++i) control_.push_back(planar(0.0));
      // Constant-speed resampling: tabulate cumulative chord length over t.
      arc_t_.resize(kArcSamples + 1);
      arc_s_.resize(kArcSamples + 1);
      Vec3<double> prev = control_.front();
      arc_s_[0] = 0.0;
      for (int i = 0; i <= kArcSamples; ++i) {
        const double t = static_cast<double>(i) / kArcSamples;
        const Vec3<double> p = bezier_eval(control_, t);
        arc_t_[static_cast<std::size_t>(i)] = t;
        if (i > 0) arc_s_[static_cast<std::size_t>(i)] = arc_s_[static_cast<std::size_t>(i - 1)] + (p - prev).norm();
        prev = p;
      }
      break;
    }
  }
}

Vec3<double> Trajectory::along_curve(double s) const {
  if (s >= arc_s_.back()) return control_.back();
  const auto it = std::upper_bound(arc_s_.begin(), arc_s_.end(), s);
  const auto hi = static_cast<std::size_t>(it - arc_s_.begin());
  const std::size_t lo = hi - 1;
  const double span = arc_s_[hi] - arc_s_[lo];
  const double f = span > 0.0 ? (s - arc_s_[lo]) / span : 0.0;
  return bezier_eval(control_, arc_t_[lo] + f * (arc_t_[hi] - arc_t_[lo]));
}

Vec3<double> Trajectory::position(int step) const {
  const double s = speed_ * step * dt_;
  switch (mode_) {
    case TrajectoryMode::rotation:
      return start_;
    case TrajectoryMode::line: {
      const double length = (end_ - start_).norm();
      return start_ + std::min(s, length) / length * (end_ - start_);
    }
    case TrajectoryMode::circle: {
      const double phi = phase_ + direction_ * s / radius_;
      return center_ + radius_ * Vec3<double>(std::cos(phi), std::sin(phi), 0.0);
    }
    case TrajectoryMode::random:
      return along_curve(s);
  }
  return start_;
}

Posed Trajectory::pose(int step) const {
  return Posed(position(step), Quat<double>(Eigen::AngleAxisd(yaw(step), Vec3<double>::UnitZ())));
}

}  // namespace dyngrasp
