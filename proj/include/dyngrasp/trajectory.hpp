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

// Object motion: planar paths on the table with a superposed spin about world z.

#include <random>
#include <string_view>
#include <vector>

#include "dyngrasp/se3.hpp"

namespace dyngrasp {

/// De Casteljau evaluation. Needs at least two control points and t in [0, 1].
Vec3<double> bezier_eval(const std::vector<Vec3<double>>& control, double t);

enum class TrajectoryMode { rotation, line, circle, random };

std::string_view to_string(TrajectoryMode m);
TrajectoryMode trajectory_mode_from_string(std::string_view s);

struct TrajectoryConfig {
  TrajectoryMode mode = TrajectoryMode::rotation;
  double speed_min = 0.01;  ///< m/s
  double speed_max = 0.05;
  double omega_min_deg = -10.0;  ///< deg/s about world z
  double omega_max_deg = 10.0;
  int control_points = 4;
  double circle_radius_min = 0.05;
  double circle_radius_max = 0.15;
  double line_min_length = 0.1;
  /// Planar extent of the path (x, y); paths never leave it.
  double xy_min = -0.3;
  double xy_max = 0.3;
  double dt = 0.1;  ///< seconds per step
  int steps = 100;

  void validate() const;
};

/// A sampled path. pose(k) is the object pose after k steps.
class Trajectory {
 public:
  Trajectory(const TrajectoryConfig& cfg, double height, std::mt19937_64& rng);

  Vec3<double> position(int step) const;
  double yaw(int step) const { return yaw0_ + omega_ * step * dt_; }
  Posed pose(int step) const;

  TrajectoryMode mode() const { return mode_; }
  double speed() const { return speed_; }
  double omega() const { return omega_; }  ///< rad/s
  double dt() const { return dt_; }
  const Vec3<double>& circle_center() const { return center_; }
  double circle_radius() const { return radius_; }
  const std::vector<Vec3<double>>& control_points() const { return control_; }

 private:
  Vec3<double> along_curve(double s) const;

  TrajectoryMode mode_;
  double dt_, speed_, omega_, yaw0_;
  double height_;
  Vec3<double> start_{Vec3<double>::Zero()}, end_{Vec3<double>::Zero()};
  Vec3<double> center_{Vec3<double>::Zero()};
  double radius_ = 0.0, phase_ = 0.0, direction_ = 1.0;
  std::vector<Vec3<double>> control_;
  std::vector<double> arc_t_, arc_s_;  // arc-length table for the Bezier path
};

}  // namespace dyngrasp
