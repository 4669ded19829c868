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

// Slow reference implementations used only by tests and `dyngrasp selfcheck`.
// Nothing here calls into the code paths it is used to check.

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace dyngrasp::testing {

using Cloud = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Greedy max-min selection recomputing every distance from scratch.
std::vector<Eigen::Index> brute_force_fps(const Cloud& points, Eigen::Index n, Eigen::Index seed);

/// First M in-radius indices (Euclidean norm test), padded with the nearest member.
std::vector<Eigen::Index> brute_force_ball(const Cloud& points, const Eigen::Vector3d& center, double radius,
                                           Eigen::Index m);

/// Explicit Bernstein-polynomial evaluation of a Bezier curve.
Eigen::Vector3d bernstein_bezier(const std::vector<Eigen::Vector3d>& control, double t);

/// Central finite-difference gradient of f at x.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                   double eps);

/// max_i |a_i - n_i| / max(|a|_inf, |n|_inf, floor): one scale per gradient
/// vector, so tiny entries are judged against the vector's magnitude.
double max_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric, double floor = 1e-8);

}  // namespace dyngrasp::testing
