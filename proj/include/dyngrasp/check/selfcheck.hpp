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

// Analytic and brute-force oracle checks run by `dyngrasp selfcheck` and the
// acceptance gate. Each check is deterministic for a given seed.

#include <cstdint>
#include <string>
#include <vector>

namespace dyngrasp::testing {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Range, symmetry, double cover and closed-form values of 1 - |q1 . q2|.
CheckResult check_quaternion_metric(std::uint64_t seed);
/// Grasp-set distance: squared-position example, brute-force minimum, lowest-index ties.
CheckResult check_grasp_distance(std::uint64_t seed);
/// Cubic midpoint (0.5, 0.75) and agreement with the Bernstein form.
CheckResult check_bezier(std::uint64_t seed);
/// FPS against brute force and the greedy-prefix property on `clouds` random clouds of <= 64 points.
CheckResult check_fps(std::uint64_t seed, int clouds = 200);
/// Ball query against a brute-force scan on `clouds` random clouds.
CheckResult check_ball_query(std::uint64_t seed, int clouds = 200);
/// One entry per trainable block: max relative error < 1e-4 over `draws` draws.
std::vector<CheckResult> check_gradients(std::uint64_t seed, int draws = 100);
/// Exact output equality under intra-grasp and inter-grasp permutation and
/// grasp duplication, over `inputs` random inputs.
CheckResult check_ggn_invariance(std::uint64_t seed, int inputs = 1000);
/// Moving cluster (1 cm/step, 100 steps, 2 mm noise): some center within
/// 5 cm of the centroid at every step, for each of `seeds` runs.
CheckResult check_explorer_tracking(std::uint64_t seed, int seeds = 20);

/// Everything above in a fixed order.
std::vector<CheckResult> run_selfcheck(std::uint64_t seed = 0);

}  // namespace dyngrasp::testing
