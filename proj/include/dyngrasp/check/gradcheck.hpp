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

// Finite-difference gradient checks for the network building blocks.
// Used by the unit tests, the acceptance gate and `dyngrasp selfcheck`.

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dyngrasp/nets.hpp"

namespace dyngrasp::testing {

using MatD = nets::Matrix<double>;

/// A scalar loss over a set of tensors together with its analytic gradient.
/// `analytic` must overwrite every entry of `grads`.
struct GradProbe {
  std::vector<MatD*> values;
  std::vector<MatD*> grads;
  std::function<double()> loss;
  std::function<void()> analytic;
  /// Smallest distance of any ReLU pre-activation, pooling gap or clamp bound
  /// from its kink at the current values.
  std::function<double()> margin;
  std::shared_ptr<void> owner;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  int draws = 0;
  int rejected = 0;
};

using ProbeFactory = std::function<GradProbe(std::mt19937_64&)>;

/// Central differences on every entry of every value tensor.
double probe_relative_error(GradProbe& probe, double eps);

/// Draws probes until `draws` of them have kink margin >= min_margin and
/// reports the worst relative error among those.
GradCheckResult run_gradcheck(const ProbeFactory& make, int draws, std::uint64_t seed, double eps = 1e-5,
                              double min_margin = 1e-3);

ProbeFactory dense_probe();
ProbeFactory ggn_probe();
ProbeFactory pn_flat_probe();
ProbeFactory nined_probe();
ProbeFactory heads_probe();

/// Named list of every probe above, in a fixed order.
std::vector<std::pair<std::string, ProbeFactory>> all_probes();

/// Smallest (max - runner-up) over every row and group whose max is positive.
double pool_gap(const MatD& x, Eigen::Index group);
double relu_margin(const nets::DenseStack<double>::Cache& cache, const nets::DenseStack<double>& stack);

}  // namespace dyngrasp::testing
