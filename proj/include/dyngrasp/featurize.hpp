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

// Compact observation storage and batch featurization.
//
// Replay stores grasps as (pose, width) columns plus the episode's template;
// the encoder input for whichever representation is in use is rebuilt from
// that at batch time. Every sample in a batch gets exactly max_grasps groups:
// short sets are padded by repeating their first grasp, which max pooling
// ignores. Samples without any grasp get all-zero input and are flagged so
// the agent can substitute the zero feature.

#include <string_view>
#include <vector>

#include "dyngrasp/env.hpp"
#include "dyngrasp/nets.hpp"

namespace dyngrasp {

enum class Representation { gaussian_points, keypoints, nined, object_points_raw };

std::string_view to_string(Representation r);
Representation representation_from_string(std::string_view s);
std::string_view to_string(nets::EncoderKind k);
nets::EncoderKind encoder_kind_from_string(std::string_view s);

/// Throws InvalidArgument for pairs that cannot work together
/// (9D features need the 9D encoder, which accepts nothing else).
void check_compatible(Representation rep, nets::EncoderKind enc);

struct CompactObservation {
  /// Per column: px, py, pz, qw, qx, qy, qz, width (end-effector frame).
  Eigen::Matrix<float, 8, Eigen::Dynamic> grasps;
  Eigen::Matrix<float, 3, Eigen::Dynamic> grasp_template;
  double template_width = 0.0;
  /// Raw surface points in the end-effector frame; kept only for object_points_raw.
  Eigen::Matrix<float, 3, Eigen::Dynamic> points;
  Eigen::Matrix<float, kStateDim, 1> state;

  bool empty(Representation rep) const {
    return rep == Representation::object_points_raw ? points.cols() == 0 : grasps.cols() == 0;
  }
};

CompactObservation compact(const Observation& obs, Representation rep, Index max_grasps);

struct FeaturizerConfig {
  Representation rep = Representation::gaussian_points;
  Index max_grasps = 12;
  Index template_points = 16;
  Index raw_points = 128;
  GripperModel gripper;
  TemplateScaling scaling = TemplateScaling::nominal;

  Index input_rows() const { return rep == Representation::nined ? 9 : 3; }
  Index groups() const { return rep == Representation::object_points_raw ? 1 : max_grasps; }
  Index group_size() const;
};

template <typename S>
struct FeatureBatch {
  nets::SetBatch<S> set;
  nets::Matrix<S> state;    // kStateDim x B
  std::vector<bool> empty;  // true where the sample has no grasp (or no points)
};

/// Encoder input for one sample, as double: rows x (groups * group_size).
nets::Matrix<double> featurize_one(const CompactObservation& obs, const FeaturizerConfig& cfg);

template <typename S>
FeatureBatch<S> featurize(const std::vector<const CompactObservation*>& batch, const FeaturizerConfig& cfg) {
  FeatureBatch<S> out;
  const Index b = static_cast<Index>(batch.size());
  const Index width = cfg.groups() * cfg.group_size();
  out.set.samples = b;
  out.set.groups = cfg.groups();
  out.set.group_size = cfg.group_size();
  out.set.data.resize(cfg.input_rows(), b * width);
  out.state.resize(kStateDim, b);
  out.empty.resize(static_cast<std::size_t>(b));
  for (Index i = 0; i < b; ++i) {
    const CompactObservation& o = *batch[static_cast<std::size_t>(i)];
    out.set.data.middleCols(i * width, width) = featurize_one(o, cfg).cast<S>();
    out.state.col(i) = o.state.cast<S>();
    out.empty[static_cast<std::size_t>(i)] = o.empty(cfg.rep);
  }
  return out;
}

}  // namespace dyngrasp
