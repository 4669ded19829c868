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

#include "dyngrasp/featurize.hpp"

#include "dyngrasp/errors.hpp"

namespace dyngrasp {

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::gaussian_points: return "gaussian_points";
    case Representation::keypoints: return "keypoints";
    case Representation::nined: return "ninety_d";
    case Representation::object_points_raw: return "object_points_raw";
  }
  return "?";
}

Representation representation_from_string(std::string_view s) {
  for (auto r : {Representation::gaussian_points, Representation::keypoints, Representation::nined,
                 Representation::object_points_raw}) {
    if (to_string(r) == s) return r;
  }
  throw InvalidArgument("unknown representation: " + std::string(s));
}

std::string_view to_string(nets::EncoderKind k) {
  switch (k) {
    case nets::EncoderKind::ggn: return "ggn";
    case nets::EncoderKind::pn_flat: return "pn_flat";
    case nets::EncoderKind::nined: return "ninety_d_encoder";
  }
  return "?";
}

nets::EncoderKind encoder_kind_from_string(std::string_view s) {
  for (auto k : {nets::EncoderKind::ggn, nets::EncoderKind::pn_flat, nets::EncoderKind::nined}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown encoder: " + std::string(s));
}

void check_compatible(Representation rep, nets::EncoderKind enc) {
  const bool nined_rep = rep == Representation::nined;
  const bool nined_enc = enc == nets::EncoderKind::nined;
  if (nined_rep != nined_enc) throw InvalidArgument("ninety_d features pair only with ninety_d_encoder");
  if (rep == Representation::object_points_raw && enc != nets::EncoderKind::pn_flat) {
    throw InvalidArgument("object_points_raw pairs only with pn_flat");
  }
}

Index FeaturizerConfig::group_size() const {
  switch (rep) {
    case Representation::gaussian_points: return template_points;
    case Representation::keypoints: return kKeypointsPerGrasp;
    case Representation::nined: return 1;
    case Representation::object_points_raw: return raw_points;
  }
  return 1;
}

CompactObservation compact(const Observation& obs, Representation rep, Index max_grasps) {
  CompactObservation c;
  const Index n = std::min<Index>(max_grasps, static_cast<Index>(obs.grasps.size()));
  c.grasps.resize(8, n);
  for (Index j = 0; j < n; ++j) {
    const Grasp& g = obs.grasps[static_cast<std::size_t>(j)];
    const auto s = serialize_grasp(g);
    for (int k = 0; k < 8; ++k) c.grasps(k, j) = static_cast<float>(s[static_cast<std::size_t>(k)]);
  }
  c.grasp_template = obs.grasp_template.points.cast<float>();
  c.template_width = obs.grasp_template.width;
  if (rep == Representation::object_points_raw) c.points = obs.object_points.cast<float>();
  c.state = obs.state_vector().cast<float>();
  return c;
}

nets::Matrix<double> featurize_one(const CompactObservation& obs, const FeaturizerConfig& cfg) {
  const Index rows = cfg.input_rows();
  const Index size = cfg.group_size();
  nets::Matrix<double> out = nets::Matrix<double>::Zero(rows, cfg.groups() * size);
  if (obs.empty(cfg.rep)) return out;

  if (cfg.rep == Representation::object_points_raw) {
    const Index n = std::min<Index>(size, obs.points.cols());
    out.leftCols(n) = obs.points.leftCols(n).cast<double>();
    for (Index k = n; k < size; ++k) out.col(k) = out.col(0);
    return out;
  }

  GraspSet set(Frame::end_effector);
  for (Index j = 0; j < obs.grasps.cols(); ++j) {
    const Eigen::Matrix<double, 8, 1> v = obs.grasps.col(j).cast<double>();
    set.grasps.emplace_back(Posed(v.head<3>(), Quat<double>(v[3], v[4], v[5], v[6])), v[7]);
  }
  nets::Matrix<double> features;
  switch (cfg.rep) {
    case Representation::gaussian_points: {
      GaussianTemplate t;
      t.points = obs.grasp_template.cast<double>();
      t.width = obs.template_width;
      t.sigma = t.width / 6.0;
      features = grasps_to_points(set, t, cfg.scaling).points;
      break;
    }
    case Representation::keypoints:
      features = grasps_to_keypoints(set, cfg.gripper).points;
      break;
    case Representation::nined:
      features = grasps_to_9d(set);
      break;
    case Representation::object_points_raw:
      break;
  }
  const Index present = std::min<Index>(features.cols(), out.cols());
  out.leftCols(present) = features.leftCols(present);
  for (Index c = present; c < out.cols(); c += size) out.middleCols(c, size) = features.leftCols(size);
  return out;
}

}  // namespace dyngrasp
