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

// Binary parameter files.
//
// Layout (all integers little-endian):
//   8 bytes  magic "DGRASPCK"
//   u32      format version
//   u32      block count
//   per block:
//     u32 name length, name bytes
//     u8  dtype (1 = float32, 2 = float64)
//     u32 rank, then rank x u64 dims
//     raw values, column-major

#include <cstdint>
#include <string>
#include <vector>

#include "dyngrasp/nets.hpp"

namespace dyngrasp {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// One named tensor. Values are held in double; dtype records the width on disk.
struct TensorBlock {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<double> values;
  bool single_precision = true;
};

void write_checkpoint(const std::string& path, const std::vector<TensorBlock>& blocks);
std::vector<TensorBlock> read_checkpoint(const std::string& path);

template <typename S>
TensorBlock to_block(const std::string& name, const nets::Matrix<S>& m) {
  TensorBlock b{name, {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())}, {}, sizeof(S) == 4};
  b.values.assign(m.data(), m.data() + m.size());
  return b;
}

template <typename S>
void append_blocks(const std::vector<nets::ParamRef<S>>& params, std::vector<TensorBlock>& out,
                   const std::string& prefix = "") {
  for (const auto& p : params) out.push_back(to_block(prefix + p.name, *p.value));
}

/// Copies a block into m; the block's shape must match m exactly.
template <typename S>
void from_block(const TensorBlock& b, nets::Matrix<S>& m) {
  if (b.shape.size() != 2 || b.shape[0] != static_cast<std::uint64_t>(m.rows()) ||
      b.shape[1] != static_cast<std::uint64_t>(m.cols())) {
    throw ShapeError("checkpoint block '" + b.name + "' does not match the configured shape");
  }
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<S>(b.values[static_cast<std::size_t>(i)]);
}

const TensorBlock& find_block(const std::vector<TensorBlock>& blocks, const std::string& name);

/// Loads every parameter by name. Missing names are an IoError, shape
/// disagreements a ShapeError.
template <typename S>
void load_blocks(const std::vector<TensorBlock>& blocks, const std::vector<nets::ParamRef<S>>& params,
                 const std::string& prefix = "") {
  for (const auto& p : params) from_block(find_block(blocks, prefix + p.name), *p.value);
}

}  // namespace dyngrasp
