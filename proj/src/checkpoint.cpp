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

#include "dyngrasp/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace dyngrasp {
namespace {

constexpr char kMagic[8] = {'D', 'G', 'R', 'A', 'S', 'P', 'C', 'K'};

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated checkpoint: " + path);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const std::vector<TensorBlock>& blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(blocks.size()));
  for (const auto& b : blocks) {
    std::uint64_t count = 1;
    for (auto d : b.shape) count *= d;
    if (count != b.values.size()) throw ShapeError("block '" + b.name + "' has shape/value count mismatch");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.name.size()));
    out.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
    put<std::uint8_t>(out, b.single_precision ? 1 : 2);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.shape.size()));
    for (auto d : b.shape) put<std::uint64_t>(out, d);
    for (double v : b.values) {
      if (b.single_precision) {
        put<float>(out, static_cast<float>(v));
      } else {
        put<double>(out, v);
      }
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TensorBlock> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw IoError("not a checkpoint file: " + path);
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto count = get<std::uint32_t>(in, path);
  std::vector<TensorBlock> blocks(count);
  for (auto& b : blocks) {
    const auto len = get<std::uint32_t>(in, path);
    if (len > 4096) throw IoError("corrupt block name in " + path);
    b.name.resize(len);
    if (!in.read(b.name.data(), len)) throw IoError("truncated checkpoint: " + path);
    const auto dtype = get<std::uint8_t>(in, path);
    if (dtype != 1 && dtype != 2) throw IoError("unknown dtype in block '" + b.name + "'");
    b.single_precision = dtype == 1;
    const auto rank = get<std::uint32_t>(in, path);
    if (rank > 3) throw IoError("block '" + b.name + "' has rank > 3");
    std::uint64_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      b.shape.push_back(get<std::uint64_t>(in, path));
      n *= b.shape.back();
    }
    if (n > (std::uint64_t{1} << 32)) throw IoError("block '" + b.name + "' is implausibly large");
    b.values.resize(n);
    for (auto& v : b.values) v = b.single_precision ? get<float>(in, path) : get<double>(in, path);
  }
  return blocks;
}

const TensorBlock& find_block(const std::vector<TensorBlock>& blocks, const std::string& name) {
  for (const auto& b : blocks) {
    if (b.name == name) return b;
  }
  throw IoError("checkpoint has no block named '" + name + "'");
}

}  // namespace dyngrasp
