// Copyright 2026 The NFSP-PPO Authors.
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

#include "nfsp/nn/checkpoint.h"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "nfsp/common/error.h"

namespace nfsp::nn {
namespace wire {

namespace {

template <typename T>
void PutLe(std::ostream& out, T v) {
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T GetLe(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("checkpoint: unexpected end of stream");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void PutU32(std::ostream& out, std::uint32_t v) { PutLe(out, v); }
void PutU64(std::ostream& out, std::uint64_t v) { PutLe(out, v); }
void PutI32(std::ostream& out, std::int32_t v) {
  PutLe(out, static_cast<std::uint32_t>(v));
}
void PutF64(std::ostream& out, double v) {
  PutLe(out, std::bit_cast<std::uint64_t>(v));
}
std::uint32_t GetU32(std::istream& in) { return GetLe<std::uint32_t>(in); }
std::uint64_t GetU64(std::istream& in) { return GetLe<std::uint64_t>(in); }
std::int32_t GetI32(std::istream& in) {
  return static_cast<std::int32_t>(GetLe<std::uint32_t>(in));
}
double GetF64(std::istream& in) { return std::bit_cast<double>(GetLe<std::uint64_t>(in)); }

}  // namespace wire

namespace {
constexpr char kMagic[8] = {'N', 'F', 'S', 'P', 'N', 'E', 'T', '\0'};
}  // namespace

void WriteCheckpoint(std::ostream& out, const Network& net) {
  const ArchSpec& a = net.arch();
  out.write(kMagic, sizeof(kMagic));
  wire::PutU32(out, kCheckpointVersion);
  wire::PutU32(out, static_cast<std::uint32_t>(a.body));
  wire::PutI32(out, a.channels);
  wire::PutI32(out, a.height);
  wire::PutI32(out, a.width);
  wire::PutI32(out, a.blocks);
  wire::PutI32(out, a.block_width);
  wire::PutI32(out, a.pool_every);
  wire::PutF64(out, a.leaky_slope);
  wire::PutI32(out, a.num_actions);
  wire::PutU32(out, static_cast<std::uint32_t>(a.norm));
  wire::PutU64(out, net.num_params());
  for (double p : net.params()) wire::PutF64(out, p);
}

Network ReadCheckpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic, not a network checkpoint");
  }
  const std::uint32_t version = wire::GetU32(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported format version " +
                             std::to_string(version));
  }
  ArchSpec a;
  const std::uint32_t body = wire::GetU32(in);
  if (body > 1) throw std::runtime_error("checkpoint: unknown body kind");
  a.body = static_cast<BodyKind>(body);
  a.channels = wire::GetI32(in);
  a.height = wire::GetI32(in);
  a.width = wire::GetI32(in);
  a.blocks = wire::GetI32(in);
  a.block_width = wire::GetI32(in);
  a.pool_every = wire::GetI32(in);
  a.leaky_slope = wire::GetF64(in);
  a.num_actions = wire::GetI32(in);
  const std::uint32_t norm = wire::GetU32(in);
  if (norm > 1) throw std::runtime_error("checkpoint: unknown norm mode");
  a.norm = static_cast<NormMode>(norm);
  const std::uint64_t count = wire::GetU64(in);
  std::vector<double> params(count);
  for (double& p : params) p = wire::GetF64(in);
  return Network::FromParams(a, std::move(params));
}

void SaveCheckpoint(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  WriteCheckpoint(out, net);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Network LoadCheckpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingDataError("checkpoint not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ReadCheckpoint(in);
}

}  // namespace nfsp::nn
