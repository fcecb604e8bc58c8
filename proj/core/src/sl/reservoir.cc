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

#include "nfsp/sl/reservoir.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nfsp/common/error.h"
#include "nfsp/nn/checkpoint.h"

namespace nfsp::sl {
namespace {

constexpr char kMagic[8] = {'N', 'F', 'S', 'P', 'R', 'R', 'B', '\0'};

}  // namespace

ReservoirBuffer::ReservoirBuffer(std::int64_t capacity, int feature_size, int num_actions,
                                 std::uint64_t seed)
    : capacity_(capacity), feature_size_(feature_size), num_actions_(num_actions), rng_(seed) {
  if (capacity < 1) throw std::invalid_argument("reservoir: capacity must be >= 1");
  if (feature_size < 1 || num_actions < 1) {
    throw std::invalid_argument("reservoir: feature size and action count must be positive");
  }
}

bool ReservoirBuffer::Insert(std::span<const double> state, std::span<const std::uint8_t> legal,
                             std::span<const double> distribution) {
  if (static_cast<int>(state.size()) != feature_size_ ||
      static_cast<int>(legal.size()) != num_actions_ ||
      static_cast<int>(distribution.size()) != num_actions_) {
    throw std::invalid_argument("reservoir: tuple shape mismatch");
  }
  const std::int64_t id = offered_++;
  std::int64_t slot;
  if (offered_ <= capacity_) {
    slot = size();
    ids_.push_back(id);
    states_.resize(states_.size() + feature_size_);
    legal_.resize(legal_.size() + num_actions_);
    dists_.resize(dists_.size() + num_actions_);
  } else {
    slot = static_cast<std::int64_t>(UniformIndex(rng_, static_cast<std::uint64_t>(offered_)));
    if (slot >= capacity_) return false;
    ids_[static_cast<std::size_t>(slot)] = id;
  }
  const auto s = static_cast<std::size_t>(slot);
  std::copy(state.begin(), state.end(), states_.begin() + s * feature_size_);
  std::copy(legal.begin(), legal.end(), legal_.begin() + s * num_actions_);
  std::copy(distribution.begin(), distribution.end(), dists_.begin() + s * num_actions_);
  return true;
}

std::span<const double> ReservoirBuffer::state(std::int64_t slot) const {
  return std::span(states_).subspan(static_cast<std::size_t>(slot) * feature_size_, feature_size_);
}

std::span<const double> ReservoirBuffer::distribution(std::int64_t slot) const {
  return std::span(dists_).subspan(static_cast<std::size_t>(slot) * num_actions_, num_actions_);
}

SlBatch ReservoirBuffer::Sample(int n) {
  if (n < 0) throw std::invalid_argument("reservoir: negative sample size");
  if (n > 0 && ids_.empty()) {
    throw MissingDataError("reservoir: sample from an empty buffer; skip the SL update");
  }
  SlBatch b;
  b.states.resize(n, feature_size_);
  b.legal.resize(n, num_actions_);
  b.targets.resize(n, num_actions_);
  for (int i = 0; i < n; ++i) {
    const auto s = UniformIndex(rng_, ids_.size());
    for (int f = 0; f < feature_size_; ++f) b.states(i, f) = states_[s * feature_size_ + f];
    for (int a = 0; a < num_actions_; ++a) {
      b.legal(i, a) = legal_[s * num_actions_ + a];
      b.targets(i, a) = dists_[s * num_actions_ + a];
    }
  }
  return b;
}

void ReservoirBuffer::Write(std::ostream& out) const {
  using namespace nn::wire;
  out.write(kMagic, sizeof(kMagic));
  PutU32(out, kSnapshotVersion);
  PutU64(out, static_cast<std::uint64_t>(capacity_));
  PutU64(out, static_cast<std::uint64_t>(offered_));
  PutU32(out, static_cast<std::uint32_t>(feature_size_));
  PutU32(out, static_cast<std::uint32_t>(num_actions_));
  PutU64(out, ids_.size());
  std::ostringstream rng_text;
  rng_text << rng_;
  const std::string r = rng_text.str();
  PutU64(out, r.size());
  out.write(r.data(), static_cast<std::streamsize>(r.size()));
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    PutU64(out, static_cast<std::uint64_t>(ids_[i]));
    for (int f = 0; f < feature_size_; ++f) PutF64(out, states_[i * feature_size_ + f]);
    out.write(reinterpret_cast<const char*>(legal_.data() + i * num_actions_), num_actions_);
    for (int a = 0; a < num_actions_; ++a) PutF64(out, dists_[i * num_actions_ + a]);
  }
  if (!out) throw std::runtime_error("reservoir: write failed");
}

ReservoirBuffer ReservoirBuffer::Read(std::istream& in) {
  using namespace nn::wire;
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("reservoir: bad snapshot magic");
  }
  const std::uint32_t version = GetU32(in);
  if (version != kSnapshotVersion) {
    throw std::runtime_error("reservoir: unsupported snapshot version " + std::to_string(version));
  }
  const auto capacity = static_cast<std::int64_t>(GetU64(in));
  const auto offered = static_cast<std::int64_t>(GetU64(in));
  const int features = static_cast<int>(GetU32(in));
  const int actions = static_cast<int>(GetU32(in));
  const std::uint64_t count = GetU64(in);
  if (count > static_cast<std::uint64_t>(capacity) ||
      static_cast<std::int64_t>(count) > offered) {
    throw std::runtime_error("reservoir: inconsistent snapshot counts");
  }
  const std::uint64_t rng_len = GetU64(in);
  if (rng_len > (1u << 20)) throw std::runtime_error("reservoir: corrupt generator state");
  std::string r(rng_len, '\0');
  in.read(r.data(), static_cast<std::streamsize>(rng_len));
  ReservoirBuffer buf(capacity, features, actions, 0);
  std::istringstream rng_text(r);
  rng_text >> buf.rng_;
  if (!rng_text) throw std::runtime_error("reservoir: corrupt generator state");
  buf.offered_ = offered;
  buf.ids_.resize(count);
  buf.states_.resize(count * features);
  buf.legal_.resize(count * actions);
  buf.dists_.resize(count * actions);
  for (std::uint64_t i = 0; i < count; ++i) {
    buf.ids_[i] = static_cast<std::int64_t>(GetU64(in));
    for (int f = 0; f < features; ++f) buf.states_[i * features + f] = GetF64(in);
    in.read(reinterpret_cast<char*>(buf.legal_.data() + i * actions), actions);
    for (int a = 0; a < actions; ++a) buf.dists_[i * actions + a] = GetF64(in);
  }
  if (!in) throw std::runtime_error("reservoir: truncated snapshot");
  return buf;
}

void ReservoirBuffer::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("reservoir: cannot write " + path.string());
  Write(out);
}

ReservoirBuffer ReservoirBuffer::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingDataError("reservoir snapshot not found: " + path.string());
  return Read(in);
}

}  // namespace nfsp::sl
