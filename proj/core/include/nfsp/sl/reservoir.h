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

#ifndef NFSP_SL_RESERVOIR_H_
#define NFSP_SL_RESERVOIR_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "nfsp/common/random.h"
#include "nfsp/nn/network.h"

namespace nfsp::sl {

// A batch drawn from the buffer, one row per tuple.
struct SlBatch {
  nn::Matrix states;
  nn::Matrix legal;
  nn::Matrix targets;  // stored pi_RL distributions
};

// Uniform sample of every (state, pi_RL distribution) pair ever offered.
// The m-th offer is always kept while m <= capacity; after that it replaces
// a uniformly chosen resident with probability capacity / m.
class ReservoirBuffer {
 public:
  ReservoirBuffer(std::int64_t capacity, int feature_size, int num_actions, std::uint64_t seed);

  // Returns whether the tuple became resident.
  bool Insert(std::span<const double> state, std::span<const std::uint8_t> legal,
              std::span<const double> distribution);

  // n tuples drawn uniformly with replacement. Throws MissingDataError when
  // the buffer is empty and n > 0.
  SlBatch Sample(int n);

  std::int64_t capacity() const { return capacity_; }
  std::int64_t size() const { return static_cast<std::int64_t>(ids_.size()); }
  std::int64_t offered() const { return offered_; }
  int feature_size() const { return feature_size_; }
  int num_actions() const { return num_actions_; }

  // Offer index (0-based) of the tuple in slot i; used by statistics tests.
  std::int64_t id(std::int64_t slot) const { return ids_[static_cast<std::size_t>(slot)]; }
  std::span<const double> state(std::int64_t slot) const;
  std::span<const double> distribution(std::int64_t slot) const;

  // Snapshot layout (little-endian):
  //   8      magic "NFSPRRB\0"
  //   4      u32 format version
  //   8      u64 capacity
  //   8      u64 offered count
  //   4      u32 feature size F
  //   4      u32 action count A
  //   8      u64 resident count R
  //   8 + L  u64 L, then L bytes of the generator state in text form
  //   R x    { u64 offer id, F x f64 state, A x u8 legal, A x f64 distribution }
  static constexpr std::uint32_t kSnapshotVersion = 1;
  void Write(std::ostream& out) const;
  static ReservoirBuffer Read(std::istream& in);
  void Save(const std::filesystem::path& path) const;
  static ReservoirBuffer Load(const std::filesystem::path& path);

 private:
  std::int64_t capacity_;
  int feature_size_;
  int num_actions_;
  std::int64_t offered_ = 0;
  Rng rng_;
  std::vector<std::int64_t> ids_;
  std::vector<double> states_;
  std::vector<std::uint8_t> legal_;
  std::vector<double> dists_;
};

}  // namespace nfsp::sl

#endif  // NFSP_SL_RESERVOIR_H_
