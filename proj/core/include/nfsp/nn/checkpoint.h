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

#ifndef NFSP_NN_CHECKPOINT_H_
#define NFSP_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "nfsp/nn/network.h"

namespace nfsp::nn {

// Network checkpoint layout (all integers and floats little-endian):
//
//   offset  size  field
//   0       8     magic "NFSPNET\0"
//   8       4     u32 format version (kCheckpointVersion)
//   12      4     u32 body kind (0 = mlp, 1 = conv)
//   16      4*6   i32 channels, height, width, blocks, block_width, pool_every
//   40      8     f64 leaky slope
//   48      4     i32 num_actions
//   52      4     u32 norm mode (0 = frozen affine, 1 = batch statistics)
//   56      8     u64 parameter count P
//   64      8*P   f64 parameters
inline constexpr std::uint32_t kCheckpointVersion = 1;

void WriteCheckpoint(std::ostream& out, const Network& net);
Network ReadCheckpoint(std::istream& in);

void SaveCheckpoint(const std::filesystem::path& path, const Network& net);
// Throws MissingDataError naming the path when it does not exist.
Network LoadCheckpoint(const std::filesystem::path& path);

namespace wire {

void PutU32(std::ostream& out, std::uint32_t v);
void PutU64(std::ostream& out, std::uint64_t v);
void PutI32(std::ostream& out, std::int32_t v);
void PutF64(std::ostream& out, double v);
std::uint32_t GetU32(std::istream& in);
std::uint64_t GetU64(std::istream& in);
std::int32_t GetI32(std::istream& in);
double GetF64(std::istream& in);

}  // namespace wire

}  // namespace nfsp::nn

#endif  // NFSP_NN_CHECKPOINT_H_
