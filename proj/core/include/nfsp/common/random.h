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

#ifndef NFSP_COMMON_RANDOM_H_
#define NFSP_COMMON_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>

namespace nfsp {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent seeds for lanes,
// processes and evaluation games from one run seed.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  return MixSeed(MixSeed(base) ^ MixSeed(stream + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1) built from the top 53 bits, so results do not
// depend on the standard library's distribution implementation.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Draws an index from an (unnormalised, nonnegative) weight vector. Returns
// -1 when all weights are zero.
int SampleIndex(std::span<const double> weights, Rng& rng);

}  // namespace nfsp

#endif  // NFSP_COMMON_RANDOM_H_
