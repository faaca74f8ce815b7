//
// Copyright 2026 The dpsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPSYNTH_RNG_H_
#define DPSYNTH_RNG_H_

#include <cstdint>
#include <random>

namespace dpsynth {

using Rng = std::mt19937_64;

// Stream identifiers for DeriveSeed. Each consumer of randomness draws from
// its own stream so that changing one stage never perturbs another.
enum class SeedStream : std::uint64_t {
  kSplit = 1,
  kBootstrap = 2,
  kInit = 3,
  kBatchSampling = 4,
  kNoise = 5,
  kShuffle = 6,
  kDownstream = 7,
  kRepeat = 8,
  kWarmup = 9,
  kOversample = 10,
};

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based sub-seed: (master, stream, index) -> independent seed.
constexpr std::uint64_t DeriveSeed(std::uint64_t master, SeedStream stream,
                                   std::uint64_t index = 0) {
  return Mix64(Mix64(master ^ Mix64(static_cast<std::uint64_t>(stream))) +
               index);
}

}  // namespace dpsynth

#endif  // DPSYNTH_RNG_H_
