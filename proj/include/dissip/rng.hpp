// Copyright 2026 The dissip Authors
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

#include <cstdint>
#include <random>
#include <vector>

namespace dissip {

/// SplitMix64 finalizer. Used as the stable hash for all seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// Per-draw seed: splitmix64(splitmix64(splitmix64(master) ^ cell) ^ draw).
/// Depends only on its arguments, never on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t draw);

/// Deterministic random stream.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the
/// standard). The standard distributions are implementation-defined, so all
/// derived variates are computed here from raw 64-bit outputs:
///   - uniform():      top 53 bits scaled to [0, 1)
///   - below(b):       rejection sampling on the largest multiple of b
///   - normal():       Box-Muller, cosine branch only, one variate per two uniforms
///   - rademacher():   lowest bit of one raw output
///   - k_subset(n, k): partial Fisher-Yates over 0..n-1, result sorted ascending
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  std::uint64_t below(std::uint64_t bound);
  double normal();
  int rademacher() { return (next() & 1U) != 0U ? 1 : -1; }
  std::vector<int> k_subset(int n, int k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dissip
