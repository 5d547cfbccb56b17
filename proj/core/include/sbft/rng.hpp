// Copyright 2026 the sbftsim authors
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
#include <string>

namespace sbft {

// Deterministic random stream. Each subsystem (network, workload, adversary)
// gets its own stream derived from (master seed, stream name) so that adding
// or removing draws in one subsystem never perturbs another. All derivation
// goes through explicit integer arithmetic rather than distribution objects
// whose implementations may differ across standard libraries.
class Rng {
 public:
  Rng() : engine_(0) {}
  Rng(uint64_t master_seed, const std::string& stream);

  uint64_t next_u64();

  // Unbiased integer in [0, bound). bound must be nonzero.
  uint64_t next_below(uint64_t bound);

  // Integer in [lo, hi] inclusive.
  int64_t next_range(int64_t lo, int64_t hi);

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_unit();

  bool next_bernoulli(double p);

  uint64_t stream_seed() const { return stream_seed_; }

 private:
  std::mt19937_64 engine_;
  uint64_t stream_seed_ = 0;
};

// Stable 64-bit hash for stream derivation and key scrambling.
uint64_t stable_hash64(const std::string& s);

}  // namespace sbft
