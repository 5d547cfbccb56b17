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
#include <vector>

#include "sbft/rng.hpp"
#include "sbft/tx.hpp"

namespace sbft {

struct WorkloadSpec {
  uint32_t clients = 4;
  uint32_t opsPerTxn = 4;     // alternating read/write, read first
  double conflictRate = 0.0;  // fraction of transactions aimed at hot keys
  uint64_t keyspace = 600000;
  uint64_t hotKeys = 16;
};

// Per-client transaction streams. Each client owns a private key shard, so
// at conflictRate zero no two in-flight transactions ever overlap; a
// conflicted transaction draws all its keys from the small hot range
// shared by everyone instead.
class WorkloadGen {
 public:
  WorkloadGen(WorkloadSpec spec, uint64_t seed);

  Transaction next(uint32_t client);

  const WorkloadSpec& spec() const { return spec_; }
  uint64_t generated(uint32_t client) const { return nonces_[client]; }
  bool touches_hot(const Transaction& t) const;

 private:
  WorkloadSpec spec_;
  uint64_t shardSize_ = 0;
  std::vector<Rng> rngs_;
  std::vector<uint64_t> nonces_;
};

}  // namespace sbft
