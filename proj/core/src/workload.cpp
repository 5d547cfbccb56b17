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

#include "sbft/workload.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace sbft {

WorkloadGen::WorkloadGen(WorkloadSpec spec, uint64_t seed) : spec_(spec) {
  if (spec_.clients == 0) throw std::invalid_argument("workload needs clients");
  if (spec_.keyspace <= spec_.hotKeys + spec_.clients)
    throw std::invalid_argument("keyspace too small for shards");
  shardSize_ = (spec_.keyspace - spec_.hotKeys) / spec_.clients;
  rngs_.reserve(spec_.clients);
  for (uint32_t c = 0; c < spec_.clients; ++c)
    rngs_.emplace_back(seed, fmt::format("workload/{}", c));
  nonces_.assign(spec_.clients, 0);
}

Transaction WorkloadGen::next(uint32_t client) {
  Rng& rng = rngs_.at(client);
  Transaction t;
  t.client = client;
  t.nonce = ++nonces_[client];
  bool hot = spec_.hotKeys > 0 && rng.next_bernoulli(spec_.conflictRate);
  uint64_t base = hot ? 0 : spec_.hotKeys + uint64_t(client) * shardSize_;
  uint64_t span = hot ? spec_.hotKeys : shardSize_;
  t.ops.reserve(spec_.opsPerTxn);
  for (uint32_t i = 0; i < spec_.opsPerTxn; ++i) {
    Op op;
    op.kind = (i % 2 == 0) ? OpKind::kRead : OpKind::kWrite;
    op.key = base + rng.next_below(span);
    op.arg = op.kind == OpKind::kWrite ? rng.next_u64() : 0;
    t.ops.push_back(op);
  }
  return t;
}

bool WorkloadGen::touches_hot(const Transaction& t) const {
  for (const auto& op : t.ops)
    if (op.key < spec_.hotKeys) return true;
  return false;
}

}  // namespace sbft
