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
#include <map>
#include <set>
#include <vector>

#include "sbft/codec.hpp"
#include "sbft/digest.hpp"
#include "sbft/ids.hpp"

namespace sbft {

using Key = uint64_t;
using Value = uint64_t;
using Version = uint64_t;

enum class OpKind : uint8_t { kRead = 0, kWrite = 1 };

struct Op {
  OpKind kind = OpKind::kRead;
  Key key = 0;
  uint64_t arg = 0;  // write operand, ignored for reads

  void encode(ByteWriter& w) const {
    w.u8(static_cast<uint8_t>(kind));
    w.u64(key);
    w.u64(arg);
  }
  static Op decode(ByteReader& r);
};

// A client transaction. Execution is deterministic: an accumulator seeded
// from (client, nonce) folds in every value read, and each write stores
// mix64(accumulator, arg). A transaction that reads different versions
// therefore produces different written values and a different output,
// which is what read validation at the verifier keys off.
struct Transaction {
  uint32_t client = 0;
  uint64_t nonce = 0;
  std::vector<Op> ops;

  std::set<Key> read_keys() const;
  std::set<Key> write_keys() const;

  void encode(ByteWriter& w) const {
    w.u32(client);
    w.u64(nonce);
    w.seq(ops);
  }
  static Transaction decode(ByteReader& r);
};

// Accumulator seed shared by every execution path (executors, node-local
// execution, the reference interpreter in the harness).
inline uint64_t txn_seed(const Transaction& t) {
  return mix64(mix64(0x7873656564ULL, t.client), t.nonce);
}

// Read/write footprint observed during execution. Reads carry the version
// actually read so the verifier can detect stale data at validation time.
struct RwSet {
  std::map<Key, Version> reads;
  std::vector<Key> writes;  // sorted, unique

  void add_read(Key k, Version v);
  void add_write(Key k);

  void encode(ByteWriter& w) const {
    w.kvmap(reads);
    w.seq(writes);
  }
};

struct TxnOutput {
  uint32_t client = 0;
  uint64_t nonce = 0;
  uint64_t value = 0;

  void encode(ByteWriter& w) const {
    w.u32(client);
    w.u64(nonce);
    w.u64(value);
  }
};

// Deterministic result of executing a batch: buffered writes plus one
// output value per transaction. Equality of canonical bytes is how the
// verifier matches executor results.
struct ExecResult {
  std::map<Key, Value> writes;
  std::vector<TxnOutput> outputs;

  void encode(ByteWriter& w) const {
    w.kvmap(writes);
    w.seq(outputs);
  }
};

}  // namespace sbft
