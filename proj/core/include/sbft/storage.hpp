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
#include <stdexcept>
#include <string>
#include <vector>

#include "sbft/digest.hpp"
#include "sbft/ids.hpp"
#include "sbft/tx.hpp"

namespace sbft {

class StorageAccessError : public std::runtime_error {
 public:
  explicit StorageAccessError(const std::string& what)
      : std::runtime_error(what) {}
};

// Versioned key-value store. The full keyspace is logically pre-populated:
// an untouched key holds a value derived from (seed, key) at version 0 and
// is materialized only when first written, so a 600k-record store costs
// nothing until touched. Only the verifier may write; executors fetch.
class Storage {
 public:
  Storage(uint64_t seed, uint64_t keyspaceSize)
      : seed_(seed), keyspaceSize_(keyspaceSize) {}

  std::pair<Value, Version> read(Key k) const;
  Version version(Key k) const;

  void apply(const Identity& caller, uint64_t seq,
             const std::map<Key, Value>& writes);

  uint64_t applied_batches() const { return appliedSeqs_.size(); }
  const std::vector<uint64_t>& applied_seqs() const { return appliedSeqs_; }
  uint64_t keyspace_size() const { return keyspaceSize_; }
  uint64_t seed() const { return seed_; }
  size_t dirty_records() const { return cells_.size(); }

  Digest state_digest() const;

  // Sparse snapshot: a header naming the logical record count and seed,
  // then the modified records in key order.
  void save_snapshot(const std::string& path) const;
  static Storage load_snapshot(const std::string& path);

  bool same_state(const Storage& other) const;

 private:
  struct Cell {
    Value value = 0;
    Version version = 0;
  };

  uint64_t seed_;
  uint64_t keyspaceSize_;
  std::map<Key, Cell> cells_;
  std::vector<uint64_t> appliedSeqs_;
};

// Deterministic initial contents shared with the replay oracle.
inline Value initial_value(uint64_t seed, Key k) { return mix64(seed, k); }

}  // namespace sbft
