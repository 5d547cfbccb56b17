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
#include <string>
#include <utility>
#include <vector>

#include "sbft/storage.hpp"
#include "sbft/trace.hpp"
#include "sbft/tx.hpp"

namespace sbft {

// Independent reference interpreter. It re-executes the applied batches
// recorded in a trace, in sequence order, against its own fresh store and
// reports any divergence from what the run claimed to have written. It
// shares nothing with the live execution path beyond the value-chain
// definition itself.
class ReplayOracle {
 public:
  ReplayOracle(uint64_t kvSeed, uint64_t keyspaceSize)
      : store_(kvSeed, keyspaceSize) {}

  // Executes one ordered batch over current state, applies its writes and
  // returns the computed result. Writes buffered earlier in the same batch
  // are visible to later transactions in it.
  ExecResult step(uint64_t seq, const std::vector<Transaction>& txns);

  const Storage& state() const { return store_; }

 private:
  Storage store_;
};

struct OracleReport {
  bool ok = true;
  uint64_t batches = 0;
  uint64_t txns = 0;
  uint64_t problemCount = 0;
  std::vector<std::string> problems;  // first few, for diagnostics
  // Reference output per completed transaction, keyed by (client, nonce).
  std::map<std::pair<uint32_t, uint64_t>, uint64_t> outputs;
  Digest finalDigest;

  void flag(std::string what);
};

// Full-trace check: replays every apply record and, when a final store is
// given, compares end state record for record.
OracleReport check_trace(const std::vector<TraceRecord>& trace,
                         uint64_t kvSeed, uint64_t keyspaceSize,
                         const Storage* finalState);

}  // namespace sbft
