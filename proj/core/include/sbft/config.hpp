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
#include <stdexcept>
#include <string>

#include "sbft/time.hpp"

namespace sbft {

enum class RunMode : uint8_t {
  kServerlessBft = 0,  // shim consensus + spawned executors + verifier
  kShimLocal,          // shim consensus with node-local execution, no cloud
  kServerlessCft,      // crash-tolerant shim, majority ack, no signatures
  kNoShim,             // gateway straight to executors, no consensus
};

enum class ConflictMode : uint8_t {
  kUnknownRw = 0,   // footprints discovered at execution, stale reads abort
  kKnownRw,         // footprints declared upfront, primary serializes spawns
  kNonConflicting,  // workload promises disjoint footprints, freshness
                    // check skipped
};

enum class SpawnMode : uint8_t {
  kCentralized = 0,  // primary spawns all executors for a batch
  kDistributed,      // every node spawns a share sized so that a spawn
                     // quorum of honest nodes covers the pool
  kDistributedConservative,  // share sized assuming up to f_r honest nodes
                             // may be kept in the dark
};

const char* run_mode_name(RunMode m);
const char* conflict_mode_name(ConflictMode m);
const char* spawn_mode_name(SpawnMode m);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Protocol sizing and timing knobs shared by every component in a run.
struct Config {
  RunMode mode = RunMode::kServerlessBft;
  ConflictMode conflictMode = ConflictMode::kUnknownRw;
  SpawnMode spawnMode = SpawnMode::kCentralized;

  uint32_t nR = 4;  // shim nodes
  uint32_t fR = 1;  // tolerated byzantine shim nodes
  uint32_t nE = 4;  // executors spawned per batch; sized for the default
                    // conflict mode, where divergence detection needs 3fE+1
  uint32_t fE = 1;  // tolerated byzantine executors

  uint32_t batchSize = 100;
  uint32_t checkpointInterval = 16;  // in sequence numbers

  SimTime batchFlushTimeout = 2 * kMs;   // ship a partial batch after this
  SimTime clientRetryTimeout = 150 * kMs;
  SimTime nodeProgressTimeout = 60 * kMs;  // per-sequence commit watchdog
  SimTime errorRetryTimeout = 40 * kMs;    // after forwarding an error
  SimTime viewChangeRetryTimeout = 80 * kMs;
  SimTime verifierAbortTimeout = 30 * kMs;  // scaled per batch on top

  // Quorums
  uint32_t prepare_quorum() const { return 2 * fR + 1; }
  uint32_t commit_quorum() const { return 2 * fR + 1; }
  uint32_t match_quorum() const { return fE + 1; }      // identical results
  uint32_t verify_quorum() const { return 2 * fE + 1; } // reports before abort
  uint32_t cft_quorum() const { return nR / 2 + 1; }

  uint32_t primary_of(uint64_t view) const {
    return static_cast<uint32_t>(view % nR);
  }

  // Spawns per node in distributed mode: 1 while the pool fits inside the
  // shim, otherwise spread so any commit quorum of spawners covers it.
  uint32_t distributed_spawn_share() const {
    if (nE <= nR) return 1;
    return (nE + 2 * fR) / (2 * fR + 1);
  }
  // Conservative variant covering the pool with f_r fewer participants.
  uint32_t conservative_spawn_share() const { return (nE + fR) / (fR + 1); }

  uint32_t spawn_share() const {
    switch (spawnMode) {
      case SpawnMode::kCentralized:
        return nE;
      case SpawnMode::kDistributed:
        return distributed_spawn_share();
      case SpawnMode::kDistributedConservative:
        return conservative_spawn_share();
    }
    return nE;
  }

  // Throws ConfigError when sizes cannot give the advertised guarantees.
  void validate() const;
};

}  // namespace sbft
