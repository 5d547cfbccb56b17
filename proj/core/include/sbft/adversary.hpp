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

#include "sbft/executor.hpp"
#include "sbft/simnet.hpp"

namespace sbft {

enum class AttackKind : uint8_t {
  kRequestIgnorance = 0,      // drop chosen clients' requests on arrival
  kUnsuccessfulConsensus,     // send the proposal to too few peers
  kLessExecutors,             // truncate the spawn burst
  kNodeExclusion,             // keep chosen peers out of proposals
  kEquivocation,              // two proposals for the same sequence number
  kDuplicateSpawnPrimary,     // spawn extra executors per batch
  kDuplicateSpawnOldPrimary,  // replay stored certified work later
  kByzantineAbortDelay,       // stall spawns past the verifier's patience
  kVerifierFlood,             // pad every action burst with junk to the
                              // verifier
};

struct AttackSpec {
  AttackKind kind = AttackKind::kRequestIgnorance;
  std::set<uint32_t> clients;    // RequestIgnorance targets; empty = all
  uint32_t fanout = 0;           // UnsuccessfulConsensus: proposals kept
  uint32_t spawnCount = 0;       // LessExecutors: spawns kept
  std::set<uint32_t> dark;       // NodeExclusion: excluded node indices
  bool rotating = false;         // NodeExclusion: rotate the excluded
                                 // window per sequence number
                                 // (experimental; dark then only sizes it)
  uint32_t extraSpawns = 1;      // DuplicateSpawnPrimary: extra copies
  SimTime replayAfter = 0;       // DuplicateSpawnOldPrimary: replay time
  SimTime delay = 0;             // ByzantineAbortDelay: 0 = just past the
                                 // verifier's abort timer
  std::set<uint64_t> seqs;       // ByzantineAbortDelay targets; empty = all
  uint32_t floodCopies = 0;      // VerifierFlood: junk per action burst
};

struct ExecutorFaultSpec {
  ExecutorFault fault = ExecutorFault::kHonest;
  uint32_t perBurst = 0;        // faulty executors per spawn burst
  std::set<uint64_t> seqs;      // restrict to sequence numbers; empty = all
  std::set<uint32_t> spawners;  // restrict to spawner node indices
};

// Deterministic fault injection. Node attacks rewrite a byzantine node's
// outbound action burst or discard its inbound messages; executor faults
// assign behavior classes at spawn time. Multiple attacks on one node
// apply in the order they were added.
class ScriptedAdversary : public AdversaryHook {
 public:
  ScriptedAdversary(Config cfg, uint64_t seed, AuthAudit* audit,
                    Identity verifier, SimTime abortTimerFixed,
                    SimTime abortTimerPerTxn);

  void add_attack(uint32_t nodeIndex, AttackSpec spec);
  void set_executor_fault(ExecutorFaultSpec spec);

  std::set<uint32_t> byzantine_nodes() const;
  const std::vector<ExecutorFaultSpec>& executor_faults() const {
    return execFaults_;
  }

  void transform_outputs(const Identity& source, SimTime now,
                         ActionBatch& actions) override;
  bool allow_inbound(const Identity& target, const Envelope& env,
                     SimTime now) override;
  uint8_t executor_behavior(const Identity& spawner, uint64_t seq,
                            const Digest& digest, uint32_t ordinal) override;

 private:
  SimTime default_abort_delay(size_t txns) const;
  void apply(const AttackSpec& spec, const Identity& source, SimTime now,
             ActionBatch& actions);

  Config cfg_;
  AuthAudit* audit_;
  Identity verifier_;
  SimTime abortTimerFixed_;
  SimTime abortTimerPerTxn_;
  Rng rng_;

  std::map<uint32_t, std::vector<AttackSpec>> nodeAttacks_;
  std::vector<ExecutorFaultSpec> execFaults_;

  // DuplicateSpawnOldPrimary bookkeeping.
  std::map<uint32_t, std::vector<ExecuteBody>> storedSpawns_;
  std::set<uint32_t> replayed_;
  uint64_t junkNonce_ = 0;
};

}  // namespace sbft
