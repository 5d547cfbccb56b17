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
#include <vector>

#include "sbft/ids.hpp"
#include "sbft/message.hpp"
#include "sbft/time.hpp"

namespace sbft {

// Monetary model: serverless spawns are billed per invocation, shim nodes
// and the gateway are rented for the whole run, executors for their busy
// time.
struct CostModel {
  double spawnCents = 0.02;
  double vmCentsPerSec = 0.005;
  double execCentsPerSec = 0.002;
};

struct KindStats {
  uint64_t count = 0;
  uint64_t bytes = 0;
};

struct MetricsReport {
  double durationSec = 0;
  double warmupSec = 0;
  uint64_t issued = 0;
  uint64_t committed = 0;
  uint64_t aborted = 0;
  uint64_t unfinished = 0;
  double throughputTps = 0;
  double meanMs = 0;
  double p50Ms = 0;
  double p95Ms = 0;
  double p99Ms = 0;
  double abortRate = 0;
  std::map<MessageKind, KindStats> perKind;
  uint64_t totalMsgs = 0;
  uint64_t totalBytes = 0;
  std::map<Identity, uint32_t> spawns;
  uint32_t totalSpawns = 0;
  std::map<Identity, double> costCents;
  double totalCostCents = 0;
  double costCentsPerKtxn = 0;
  uint64_t dropsLoss = 0;
  uint64_t dropsPartition = 0;
  uint64_t dropsAdversary = 0;
  uint64_t dropsFlood = 0;
  uint64_t viewChangesInstalled = 0;  // filled by the runner from the trace
};

// Collects raw measurements during a run; finalize() turns them into the
// report. Completion times use the first issue of a transaction, so client
// resubmissions lengthen rather than reset latency.
class Metrics {
 public:
  void count_send(MessageKind k, size_t bytes);
  void count_drop(uint8_t reason);
  void count_spawn(const Identity& spawner);

  void txn_issued(uint32_t client, uint64_t nonce, SimTime t);
  void txn_committed(uint32_t client, uint64_t nonce, SimTime t);
  void txn_aborted(uint32_t client, uint64_t nonce, SimTime t);

  uint64_t committed_count() const { return committed_; }

  MetricsReport finalize(SimTime duration, SimTime warmup,
                         const std::map<Identity, SimTime>& busy,
                         const CostModel& cost) const;

 private:
  struct TxnStat {
    SimTime issuedAt = 0;
    SimTime doneAt = -1;
    bool aborted = false;
  };

  std::map<MessageKind, KindStats> perKind_;
  uint64_t drops_[4] = {0, 0, 0, 0};
  std::map<Identity, uint32_t> spawns_;
  std::map<std::pair<uint32_t, uint64_t>, TxnStat> txns_;
  uint64_t committed_ = 0;
  uint64_t aborted_ = 0;
};

}  // namespace sbft
