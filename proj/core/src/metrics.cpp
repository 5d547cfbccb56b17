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

#include "sbft/metrics.hpp"

#include <algorithm>

namespace sbft {

void Metrics::count_send(MessageKind k, size_t bytes) {
  auto& s = perKind_[k];
  s.count += 1;
  s.bytes += bytes;
}

void Metrics::count_drop(uint8_t reason) {
  drops_[reason < 4 ? reason : 0] += 1;
}

void Metrics::count_spawn(const Identity& spawner) { spawns_[spawner] += 1; }

void Metrics::txn_issued(uint32_t client, uint64_t nonce, SimTime t) {
  // Only the first issue counts; resubmissions keep the original clock.
  txns_.emplace(std::make_pair(client, nonce), TxnStat{t, -1, false});
}

void Metrics::txn_committed(uint32_t client, uint64_t nonce, SimTime t) {
  auto it = txns_.find({client, nonce});
  if (it == txns_.end() || it->second.doneAt >= 0) return;
  it->second.doneAt = t;
  ++committed_;
}

void Metrics::txn_aborted(uint32_t client, uint64_t nonce, SimTime t) {
  auto it = txns_.find({client, nonce});
  if (it == txns_.end() || it->second.doneAt >= 0) return;
  it->second.doneAt = t;
  it->second.aborted = true;
  ++aborted_;
}

namespace {

double percentile(const std::vector<SimTime>& sorted, double p) {
  if (sorted.empty()) return 0;
  double idx = p * static_cast<double>(sorted.size() - 1);
  size_t lo = static_cast<size_t>(idx);
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = idx - static_cast<double>(lo);
  return (static_cast<double>(sorted[lo]) * (1 - frac) +
          static_cast<double>(sorted[hi]) * frac) /
         kMs;
}

}  // namespace

MetricsReport Metrics::finalize(SimTime duration, SimTime warmup,
                                const std::map<Identity, SimTime>& busy,
                                const CostModel& cost) const {
  MetricsReport r;
  r.durationSec = static_cast<double>(duration) / kSec;
  r.warmupSec = static_cast<double>(warmup) / kSec;
  r.perKind = perKind_;
  for (const auto& [k, s] : perKind_) {
    (void)k;
    r.totalMsgs += s.count;
    r.totalBytes += s.bytes;
  }
  r.dropsLoss = drops_[0];
  r.dropsPartition = drops_[1];
  r.dropsAdversary = drops_[2];
  r.dropsFlood = drops_[3];

  std::vector<SimTime> lat;
  uint64_t measuredCommitted = 0;
  for (const auto& [key, st] : txns_) {
    (void)key;
    ++r.issued;
    if (st.doneAt < 0) {
      ++r.unfinished;
      continue;
    }
    if (st.aborted) {
      ++r.aborted;
      continue;
    }
    ++r.committed;
    // Steady-state window: issued after warmup, finished within the run.
    if (st.issuedAt >= warmup && st.doneAt <= duration) {
      ++measuredCommitted;
      lat.push_back(st.doneAt - st.issuedAt);
    }
  }
  double window = static_cast<double>(duration - warmup) / kSec;
  if (window > 0)
    r.throughputTps = static_cast<double>(measuredCommitted) / window;
  std::sort(lat.begin(), lat.end());
  if (!lat.empty()) {
    SimTime sum = 0;
    for (SimTime v : lat) sum += v;
    r.meanMs = static_cast<double>(sum) / static_cast<double>(lat.size()) / kMs;
    r.p50Ms = percentile(lat, 0.50);
    r.p95Ms = percentile(lat, 0.95);
    r.p99Ms = percentile(lat, 0.99);
  }
  uint64_t decided = r.committed + r.aborted;
  if (decided > 0)
    r.abortRate = static_cast<double>(r.aborted) / static_cast<double>(decided);

  r.spawns = spawns_;
  for (const auto& [id, n] : spawns_) {
    (void)id;
    r.totalSpawns += n;
  }
  for (const auto& [id, n] : spawns_)
    r.costCents[id] += cost.spawnCents * static_cast<double>(n);
  for (const auto& [id, t] : busy) {
    if (id.role == Role::kShimNode || id.role == Role::kGateway) {
      r.costCents[id] += cost.vmCentsPerSec * r.durationSec;
    } else if (id.role == Role::kExecutor) {
      r.costCents[id] += cost.execCentsPerSec * static_cast<double>(t) / kSec;
    }
    (void)t;
  }
  for (const auto& [id, c] : r.costCents) {
    (void)id;
    r.totalCostCents += c;
  }
  if (r.committed > 0)
    r.costCentsPerKtxn =
        r.totalCostCents * 1000.0 / static_cast<double>(r.committed);
  return r;
}

}  // namespace sbft
