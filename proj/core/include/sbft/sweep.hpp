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

#include <string>
#include <vector>

#include "sbft/runner.hpp"
#include "sbft/scenario.hpp"

namespace sbft {

struct SweepPoint {
  std::string label;
  Scenario scenario;
};

// One sweep row keeps the numbers, not the trace; sweeps over many points
// would otherwise hold every run in memory.
struct SweepRow {
  std::string label;
  RunMode mode = RunMode::kServerlessBft;
  uint32_t clients = 0;
  uint32_t batchSize = 0;
  double conflictRate = 0;
  uint32_t nR = 0;
  uint32_t nE = 0;
  MetricsReport metrics;
  bool checksOk = false;
};

struct SweepResult {
  std::string name;
  std::vector<SweepRow> rows;

  // Column order is part of the tool's contract:
  // label,mode,clients,batch_size,conflict_rate,n_r,n_e,issued,committed,
  // aborted,unfinished,tps,mean_ms,p50_ms,p95_ms,p99_ms,abort_rate,msgs,
  // bytes,spawns,cost_cents,cost_per_ktxn,checks
  std::string csv() const;

  // Companion gnuplot script plotting throughput and p50 latency against
  // the row index of the named CSV file.
  std::string gnuplot(const std::string& csvPath) const;

  bool all_ok() const;
};

SweepResult run_sweep(const std::string& name,
                      const std::vector<SweepPoint>& points);

// Canned families. Each derives points from the base scenario by varying
// one knob and relabeling.
std::vector<SweepPoint> sweep_clients(const Scenario& base,
                                      const std::vector<uint32_t>& counts);
std::vector<SweepPoint> sweep_conflict(const Scenario& base,
                                       const std::vector<double>& rates);
std::vector<SweepPoint> sweep_batch(const Scenario& base,
                                    const std::vector<uint32_t>& sizes);
std::vector<SweepPoint> sweep_modes(const Scenario& base);

}  // namespace sbft
