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
#include <optional>
#include <string>
#include <vector>

#include "sbft/metrics.hpp"
#include "sbft/monitors.hpp"
#include "sbft/oracle.hpp"
#include "sbft/scenario.hpp"
#include "sbft/storage.hpp"
#include "sbft/trace.hpp"

namespace sbft {

// Everything a finished run leaves behind. `findings.ok` is the single
// verdict: it folds in the safety invariants, the wire audit and the
// replay oracle.
struct RunResult {
  Scenario scenario;
  MetricsReport metrics;
  MonitorFindings findings;
  OracleReport oracle;
  Trace trace;
  std::optional<Storage> storage;  // final store; absent in node-local mode
  Digest traceDigest;
  SimTime endTime = 0;
  bool drained = false;

  // Component state at teardown, index-aligned with the shim.
  std::vector<uint64_t> nodeView;
  std::vector<uint64_t> nodeStableSeq;
  std::vector<uint64_t> nodeCommitted;
  std::vector<uint64_t> nodeViewsInstalled;
  uint64_t verifierNextSeq = 0;
  uint64_t verifierDecided = 0;
  uint64_t verifierAborted = 0;
  uint64_t executorsMinted = 0;
  uint64_t clientsIdle = 0;
  std::map<Identity, SimTime> busyTimes;

  std::string verdict_line() const;
};

// What the verifier could observe, stripped of timestamps. Two runs that
// look identical to the verifier produce equal extracts.
struct VerifierView {
  Digest digest;
  uint8_t what = 0;
  uint64_t aux = 0;

  auto operator<=>(const VerifierView&) const = default;
};

std::vector<VerifierView> verifier_observations(
    const std::vector<TraceRecord>& trace);

// The abort timer budget for one transaction: twice the worst honest cost
// of fetching and computing it, so an honest straggler never trips the
// timer by accident.
SimTime abort_timer_per_txn(const ProcessingModel& proc, const LinkSpec& storageLink,
                            uint32_t opsPerTxn);

// Builds the deployment a scenario describes, runs it to completion and
// audits the result. Throws ConfigError on an invalid scenario.
RunResult run_scenario(const Scenario& s);

}  // namespace sbft
