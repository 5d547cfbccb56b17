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

#include "sbft/config.hpp"

#include <fmt/format.h>

namespace sbft {

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::kServerlessBft: return "serverless-bft";
    case RunMode::kShimLocal: return "shim-local";
    case RunMode::kServerlessCft: return "serverless-cft";
    case RunMode::kNoShim: return "no-shim";
  }
  return "?";
}

const char* conflict_mode_name(ConflictMode m) {
  switch (m) {
    case ConflictMode::kUnknownRw: return "unknown-rw";
    case ConflictMode::kKnownRw: return "known-rw";
    case ConflictMode::kNonConflicting: return "non-conflicting";
  }
  return "?";
}

const char* spawn_mode_name(SpawnMode m) {
  switch (m) {
    case SpawnMode::kCentralized: return "centralized";
    case SpawnMode::kDistributed: return "distributed";
    case SpawnMode::kDistributedConservative: return "distributed-conservative";
  }
  return "?";
}

void Config::validate() const {
  if (nR == 0) throw ConfigError("nR must be positive");
  if (batchSize == 0) throw ConfigError("batchSize must be positive");
  if (checkpointInterval == 0) throw ConfigError("checkpointInterval must be positive");

  bool byzantineShim =
      mode == RunMode::kServerlessBft || mode == RunMode::kShimLocal;
  if (byzantineShim && nR < 3 * fR + 1)
    throw ConfigError(fmt::format(
        "nR={} cannot tolerate fR={} byzantine nodes (need nR >= 3*fR+1)", nR,
        fR));

  bool usesExecutors =
      mode == RunMode::kServerlessBft || mode == RunMode::kServerlessCft ||
      mode == RunMode::kNoShim;
  if (usesExecutors && mode != RunMode::kServerlessBft) {
    if (nE < fE + 1)
      throw ConfigError(fmt::format(
          "nE={} cannot reach a match quorum with fE={} (need nE >= fE+1)",
          nE, fE));
  }
  if (usesExecutors && mode == RunMode::kServerlessBft) {
    if (nE == 0) throw ConfigError("nE must be positive");
    if (conflictMode == ConflictMode::kUnknownRw) {
      // With footprints unknown upfront, concurrent batches can diverge
      // honestly; distinguishing that from byzantine divergence needs the
      // larger pool.
      if (nE < 3 * fE + 1)
        throw ConfigError(fmt::format(
            "nE={} cannot tolerate fE={} byzantine executors with unknown "
            "footprints (need nE >= 3*fE+1)",
            nE, fE));
    } else if (nE < 2 * fE + 1) {
      throw ConfigError(fmt::format(
          "nE={} cannot tolerate fE={} byzantine executors (need nE >= 2*fE+1)",
          nE, fE));
    }
  }
}

}  // namespace sbft
