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
#include <string>
#include <utility>
#include <vector>

#include "sbft/adversary.hpp"
#include "sbft/config.hpp"
#include "sbft/metrics.hpp"
#include "sbft/simnet.hpp"
#include "sbft/workload.hpp"

namespace sbft {

struct AdversaryScript {
  std::vector<std::pair<uint32_t, AttackSpec>> nodeAttacks;
  std::vector<ExecutorFaultSpec> execFaults;

  bool empty() const { return nodeAttacks.empty() && execFaults.empty(); }
  std::set<uint32_t> byzantine_nodes() const;
};

// A complete run description: sizing, timing, network weather, workload
// shape and fault script. Serializes to and from JSON so experiment files
// can live beside the code and in test fixtures.
struct Scenario {
  std::string name = "unnamed";
  uint64_t seed = 1;
  SimTime duration = 2 * kSec;  // client issue window
  SimTime warmup = 0;           // excluded from rate and latency figures
  SimTime drain = 2 * kSec;     // settle time after the issue window
  uint64_t txnLimit = 0;        // per client, 0 = until the window closes
  uint64_t kvSeed = 0x5eed;
  bool outOfModel = false;  // sizes or fault counts outside the guarantee
                            // envelope, accepted deliberately

  Config config;
  NetworkModel net;
  ProcessingModel proc;
  WorkloadSpec workload;
  AdversaryScript adversary;
  CostModel cost;

  static Scenario from_json(const std::string& text);
  // Reads the file; SBFTSIM_SEED in the environment overrides the seed.
  static Scenario load(const std::string& path);
  std::string to_json() const;

  // Throws ConfigError when the description is internally inconsistent or
  // the sizes cannot deliver the advertised guarantees (unless the
  // scenario opts out via outOfModel).
  void validate() const;
};

}  // namespace sbft
