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

#include "sbft/message.hpp"
#include "sbft/simnet.hpp"
#include "sbft/storage.hpp"

namespace sbft {

// Fault classes a spawned executor can be assigned by the adversary.
enum class ExecutorFault : uint8_t {
  kHonest = 0,
  kWrongResult = 1,     // reports perturbed writes and outputs
  kSilent = 2,          // never reports
  kDuplicateReport = 3, // reports the same result several times
  kStaleRead = 4,       // pretends storage still holds its initial state
};

// A stateless serverless worker. It holds no state between requests: all
// it gets is the Execute payload, fetch access to storage, and the
// verifier's address. Each transaction costs one fetch round trip plus
// compute, modeled as scheduled steps; reads hit live storage at step
// time, so a slow executor genuinely observes later state than a fast one.
class ExecutorComponent : public Component {
 public:
  ExecutorComponent(const Storage* storage, Identity verifier,
                    const ProcessingModel& proc, LinkSpec storageLink,
                    ExecutorFault fault, uint32_t ordinal, bool requireCert);

  void on_envelope(const Envelope& env, Context& ctx) override;
  void on_step(uint64_t token, Context& ctx) override;

 private:
  SimTime fetch_delay(const Transaction& t) const;
  SimTime compute_delay(const Transaction& t) const;
  void run_txn(const Transaction& t);
  void finish(Context& ctx);

  const Storage* storage_;
  Identity verifier_;
  ProcessingModel proc_;
  LinkSpec storageLink_;
  ExecutorFault fault_;
  uint32_t ordinal_;
  bool requireCert_;

  bool running_ = false;
  ExecuteBody body_;
  Identity spawner_;
  size_t txnIdx_ = 0;
  std::map<Key, Value> buffer_;
  RwSet rw_;
  std::vector<TxnOutput> outputs_;
};

}  // namespace sbft
