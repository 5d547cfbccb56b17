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
#include <set>
#include <tuple>
#include <vector>

#include "sbft/metrics.hpp"
#include "sbft/simnet.hpp"
#include "sbft/workload.hpp"

namespace sbft {

// Closed-loop client: one transaction in flight, resubmission with doubled
// backoff while it is unresolved, next transaction on a terminal answer.
// In the serverless modes resubmissions go to the trusted store, whose
// recovery dialogue with the shim is what unsticks a lost request; in the
// node-local mode they are broadcast to every node and answers count only
// once f_r+1 nodes agree.
class ClientComponent : public Component {
 public:
  ClientComponent(std::vector<Identity> nodes, Identity verifier,
                  Identity gateway, WorkloadGen* gen, Metrics* metrics,
                  uint64_t txnLimit, SimTime issueCutoff);

  // Replaces the generator stream with a fixed list, issued in order.
  void preload(std::vector<Transaction> txns);

  void on_start(Context& ctx) override;
  void on_envelope(const Envelope& env, Context& ctx) override;
  void on_timer(const std::string& timerKey, Context& ctx) override;

  uint64_t issued() const { return issued_; }
  uint64_t completed() const { return completed_; }
  uint64_t aborted() const { return aborted_; }
  bool idle() const { return !inflight_.has_value(); }
  const std::vector<uint64_t>& outputs_seen() const { return outputsSeen_; }

 private:
  void issue_next(Context& ctx);
  void submit_first(Context& ctx);
  void resubmit(Context& ctx);
  void finish(bool wasAborted, uint64_t value, Context& ctx);

  std::vector<Identity> nodes_;
  Identity verifier_;
  Identity gateway_;
  WorkloadGen* gen_ = nullptr;
  Metrics* metrics_ = nullptr;
  uint64_t txnLimit_ = 0;
  SimTime issueCutoff_ = 0;

  std::vector<Transaction> preloaded_;
  size_t preloadNext_ = 0;

  uint64_t issued_ = 0;
  uint64_t completed_ = 0;
  uint64_t aborted_ = 0;

  std::optional<Signed<Transaction>> inflight_;
  Digest inflightDigest_;
  SimTime issuedAt_ = 0;
  SimTime backoff_ = 0;
  uint64_t believedView_ = 0;

  // Node-local mode: matching answers per (seq, batch digest, output
  // digest), counted over distinct nodes.
  std::map<std::tuple<uint64_t, Digest, Digest>, std::set<uint32_t>>
      matchVotes_;

  std::vector<uint64_t> outputsSeen_;  // committed values, issue order
};

}  // namespace sbft
