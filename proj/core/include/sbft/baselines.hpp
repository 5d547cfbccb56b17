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
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "sbft/message.hpp"
#include "sbft/simnet.hpp"

namespace sbft {

// No-consensus baseline: one trusted ingress batches requests, stamps
// sequence numbers and launches executors directly. Certificates are
// placeholders; the executors and the verifier run with certificate
// checking off in this mode.
class GatewayComponent : public Component {
 public:
  explicit GatewayComponent(Identity verifier);

  void on_envelope(const Envelope& env, Context& ctx) override;
  void on_timer(const std::string& timerKey, Context& ctx) override;

  uint64_t batches_launched() const { return nextSeq_ - 1; }

 private:
  void admit(const Signed<Transaction>& txn, Context& ctx);
  void form_batches(Context& ctx, bool flush);
  void launch(uint64_t seq, Context& ctx);

  Identity verifier_;
  uint64_t nextSeq_ = 1;
  std::deque<Signed<Transaction>> pending_;
  std::set<Digest> pendingSet_;
  std::set<Digest> orderedTxns_;
  std::map<Digest, uint64_t> txnSlot_;

  struct Entry {
    Batch request;
    Digest digest;
  };
  std::map<uint64_t, Entry> slots_;
  std::set<uint64_t> resolvedSeqs_;
};

// Crash-tolerant baseline: a fixed leader assigns order, followers
// acknowledge over authenticated channels, and a simple majority commits.
// No digital signatures, no view changes; byzantine behavior is out of
// this baseline's model.
class CftNodeComponent : public Component {
 public:
  CftNodeComponent(std::vector<Identity> nodes, Identity verifier);

  void on_envelope(const Envelope& env, Context& ctx) override;
  void on_timer(const std::string& timerKey, Context& ctx) override;

  uint64_t committed_count() const { return committedCount_; }

 private:
  bool leader() const { return id().index == 0; }
  void admit(const Signed<Transaction>& txn, Context& ctx);
  void form_batches(Context& ctx, bool flush);
  void launch(uint64_t seq, Context& ctx);
  void check_commit(uint64_t seq, Context& ctx);

  std::vector<Identity> nodes_;
  Identity verifier_;
  uint64_t nextSeq_ = 1;
  std::deque<Signed<Transaction>> pending_;
  std::set<Digest> pendingSet_;
  std::set<Digest> orderedTxns_;
  std::map<Digest, uint64_t> txnSlot_;

  struct Slot {
    Batch request;
    Digest digest;
    std::set<uint32_t> acks;
    bool committed = false;
  };
  std::map<uint64_t, Slot> slots_;
  std::map<uint64_t, Digest> accepted_;  // follower record
  std::set<uint64_t> resolvedSeqs_;
  uint64_t committedCount_ = 0;
};

}  // namespace sbft
