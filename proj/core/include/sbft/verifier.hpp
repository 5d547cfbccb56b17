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
#include <vector>

#include "sbft/message.hpp"
#include "sbft/simnet.hpp"
#include "sbft/storage.hpp"

namespace sbft {

// The trusted validation tier. Collects executor reports per batch, waits
// for a match quorum of byte-identical (footprint, result) pairs, applies
// batches strictly in sequence order with a read-version freshness check,
// and runs the recovery dialogue with clients and shim nodes. It is the
// only writer storage accepts.
class VerifierComponent : public Component {
 public:
  VerifierComponent(Storage* storage, std::vector<Identity> shimNodes,
                    bool requireCert, SimTime abortTimerFixed,
                    SimTime abortTimerPerTxn, uint32_t floodCap = 64);

  void on_envelope(const Envelope& env, Context& ctx) override;
  void on_timer(const std::string& timerKey, Context& ctx) override;

  uint64_t next_seq() const { return kmax_; }
  uint64_t decided_batches() const { return decidedCount_; }
  uint64_t aborted_batches() const { return abortedCount_; }

 private:
  struct ResultClass {
    RwSet rw;
    ExecResult result;
    std::set<Identity> senders;
  };

  struct Entry {
    uint64_t seq = 0;
    Batch request;
    CommitCertificate cert;
    std::map<Digest, ResultClass> classes;
    std::vector<Digest> classOrder;  // arrival order, for observation logs
    std::set<Identity> reporters;
    std::set<Identity> spawners;
    bool matched = false;
    Digest matchedClass;
    bool abortTagged = false;
    bool decided = false;
    bool abortedOutcome = false;
  };

  struct TxnOutcome {
    bool aborted = false;
    uint64_t value = 0;
    uint64_t seq = 0;
    uint64_t view = 0;
    Digest batchDigest;
  };

  void on_verify(const Envelope& env, Context& ctx);
  void on_resubmit(const Envelope& env, Context& ctx);
  void try_advance(Context& ctx);
  void decide_apply(Entry& e, Context& ctx);
  void decide_abort(Entry& e, uint8_t reason, Context& ctx);
  void post_decision(Entry& e, Context& ctx);
  void broadcast_nodes(Context& ctx, const Message& msg);
  std::string timer_key(const Digest& d) const;

  Storage* storage_;
  std::vector<Identity> shimNodes_;
  bool requireCert_;
  SimTime abortTimerFixed_;
  SimTime abortTimerPerTxn_;
  uint32_t floodCap_;

  std::map<Digest, Entry> entries_;
  std::map<uint64_t, Digest> seqIndex_;
  uint64_t kmax_ = 1;
  uint64_t decidedCount_ = 0;
  uint64_t abortedCount_ = 0;

  std::map<Digest, TxnOutcome> txnOutcomes_;  // by txn payload digest
  std::map<Digest, Digest> txnToBatch_;
  std::set<uint64_t> errSeqOutstanding_;
  std::set<Digest> errTxnOutstanding_;
  // Resend throttles so a hammering client cannot turn the recovery
  // dialogue into shim-wide noise.
  std::map<uint64_t, SimTime> errSeqLast_;
  std::map<Digest, SimTime> errTxnLast_;
  std::map<Digest, SimTime> replaceLast_;
};

}  // namespace sbft
