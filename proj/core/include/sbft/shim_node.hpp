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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sbft/message.hpp"
#include "sbft/simnet.hpp"

namespace sbft {

// One edge node of the shim: the three-phase ordering state machine with
// executor spawning, watchdog timers, view changes, certificate-only
// checkpoints and the recovery dialogue with the verifier. In the
// node-local execution mode it additionally applies committed batches to
// its own key-value copy and answers clients directly.
class ShimNodeComponent : public Component {
 public:
  // kvSeed matches the storage seed so node-local execution reads the
  // same initial values the executors would.
  ShimNodeComponent(std::vector<Identity> nodes, Identity verifier,
                    uint64_t kvSeed);

  void on_start(Context& ctx) override;
  void on_envelope(const Envelope& env, Context& ctx) override;
  void on_timer(const std::string& timerKey, Context& ctx) override;

  uint64_t view() const { return view_; }
  uint64_t stable_seq() const { return stableSeq_; }
  const std::map<uint64_t, Digest>& committed() const { return committed_; }
  uint64_t committed_count() const { return committed_.size(); }
  uint64_t views_installed() const { return viewsInstalled_; }

  // Node-local execution mode only.
  Digest local_state_digest() const;
  uint64_t local_applied_through() const { return execNext_ - 1; }

 private:
  struct Slot {
    uint64_t view = 0;  // view the accepted proposal belongs to
    bool havePreprepare = false;
    bool requestKnown = false;  // false for certificate-only adoption
    Digest digest;
    Batch request;
    std::map<Digest, std::map<uint32_t, Signed<PrepareBody>>> prepares;
    std::map<Digest, std::map<uint32_t, Signed<CommitBody>>> commits;
    bool sentPrepare = false;
    bool prepared = false;
    bool sentCommit = false;
    bool committed = false;
    bool spawned = false;
    Signed<CommitBody> ownCommit;
    CommitCertificate cert;
    std::vector<Signed<PrepareBody>> preparedProof;
  };

  // Planner bookkeeping for the declared-footprint mode: batches wait in
  // sequence order and launch only against disjoint outstanding locks.
  struct Footprint {
    std::set<Key> reads;
    std::set<Key> writes;
  };

  bool is_primary() const;
  Identity primary_id() const;
  uint32_t my_index() const;
  void broadcast(Context& ctx, const Message& msg);
  uint64_t high_water(const Config& cfg) const;
  Slot& slot(uint64_t seq);

  // Request intake and batch formation.
  void on_client_request(const Envelope& env, Context& ctx);
  void admit_pending(const Signed<Transaction>& txn, Context& ctx);
  void try_form_batches(Context& ctx, bool flush);
  void propose(Batch batch, Context& ctx);

  // Three-phase agreement.
  void on_preprepare(const Envelope& env, Context& ctx);
  void accept_proposal(uint64_t seq, uint64_t view, const Digest& digest,
                       const Batch& request, Context& ctx);
  void send_own_prepare(uint64_t seq, Context& ctx);
  void on_prepare(const Envelope& env, Context& ctx);
  void on_commit(const Envelope& env, Context& ctx);
  void check_prepared(uint64_t seq, Context& ctx);
  void check_committed(uint64_t seq, Context& ctx);
  void became_committed(uint64_t seq, Context& ctx);

  // Spawning policies.
  bool spawner_here(const Config& cfg) const;
  void queue_for_spawn(uint64_t seq, Context& ctx);
  void spawn_slot(uint64_t seq, Context& ctx);
  void plan_admit(Context& ctx);
  void plan_rescan(Context& ctx);
  void plan_resolved(uint64_t seq, Context& ctx);
  bool seq_resolved(uint64_t seq) const;
  bool slot_disposable(uint64_t seq, const Config& cfg) const;
  static Footprint batch_footprint(const Batch& b);
  static bool conflicts(const Footprint& a, const Footprint& b);

  // Node-local execution.
  void drain_local_exec(Context& ctx);

  // Checkpoints.
  void maybe_emit_checkpoint(Context& ctx);
  void on_checkpoint(const Envelope& env, Context& ctx);
  void record_checkpoint_vote(uint64_t toSeq, const Digest& coverage,
                              uint32_t sender, Context& ctx);
  void advance_stable(uint64_t toSeq, Context& ctx);

  // View changes.
  void start_view_change(uint64_t target, Context& ctx);
  void on_view_change(const Envelope& env, Context& ctx);
  void on_new_view(const Envelope& env, Context& ctx);
  void maybe_lead_new_view(uint64_t target, Context& ctx);
  void maybe_join_view_change(Context& ctx);
  void enter_new_view(uint64_t view, uint64_t baseSeq,
                      const std::vector<SeqAssignment>& assignments,
                      Context& ctx);
  std::vector<PreparedProof> collect_proofs() const;
  // Deterministic reconstruction of the new view's slot assignments from a
  // support quorum, so receivers check the leader instead of trusting it.
  static bool compute_assignments(
      const std::vector<Signed<ViewChangeBody>>& support, uint64_t forView,
      uint32_t voteQuorum, uint32_t prepareQuorum, uint64_t* baseSeq,
      std::vector<SeqAssignment>* out);

  // Verifier dialogue.
  void on_error(const Envelope& env, Context& ctx);
  void on_ack(const Envelope& env, Context& ctx);
  void on_replace(const Envelope& env, Context& ctx);
  void on_resolution(const Envelope& env, Context& ctx);

  std::vector<Identity> nodes_;
  Identity verifier_;
  uint64_t kvSeed_ = 0;

  uint64_t view_ = 0;
  bool inViewChange_ = false;
  uint64_t nextSeq_ = 1;  // primary only
  uint64_t stableSeq_ = 0;
  uint64_t viewsInstalled_ = 0;

  std::map<uint64_t, Slot> slots_;
  std::map<uint64_t, Digest> committed_;

  std::deque<Signed<Transaction>> pending_;
  std::set<Digest> pendingSet_;
  std::set<Digest> orderedTxns_;
  std::map<Digest, uint64_t> txnSlot_;
  std::set<uint64_t> needsRespawn_;

  // Declared-footprint planner.
  uint64_t planNext_ = 1;
  std::deque<uint64_t> planQueue_;
  std::map<uint64_t, Footprint> outstanding_;
  std::set<uint64_t> resolvedSeqs_;
  // The verifier decides heights in order, so any decision or error it emits
  // vouches for every height below the one it names.
  uint64_t resolvedThrough_ = 0;

  // Node-local execution state.
  std::map<Key, Value> localKv_;
  uint64_t execNext_ = 1;
  std::map<Digest, TxnOutput> localDone_;  // by txn payload digest

  // Checkpoints: votes per (toSeq, coverage digest).
  std::map<uint64_t, std::map<Digest, std::set<uint32_t>>> ckptVotes_;
  std::set<uint64_t> ckptEmitted_;

  // View change votes per target view.
  std::map<uint64_t, std::map<uint32_t, Signed<ViewChangeBody>>> vcVotes_;
  uint64_t vcVotedFor_ = 0;  // highest view this node has voted toward
  std::set<uint64_t> replaceHandledView_;
};

}  // namespace sbft
