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

#include "sbft/shim_node.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "sbft/storage.hpp"

namespace sbft {

namespace {

std::string prog_key(uint64_t seq) { return fmt::format("prog:{}", seq); }
std::string rt_seq_key(uint64_t k) { return fmt::format("rt:k:{}", k); }
std::string rt_txn_key(const Digest& d) { return "rt:t:" + d.short_hex(); }
std::string fwd_key(const Digest& d) { return "fwd:" + d.short_hex(); }

Digest coverage_digest(const std::vector<CommitCertificate>& certs) {
  ByteWriter w;
  for (const auto& c : certs) {
    w.u64(c.seq);
    c.digest.encode(w);
  }
  return digest_bytes(w.data());
}

}  // namespace

ShimNodeComponent::ShimNodeComponent(std::vector<Identity> nodes,
                                     Identity verifier, uint64_t kvSeed)
    : nodes_(std::move(nodes)), verifier_(verifier), kvSeed_(kvSeed) {}

bool ShimNodeComponent::is_primary() const {
  return my_index() == view_ % nodes_.size();
}

Identity ShimNodeComponent::primary_id() const {
  return nodes_[view_ % nodes_.size()];
}

uint32_t ShimNodeComponent::my_index() const { return id().index; }

void ShimNodeComponent::broadcast(Context& ctx, const Message& msg) {
  for (const auto& n : nodes_)
    if (n != id()) ctx.send(n, msg);
}

uint64_t ShimNodeComponent::high_water(const Config& cfg) const {
  return stableSeq_ + 4ull * cfg.checkpointInterval;
}

ShimNodeComponent::Slot& ShimNodeComponent::slot(uint64_t seq) {
  return slots_[seq];
}

void ShimNodeComponent::on_start(Context& ctx) { (void)ctx; }

void ShimNodeComponent::on_envelope(const Envelope& env, Context& ctx) {
  if (!verify_signed(env)) return;
  switch (env.payload.kind()) {
    case MessageKind::kClientRequest:
      on_client_request(env, ctx);
      break;
    case MessageKind::kPreprepare:
      on_preprepare(env, ctx);
      break;
    case MessageKind::kPrepare:
      on_prepare(env, ctx);
      break;
    case MessageKind::kCommit:
      on_commit(env, ctx);
      break;
    case MessageKind::kCheckpoint:
      on_checkpoint(env, ctx);
      break;
    case MessageKind::kViewChange:
      on_view_change(env, ctx);
      break;
    case MessageKind::kNewView:
      on_new_view(env, ctx);
      break;
    case MessageKind::kError:
      on_error(env, ctx);
      break;
    case MessageKind::kAck:
      on_ack(env, ctx);
      break;
    case MessageKind::kReplace:
      on_replace(env, ctx);
      break;
    case MessageKind::kResponse:
    case MessageKind::kAbort:
      on_resolution(env, ctx);
      break;
    default:
      break;
  }
}

void ShimNodeComponent::on_timer(const std::string& timerKey, Context& ctx) {
  if (timerKey == "flush") {
    try_form_batches(ctx, true);
    return;
  }
  if (timerKey == "vcretry") {
    if (inViewChange_) start_view_change(vcVotedFor_ + 1, ctx);
    return;
  }
  if (timerKey.rfind("prog:", 0) == 0 || timerKey.rfind("rt:", 0) == 0 ||
      timerKey.rfind("fwd:", 0) == 0) {
    // A watched request made no progress: the current primary is suspect.
    start_view_change(view_ + 1, ctx);
    return;
  }
}

// ---------------------------------------------------------------------------
// Request intake

void ShimNodeComponent::on_client_request(const Envelope& env, Context& ctx) {
  if (env.signer.role != Role::kClient && env.signer.role != Role::kShimNode)
    return;
  const auto& body = env.payload.as<ClientRequestBody>();
  if (!verify_signed(body.txn) || body.txn.signer.role != Role::kClient) {
    ctx.trace(NoteRec{ctx.now(), id(), "malformed client request dropped"});
    return;
  }
  Digest td = digest_of(body.txn.payload);
  if (orderedTxns_.count(td)) {
    auto slotIt = txnSlot_.find(td);
    if (slotIt == txnSlot_.end()) return;
    uint64_t seq = slotIt->second;
    if (ctx.config().mode == RunMode::kShimLocal) {
      auto done = localDone_.find(td);
      if (done != localDone_.end()) {
        auto c = committed_.find(seq);
        ResponseBody rb;
        rb.view = view_;
        rb.seq = seq;
        rb.digest = c != committed_.end() ? c->second : Digest{};
        rb.outputs = {done->second};
        ctx.send(client_id(body.txn.payload.client), Message{rb});
      }
      return;
    }
    // Already ordered: a spawner re-issues the certified work instead of
    // running agreement again.
    auto sit = slots_.find(seq);
    if (sit != slots_.end() && sit->second.committed &&
        spawner_here(ctx.config()) && !seq_resolved(seq) &&
        ctx.config().conflictMode != ConflictMode::kKnownRw)
      spawn_slot(seq, ctx);
    return;
  }
  admit_pending(body.txn, ctx);
  if (!is_primary() && env.signer.role == Role::kClient) {
    ctx.send(primary_id(), Message{ClientRequestBody{body.txn}});
    if (ctx.config().mode == RunMode::kShimLocal)
      ctx.set_timer(fwd_key(td), ctx.config().nodeProgressTimeout);
  }
}

void ShimNodeComponent::admit_pending(const Signed<Transaction>& txn,
                                      Context& ctx) {
  Digest td = digest_of(txn.payload);
  if (orderedTxns_.count(td)) return;
  if (!pendingSet_.insert(td).second) return;
  pending_.push_back(txn);
  try_form_batches(ctx, false);
}

void ShimNodeComponent::try_form_batches(Context& ctx, bool flush) {
  if (!is_primary() || inViewChange_) return;
  const Config& cfg = ctx.config();
  while (!pending_.empty() &&
         orderedTxns_.count(digest_of(pending_.front().payload))) {
    pendingSet_.erase(digest_of(pending_.front().payload));
    pending_.pop_front();
  }
  while (!pending_.empty() && nextSeq_ <= high_water(cfg) &&
         (pending_.size() >= cfg.batchSize || flush)) {
    Batch b;
    while (!pending_.empty() && b.txns.size() < cfg.batchSize) {
      Digest td = digest_of(pending_.front().payload);
      pendingSet_.erase(td);
      if (!orderedTxns_.count(td)) b.txns.push_back(pending_.front());
      pending_.pop_front();
    }
    if (!b.txns.empty()) propose(std::move(b), ctx);
    flush = false;  // at most one partial batch per flush firing
  }
  if (!pending_.empty() && !ctx.timer_active("flush"))
    ctx.set_timer("flush", cfg.batchFlushTimeout);
}

void ShimNodeComponent::propose(Batch batch, Context& ctx) {
  uint64_t seq = nextSeq_++;
  Digest d = digest_of(batch);
  PreprepareBody pp;
  pp.view = view_;
  pp.seq = seq;
  pp.digest = d;
  pp.request = batch;
  broadcast(ctx, Message{pp});
  accept_proposal(seq, view_, d, batch, ctx);
}

// ---------------------------------------------------------------------------
// Three-phase agreement

void ShimNodeComponent::on_preprepare(const Envelope& env, Context& ctx) {
  if (env.signer.role != Role::kShimNode) return;
  const auto& pp = env.payload.as<PreprepareBody>();
  if (inViewChange_ || pp.view != view_ || env.signer != primary_id()) return;
  if (pp.seq <= stableSeq_ || pp.seq > high_water(ctx.config())) return;
  if (digest_of(pp.request) != pp.digest) return;
  for (const auto& t : pp.request.txns)
    if (!verify_signed(t) || t.signer.role != Role::kClient) return;
  auto it = slots_.find(pp.seq);
  if (it != slots_.end() && it->second.havePreprepare) {
    if (it->second.digest != pp.digest)
      ctx.trace(NoteRec{ctx.now(), id(),
                        fmt::format("equivocating proposal at seq {}",
                                    pp.seq)});
    return;
  }
  accept_proposal(pp.seq, pp.view, pp.digest, pp.request, ctx);
}

void ShimNodeComponent::accept_proposal(uint64_t seq, uint64_t view,
                                        const Digest& digest,
                                        const Batch& request, Context& ctx) {
  Slot& s = slot(seq);
  s.view = view;
  s.havePreprepare = true;
  s.requestKnown = true;
  s.digest = digest;
  s.request = request;
  for (const auto& t : request.txns) {
    Digest td = digest_of(t.payload);
    orderedTxns_.insert(td);
    txnSlot_[td] = seq;
    pendingSet_.erase(td);
    if (ctx.config().mode == RunMode::kShimLocal) ctx.cancel_timer(fwd_key(td));
  }
  if (!s.committed)
    ctx.set_timer(prog_key(seq), ctx.config().nodeProgressTimeout);
  send_own_prepare(seq, ctx);
  check_prepared(seq, ctx);
}

void ShimNodeComponent::send_own_prepare(uint64_t seq, Context& ctx) {
  Slot& s = slot(seq);
  if (s.sentPrepare) return;
  s.sentPrepare = true;
  PrepareBody p;
  p.view = view_;
  p.seq = seq;
  p.digest = s.digest;
  Signed<PrepareBody> sp = ctx.key().sign(p, SigScheme::kDs);
  s.prepares[s.digest][my_index()] = sp;
  broadcast(ctx, Message{sp});
}

void ShimNodeComponent::on_prepare(const Envelope& env, Context& ctx) {
  if (env.signer.role != Role::kShimNode) return;
  const auto& sp = env.payload.as<Signed<PrepareBody>>();
  if (!verify_signed(sp) || sp.signer != env.signer) return;
  const PrepareBody& p = sp.payload;
  if (inViewChange_ || p.view != view_) return;
  if (p.seq <= stableSeq_ || p.seq > high_water(ctx.config())) return;
  slot(p.seq).prepares[p.digest][sp.signer.index] = sp;
  check_prepared(p.seq, ctx);
}

void ShimNodeComponent::on_commit(const Envelope& env, Context& ctx) {
  if (env.signer.role != Role::kShimNode) return;
  const auto& sc = env.payload.as<Signed<CommitBody>>();
  if (!verify_signed(sc) || sc.signer != env.signer) return;
  const CommitBody& c = sc.payload;
  if (inViewChange_ || c.view != view_) return;
  if (c.seq <= stableSeq_ || c.seq > high_water(ctx.config())) return;
  slot(c.seq).commits[c.digest][sc.signer.index] = sc;
  check_committed(c.seq, ctx);
}

void ShimNodeComponent::check_prepared(uint64_t seq, Context& ctx) {
  Slot& s = slot(seq);
  if (!s.havePreprepare || s.prepared) return;
  auto it = s.prepares.find(s.digest);
  if (it == s.prepares.end()) return;
  if (it->second.size() < ctx.config().prepare_quorum()) return;
  s.prepared = true;
  s.preparedProof.clear();
  for (const auto& [idx, sp] : it->second) {
    (void)idx;
    s.preparedProof.push_back(sp);
    if (s.preparedProof.size() == ctx.config().prepare_quorum()) break;
  }
  if (!s.sentCommit) {
    s.sentCommit = true;
    CommitBody c;
    c.view = view_;
    c.seq = seq;
    c.digest = s.digest;
    s.ownCommit = ctx.key().sign(c, SigScheme::kDs);
    s.commits[s.digest][my_index()] = s.ownCommit;
    broadcast(ctx, Message{s.ownCommit});
  }
  check_committed(seq, ctx);
}

void ShimNodeComponent::check_committed(uint64_t seq, Context& ctx) {
  Slot& s = slot(seq);
  if (s.committed || !s.prepared) return;
  auto it = s.commits.find(s.digest);
  if (it == s.commits.end()) return;
  if (it->second.size() < ctx.config().commit_quorum()) return;
  s.cert.view = s.view;
  s.cert.seq = seq;
  s.cert.digest = s.digest;
  s.cert.attestations.clear();
  for (const auto& [idx, sc] : it->second) {
    (void)idx;
    s.cert.attestations.push_back(sc);
    if (s.cert.attestations.size() == ctx.config().commit_quorum()) break;
  }
  became_committed(seq, ctx);
}

void ShimNodeComponent::became_committed(uint64_t seq, Context& ctx) {
  Slot& s = slot(seq);
  s.committed = true;
  committed_[seq] = s.digest;
  ctx.cancel_timer(prog_key(seq));
  ctx.trace(CommitRec{ctx.now(), id(), s.view, seq, s.digest});
  switch (ctx.config().mode) {
    case RunMode::kServerlessBft:
      queue_for_spawn(seq, ctx);
      break;
    case RunMode::kShimLocal:
      drain_local_exec(ctx);
      break;
    default:
      break;
  }
  maybe_emit_checkpoint(ctx);
}

// ---------------------------------------------------------------------------
// Spawning

bool ShimNodeComponent::spawner_here(const Config& cfg) const {
  if (cfg.mode != RunMode::kServerlessBft) return false;
  if (cfg.spawnMode == SpawnMode::kCentralized) return is_primary();
  return true;
}

void ShimNodeComponent::queue_for_spawn(uint64_t seq, Context& ctx) {
  if (!spawner_here(ctx.config())) return;
  if (ctx.config().conflictMode == ConflictMode::kKnownRw) {
    plan_admit(ctx);
  } else {
    spawn_slot(seq, ctx);
  }
}

void ShimNodeComponent::spawn_slot(uint64_t seq, Context& ctx) {
  auto it = slots_.find(seq);
  if (it == slots_.end() || !it->second.requestKnown || !it->second.committed)
    return;
  Slot& s = it->second;
  uint32_t count = ctx.config().spawn_share();
  for (uint32_t i = 0; i < count; ++i) {
    ExecuteBody eb;
    eb.request = s.request;
    eb.cert = s.cert;
    eb.commit = s.ownCommit;
    eb.digest = s.digest;
    ctx.spawn_executor(std::move(eb));
  }
  s.spawned = true;
}

void ShimNodeComponent::plan_admit(Context& ctx) {
  if (planNext_ <= resolvedThrough_) planNext_ = resolvedThrough_ + 1;
  for (;;) {
    auto it = slots_.find(planNext_);
    if (it == slots_.end() || !it->second.committed) break;
    if (!seq_resolved(planNext_)) planQueue_.push_back(planNext_);
    ++planNext_;
  }
  // Heights the verifier reported missing re-enter the plan even when the
  // walk above has already moved past them.
  for (uint64_t seq : needsRespawn_) {
    if (seq >= planNext_ || seq_resolved(seq)) continue;
    auto it = slots_.find(seq);
    if (it == slots_.end() || !it->second.committed) continue;
    planQueue_.push_back(seq);
  }
  std::sort(planQueue_.begin(), planQueue_.end());
  planQueue_.erase(std::unique(planQueue_.begin(), planQueue_.end()),
                   planQueue_.end());
  plan_rescan(ctx);
}

void ShimNodeComponent::plan_rescan(Context& ctx) {
  Footprint blocked;
  for (auto it = planQueue_.begin(); it != planQueue_.end();) {
    uint64_t seq = *it;
    if (seq_resolved(seq)) {
      it = planQueue_.erase(it);
      continue;
    }
    auto sit = slots_.find(seq);
    if (sit == slots_.end() || !sit->second.requestKnown) {
      // Certificate-only adoption: some other node launched it already.
      it = planQueue_.erase(it);
      continue;
    }
    Footprint f = batch_footprint(sit->second.request);
    bool blockedHere = conflicts(f, blocked);
    if (!blockedHere) {
      for (const auto& [oseq, of] : outstanding_) {
        if (oseq == seq) continue;
        if (conflicts(f, of)) {
          blockedHere = true;
          break;
        }
      }
    }
    if (blockedHere) {
      blocked.reads.insert(f.reads.begin(), f.reads.end());
      blocked.writes.insert(f.writes.begin(), f.writes.end());
      ++it;
    } else {
      spawn_slot(seq, ctx);
      outstanding_.emplace(seq, std::move(f));
      it = planQueue_.erase(it);
    }
  }
}

void ShimNodeComponent::plan_resolved(uint64_t seq, Context& ctx) {
  if (outstanding_.erase(seq) > 0) plan_rescan(ctx);
}

bool ShimNodeComponent::seq_resolved(uint64_t seq) const {
  return seq <= resolvedThrough_ || resolvedSeqs_.count(seq) > 0;
}

bool ShimNodeComponent::slot_disposable(uint64_t seq, const Config& cfg) const {
  // Checkpoint truncation may not discard a batch the execution side still
  // needs: a spawner keeps request and certificate until the verifier has
  // decided the height, and node-local execution keeps undrained slots.
  switch (cfg.mode) {
    case RunMode::kServerlessBft:
      return seq_resolved(seq);
    case RunMode::kShimLocal:
      return seq < execNext_;
    default:
      return true;
  }
}

ShimNodeComponent::Footprint ShimNodeComponent::batch_footprint(
    const Batch& b) {
  Footprint f;
  for (const auto& t : b.txns) {
    auto r = t.payload.read_keys();
    auto w = t.payload.write_keys();
    f.reads.insert(r.begin(), r.end());
    f.writes.insert(w.begin(), w.end());
  }
  return f;
}

bool ShimNodeComponent::conflicts(const Footprint& a, const Footprint& b) {
  auto intersects = [](const std::set<Key>& x, const std::set<Key>& y) {
    auto xi = x.begin();
    auto yi = y.begin();
    while (xi != x.end() && yi != y.end()) {
      if (*xi < *yi) {
        ++xi;
      } else if (*yi < *xi) {
        ++yi;
      } else {
        return true;
      }
    }
    return false;
  };
  return intersects(a.writes, b.writes) || intersects(a.writes, b.reads) ||
         intersects(a.reads, b.writes);
}

// ---------------------------------------------------------------------------
// Node-local execution

void ShimNodeComponent::drain_local_exec(Context& ctx) {
  for (;;) {
    auto it = slots_.find(execNext_);
    if (it == slots_.end() || !it->second.committed ||
        !it->second.requestKnown)
      break;
    Slot& s = it->second;
    std::map<uint32_t, std::vector<TxnOutput>> perClient;
    std::map<Key, Value> batchWrites;
    std::vector<Transaction> txns;
    for (const auto& st : s.request.txns) {
      const Transaction& t = st.payload;
      txns.push_back(t);
      uint64_t acc = txn_seed(t);
      for (const auto& op : t.ops) {
        if (op.kind == OpKind::kRead) {
          auto kv = localKv_.find(op.key);
          Value v = kv != localKv_.end() ? kv->second
                                         : initial_value(kvSeed_, op.key);
          acc = mix64(acc, v);
        } else {
          Value nv = mix64(acc, op.arg);
          localKv_[op.key] = nv;
          batchWrites[op.key] = nv;
          acc = mix64(acc, nv);
        }
      }
      TxnOutput out{t.client, t.nonce, acc};
      localDone_[digest_of(t)] = out;
      perClient[t.client].push_back(out);
    }
    if (my_index() == 0)
      ctx.trace(ApplyRec{ctx.now(), execNext_, s.digest, std::move(txns),
                         std::move(batchWrites)});
    for (auto& [client, outs] : perClient) {
      ResponseBody rb;
      rb.view = s.view;
      rb.seq = execNext_;
      rb.digest = s.digest;
      rb.outputs = std::move(outs);
      ctx.send(client_id(client), Message{rb});
    }
    ++execNext_;
  }
}

Digest ShimNodeComponent::local_state_digest() const {
  ByteWriter w;
  w.kvmap(localKv_);
  return digest_bytes(w.data());
}

// ---------------------------------------------------------------------------
// Checkpoints

void ShimNodeComponent::maybe_emit_checkpoint(Context& ctx) {
  const uint64_t interval = ctx.config().checkpointInterval;
  if (interval == 0) return;
  for (;;) {
    uint64_t last = stableSeq_;
    if (!ckptEmitted_.empty()) last = std::max(last, *ckptEmitted_.rbegin());
    uint64_t target = last + interval;
    std::vector<CommitCertificate> certs;
    bool complete = true;
    for (uint64_t s = last + 1; s <= target; ++s) {
      auto it = slots_.find(s);
      if (it == slots_.end() || !it->second.committed) {
        complete = false;
        break;
      }
      certs.push_back(it->second.cert);
    }
    if (!complete) return;
    CheckpointBody cb;
    cb.fromSeq = last + 1;
    cb.toSeq = target;
    cb.certs = std::move(certs);
    cb.coverage = coverage_digest(cb.certs);
    ckptEmitted_.insert(target);
    broadcast(ctx, Message{cb});
    record_checkpoint_vote(target, cb.coverage, my_index(), ctx);
  }
}

void ShimNodeComponent::on_checkpoint(const Envelope& env, Context& ctx) {
  if (env.signer.role != Role::kShimNode) return;
  const auto& cb = env.payload.as<CheckpointBody>();
  if (cb.toSeq <= stableSeq_) return;
  if (cb.certs.empty() || cb.toSeq < cb.fromSeq) return;
  if (cb.certs.size() != cb.toSeq - cb.fromSeq + 1) return;
  for (size_t i = 0; i < cb.certs.size(); ++i) {
    const CommitCertificate& c = cb.certs[i];
    if (c.seq != cb.fromSeq + i) return;
    if (!certificate_valid(c, ctx.config().commit_quorum())) return;
  }
  if (coverage_digest(cb.certs) != cb.coverage) return;
  for (const auto& c : cb.certs) {
    if (committed_.count(c.seq)) continue;
    // Adoption by certificate: the batch itself may be unknown here, but
    // the commit is proven.
    Slot& s = slot(c.seq);
    s.digest = c.digest;
    s.cert = c;
    s.committed = true;
    committed_[c.seq] = c.digest;
    ctx.cancel_timer(prog_key(c.seq));
    ctx.trace(CommitRec{ctx.now(), id(), c.view, c.seq, c.digest});
  }
  record_checkpoint_vote(cb.toSeq, cb.coverage, env.signer.index, ctx);
  maybe_emit_checkpoint(ctx);
}

void ShimNodeComponent::record_checkpoint_vote(uint64_t toSeq,
                                               const Digest& coverage,
                                               uint32_t sender, Context& ctx) {
  if (toSeq <= stableSeq_) return;
  auto& votes = ckptVotes_[toSeq][coverage];
  votes.insert(sender);
  if (votes.size() >= ctx.config().commit_quorum()) {
    ctx.trace(CheckpointRec{ctx.now(), id(), toSeq, coverage});
    advance_stable(toSeq, ctx);
  }
}

void ShimNodeComponent::advance_stable(uint64_t toSeq, Context& ctx) {
  if (toSeq <= stableSeq_) return;
  stableSeq_ = toSeq;
  for (auto it = slots_.begin(); it != slots_.end();) {
    if (it->first <= stableSeq_ && slot_disposable(it->first, ctx.config())) {
      if (!it->second.committed) ctx.cancel_timer(prog_key(it->first));
      it = slots_.erase(it);
    } else {
      ++it;
    }
  }
  ckptVotes_.erase(ckptVotes_.begin(), ckptVotes_.upper_bound(stableSeq_));
  ckptEmitted_.erase(ckptEmitted_.begin(),
                     ckptEmitted_.upper_bound(stableSeq_));
  if (nextSeq_ <= stableSeq_) nextSeq_ = stableSeq_ + 1;
  // A checkpoint quorum is proof the system as a whole made progress;
  // standing suspicion is withdrawn until something stalls again.
  if (inViewChange_) {
    inViewChange_ = false;
    vcVotedFor_ = view_;
    ctx.cancel_timer("vcretry");
  }
  try_form_batches(ctx, false);
}

// ---------------------------------------------------------------------------
// View changes

std::vector<PreparedProof> ShimNodeComponent::collect_proofs() const {
  std::vector<PreparedProof> proofs;
  for (const auto& [seq, s] : slots_) {
    if (seq <= stableSeq_ || !s.prepared || !s.requestKnown) continue;
    PreparedProof p;
    p.seq = seq;
    p.view = s.view;
    p.digest = s.digest;
    p.request = s.request;
    p.prepares = s.preparedProof;
    proofs.push_back(std::move(p));
  }
  return proofs;
}

void ShimNodeComponent::start_view_change(uint64_t target, Context& ctx) {
  if (target <= view_ || target <= vcVotedFor_) return;
  vcVotedFor_ = target;
  inViewChange_ = true;
  ViewChangeBody vc;
  vc.newView = target;
  vc.baseSeq = stableSeq_;
  vc.proofs = collect_proofs();
  Signed<ViewChangeBody> sv = ctx.key().sign(vc, SigScheme::kDs);
  vcVotes_[target][my_index()] = sv;
  ctx.trace(VcVoteRec{ctx.now(), id(), target});
  broadcast(ctx, Message{sv});
  ctx.set_timer("vcretry", ctx.config().viewChangeRetryTimeout);
  maybe_lead_new_view(target, ctx);
}

void ShimNodeComponent::on_view_change(const Envelope& env, Context& ctx) {
  if (env.signer.role != Role::kShimNode) return;
  const auto& sv = env.payload.as<Signed<ViewChangeBody>>();
  if (!verify_signed(sv) || sv.signer != env.signer) return;
  if (sv.payload.newView <= view_) return;
  vcVotes_[sv.payload.newView][sv.signer.index] = sv;
  maybe_join_view_change(ctx);
  maybe_lead_new_view(sv.payload.newView, ctx);
}

void ShimNodeComponent::maybe_join_view_change(Context& ctx) {
  // Votes from fR+1 distinct peers cannot all come from byzantine nodes,
  // so at least one honest node saw something stall; join at the smallest
  // view those votes name.
  std::set<uint32_t> senders;
  uint64_t smallest = 0;
  for (const auto& [v, votes] : vcVotes_) {
    if (v <= view_) continue;
    for (const auto& [idx, sv] : votes) {
      (void)sv;
      senders.insert(idx);
    }
    if (smallest == 0) smallest = v;
  }
  if (senders.size() < ctx.config().fR + 1) return;
  if (smallest > vcVotedFor_) start_view_change(smallest, ctx);
}

void ShimNodeComponent::maybe_lead_new_view(uint64_t target, Context& ctx) {
  const Config& cfg = ctx.config();
  if (cfg.primary_of(target) != my_index() || target <= view_) return;
  auto it = vcVotes_.find(target);
  if (it == vcVotes_.end()) return;
  if (it->second.size() < cfg.prepare_quorum()) return;
  std::vector<Signed<ViewChangeBody>> support;
  for (const auto& [idx, sv] : it->second) {
    (void)idx;
    support.push_back(sv);
    if (support.size() == cfg.prepare_quorum()) break;
  }
  uint64_t baseSeq = 0;
  std::vector<SeqAssignment> assignments;
  if (!compute_assignments(support, target, cfg.prepare_quorum(),
                           cfg.prepare_quorum(), &baseSeq, &assignments))
    return;
  NewViewBody nv;
  nv.view = target;
  nv.baseSeq = baseSeq;
  nv.support = std::move(support);
  nv.assignments = assignments;
  broadcast(ctx, Message{nv});
  enter_new_view(target, baseSeq, assignments, ctx);
}

void ShimNodeComponent::on_new_view(const Envelope& env, Context& ctx) {
  if (env.signer.role != Role::kShimNode) return;
  const auto& nv = env.payload.as<NewViewBody>();
  if (nv.view <= view_) return;
  if (env.signer != nodes_[ctx.config().primary_of(nv.view)]) return;
  uint64_t baseSeq = 0;
  std::vector<SeqAssignment> recomputed;
  if (!compute_assignments(nv.support, nv.view, ctx.config().prepare_quorum(),
                           ctx.config().prepare_quorum(), &baseSeq,
                           &recomputed)) {
    ctx.trace(NoteRec{ctx.now(), id(), "new view with invalid support"});
    return;
  }
  bool same =
      baseSeq == nv.baseSeq && recomputed.size() == nv.assignments.size();
  for (size_t i = 0; same && i < recomputed.size(); ++i)
    if (digest_of(recomputed[i]) != digest_of(nv.assignments[i])) same = false;
  if (!same) {
    ctx.trace(NoteRec{ctx.now(), id(), "new view assignments disagree"});
    return;
  }
  for (const auto& a : nv.assignments) {
    auto c = committed_.find(a.seq);
    if (c != committed_.end() && c->second != a.digest) {
      ctx.trace(NoteRec{ctx.now(), id(),
                        fmt::format("new view contradicts commit at {}",
                                    a.seq)});
      return;
    }
  }
  enter_new_view(nv.view, nv.baseSeq, nv.assignments, ctx);
}

bool ShimNodeComponent::compute_assignments(
    const std::vector<Signed<ViewChangeBody>>& support, uint64_t forView,
    uint32_t voteQuorum, uint32_t prepareQuorum, uint64_t* baseSeq,
    std::vector<SeqAssignment>* out) {
  std::set<uint32_t> signers;
  for (const auto& sv : support) {
    if (!verify_signed(sv) || sv.signer.role != Role::kShimNode) return false;
    if (sv.payload.newView != forView) return false;
    signers.insert(sv.signer.index);
  }
  if (signers.size() < voteQuorum) return false;

  uint64_t base = 0;
  for (const auto& sv : support) base = std::max(base, sv.payload.baseSeq);

  auto proof_ok = [&](const PreparedProof& p) {
    if (digest_of(p.request) != p.digest) return false;
    std::set<uint32_t> ps;
    for (const auto& sp : p.prepares) {
      if (!verify_signed(sp) || sp.signer.role != Role::kShimNode) continue;
      if (sp.payload.view != p.view || sp.payload.seq != p.seq ||
          sp.payload.digest != p.digest)
        continue;
      ps.insert(sp.signer.index);
    }
    return ps.size() >= prepareQuorum;
  };

  std::map<uint64_t, const PreparedProof*> best;
  uint64_t maxSeq = base;
  for (const auto& sv : support) {
    for (const auto& p : sv.payload.proofs) {
      if (p.seq <= base || !proof_ok(p)) continue;
      auto [it, fresh] = best.emplace(p.seq, &p);
      if (!fresh && p.view > it->second->view) it->second = &p;
      maxSeq = std::max(maxSeq, p.seq);
    }
  }

  out->clear();
  for (uint64_t s = base + 1; s <= maxSeq; ++s) {
    SeqAssignment a;
    a.seq = s;
    auto it = best.find(s);
    if (it != best.end()) {
      a.digest = it->second->digest;
      a.request = it->second->request;
      a.noop = false;
      a.proof = it->second->prepares;
    } else {
      a.request = Batch{};
      a.digest = digest_of(a.request);
      a.noop = true;
    }
    out->push_back(std::move(a));
  }
  *baseSeq = base;
  return true;
}

void ShimNodeComponent::enter_new_view(
    uint64_t view, uint64_t baseSeq,
    const std::vector<SeqAssignment>& assignments, Context& ctx) {
  view_ = view;
  inViewChange_ = false;
  ++viewsInstalled_;
  vcVotedFor_ = std::max(vcVotedFor_, view);
  ctx.cancel_timer("vcretry");
  ctx.trace(NewViewRec{ctx.now(), id(), view});
  vcVotes_.erase(vcVotes_.begin(), vcVotes_.upper_bound(view));
  if (baseSeq > stableSeq_) stableSeq_ = baseSeq;
  for (auto it = slots_.begin(); it != slots_.end();) {
    if (it->first > stableSeq_ && !it->second.committed) {
      ctx.cancel_timer(prog_key(it->first));
      it = slots_.erase(it);
    } else {
      ++it;
    }
  }
  uint64_t maxAssigned = baseSeq;
  for (const auto& a : assignments) {
    maxAssigned = std::max(maxAssigned, a.seq);
    if (committed_.count(a.seq)) continue;
    accept_proposal(a.seq, view, a.digest, a.request, ctx);
  }
  nextSeq_ = std::max(nextSeq_, maxAssigned + 1);
  if (is_primary()) {
    if (ctx.config().mode == RunMode::kServerlessBft) {
      if (ctx.config().conflictMode == ConflictMode::kKnownRw) {
        plan_admit(ctx);
      } else {
        for (uint64_t seq : needsRespawn_)
          if (!seq_resolved(seq)) spawn_slot(seq, ctx);
      }
    }
    try_form_batches(ctx, false);
  }
}

// ---------------------------------------------------------------------------
// Verifier dialogue

void ShimNodeComponent::on_error(const Envelope& env, Context& ctx) {
  if (env.signer != verifier_) return;
  const auto& eb = env.payload.as<ErrorBody>();
  if (eb.kmax > 0 && eb.kmax - 1 > resolvedThrough_)
    resolvedThrough_ = eb.kmax - 1;
  if (eb.kind == ErrorKind::kMissingBelow) {
    ctx.set_timer(rt_seq_key(eb.kmax), ctx.config().errorRetryTimeout);
    needsRespawn_.insert(eb.kmax);
    if (is_primary() && ctx.config().mode == RunMode::kServerlessBft) {
      if (ctx.config().conflictMode == ConflictMode::kKnownRw)
        plan_admit(ctx);
      else
        spawn_slot(eb.kmax, ctx);
    }
    return;
  }
  if (!eb.txn) return;
  if (!verify_signed(*eb.txn) || eb.txn->signer.role != Role::kClient) return;
  Digest td = digest_of(eb.txn->payload);
  ctx.set_timer(rt_txn_key(td), ctx.config().errorRetryTimeout);
  auto it = txnSlot_.find(td);
  if (it != txnSlot_.end()) {
    needsRespawn_.insert(it->second);
    if (is_primary() && ctx.config().mode == RunMode::kServerlessBft) {
      if (ctx.config().conflictMode == ConflictMode::kKnownRw)
        plan_admit(ctx);
      else
        spawn_slot(it->second, ctx);
    }
    return;
  }
  admit_pending(*eb.txn, ctx);
}

void ShimNodeComponent::on_ack(const Envelope& env, Context& ctx) {
  if (env.signer != verifier_) return;
  const auto& ack = env.payload.as<AckBody>();
  if (ack.kmax > resolvedThrough_) resolvedThrough_ = ack.kmax;
  if (ack.kind == ErrorKind::kMissingBelow) {
    ctx.cancel_timer(rt_seq_key(ack.kmax));
    needsRespawn_.erase(ack.kmax);
  } else {
    ctx.cancel_timer(rt_txn_key(ack.reqDigest));
  }
}

void ShimNodeComponent::on_replace(const Envelope& env, Context& ctx) {
  if (env.signer != verifier_) return;
  const auto& rb = env.payload.as<ReplaceBody>();
  Digest td = digest_of(rb.txn.payload);
  auto it = txnSlot_.find(td);
  if (it != txnSlot_.end()) needsRespawn_.insert(it->second);
  if (replaceHandledView_.insert(view_).second)
    start_view_change(view_ + 1, ctx);
}

void ShimNodeComponent::on_resolution(const Envelope& env, Context& ctx) {
  if (env.signer != verifier_) return;
  uint64_t seq = 0;
  if (env.payload.is<ResponseBody>()) {
    seq = env.payload.as<ResponseBody>().seq;
  } else {
    seq = env.payload.as<AbortBody>().seq;
  }
  resolvedSeqs_.insert(seq);
  if (seq > resolvedThrough_) resolvedThrough_ = seq;
  needsRespawn_.erase(seq);
  ctx.cancel_timer(rt_seq_key(seq));
  auto sit = slots_.find(seq);
  if (sit != slots_.end()) {
    if (sit->second.requestKnown)
      for (const auto& t : sit->second.request.txns)
        ctx.cancel_timer(rt_txn_key(digest_of(t.payload)));
    if (seq <= stableSeq_) slots_.erase(sit);
  }
  if (ctx.config().conflictMode == ConflictMode::kKnownRw)
    plan_resolved(seq, ctx);
}

}  // namespace sbft
