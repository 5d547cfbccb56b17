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

#include "sbft/verifier.hpp"

#include <fmt/format.h>

namespace sbft {

namespace {

Digest class_digest(const RwSet& rw, const ExecResult& result) {
  ByteWriter w;
  rw.encode(w);
  result.encode(w);
  return digest_bytes(w.data());
}

Digest txn_digest(const Signed<Transaction>& t) { return digest_of(t.payload); }

}  // namespace

VerifierComponent::VerifierComponent(Storage* storage,
                                     std::vector<Identity> shimNodes,
                                     bool requireCert, SimTime abortTimerFixed,
                                     SimTime abortTimerPerTxn,
                                     uint32_t floodCap)
    : storage_(storage),
      shimNodes_(std::move(shimNodes)),
      requireCert_(requireCert),
      abortTimerFixed_(abortTimerFixed),
      abortTimerPerTxn_(abortTimerPerTxn),
      floodCap_(floodCap) {}

std::string VerifierComponent::timer_key(const Digest& d) const {
  return "abort:" + d.short_hex();
}

void VerifierComponent::broadcast_nodes(Context& ctx, const Message& msg) {
  for (const auto& n : shimNodes_) ctx.send(n, msg);
}

void VerifierComponent::on_envelope(const Envelope& env, Context& ctx) {
  switch (env.payload.kind()) {
    case MessageKind::kVerify:
      on_verify(env, ctx);
      break;
    case MessageKind::kClientRequest:
      on_resubmit(env, ctx);
      break;
    default:
      break;
  }
}

void VerifierComponent::on_verify(const Envelope& env, Context& ctx) {
  if (!verify_signed(env) || env.signer.role != Role::kExecutor) return;
  const auto& vb = env.payload.as<VerifyBody>();
  const Digest batchDigest = vb.cert.digest;
  if (digest_of(vb.request) != batchDigest) return;
  if (requireCert_) {
    if (!certificate_valid(vb.cert, ctx.config().commit_quorum())) return;
    if (!verify_signed(vb.commit) || vb.commit.payload.digest != batchDigest ||
        vb.commit.payload.seq != vb.cert.seq)
      return;
  }

  auto entryIt = entries_.find(batchDigest);
  if (entryIt == entries_.end()) {
    auto seqIt = seqIndex_.find(vb.cert.seq);
    if (seqIt != seqIndex_.end() && seqIt->second != batchDigest) {
      // Two certified batches claiming one slot would mean a forged or
      // split certificate; refuse the newcomer and leave the evidence.
      ctx.trace(NoteRec{ctx.now(), id(),
                        fmt::format("conflicting certificate for seq {}",
                                    vb.cert.seq)});
      return;
    }
    Entry e;
    e.seq = vb.cert.seq;
    e.request = vb.request;
    e.cert = vb.cert;
    entryIt = entries_.emplace(batchDigest, std::move(e)).first;
    seqIndex_[vb.cert.seq] = batchDigest;
    for (const auto& t : vb.request.txns)
      txnToBatch_[txn_digest(t)] = batchDigest;
    if (ctx.config().conflictMode == ConflictMode::kUnknownRw) {
      // Only this mode can honestly diverge, so only here does silence
      // need a deadline.
      SimTime wait =
          abortTimerFixed_ +
          abortTimerPerTxn_ * static_cast<SimTime>(vb.request.txns.size());
      ctx.set_timer(timer_key(batchDigest), wait);
    }
  }
  Entry& e = entryIt->second;

  if (e.decided) {
    if (e.spawners.insert(vb.spawner).second) {
      // A spawner surfacing only now still needs the outcome, otherwise
      // its lock bookkeeping never drains.
      if (e.abortedOutcome) {
        AbortBody ab;
        if (!e.request.txns.empty()) ab.txn = e.request.txns.front();
        ab.seq = e.seq;
        ab.batchDigest = e.cert.digest;
        ctx.send(vb.spawner, Message{ab});
      } else {
        ResponseBody rb;
        rb.view = e.cert.view;
        rb.seq = e.seq;
        rb.digest = e.cert.digest;
        rb.outputs = e.classes.at(e.matchedClass).result.outputs;
        ctx.send(vb.spawner, Message{rb});
      }
    }
    ctx.count_flood_drop(env.signer, MessageKind::kVerify);
    return;
  }
  if (e.matched || e.abortTagged) {
    e.spawners.insert(vb.spawner);
    ctx.count_flood_drop(env.signer, MessageKind::kVerify);
    return;
  }
  if (e.reporters.size() >= floodCap_) {
    ctx.count_flood_drop(env.signer, MessageKind::kVerify);
    return;
  }
  if (!e.reporters.insert(env.signer).second) {
    ctx.count_flood_drop(env.signer, MessageKind::kVerify);
    return;
  }
  e.spawners.insert(vb.spawner);

  Digest cls = class_digest(vb.rw, vb.result);
  auto clsIt = e.classes.find(cls);
  if (clsIt == e.classes.end()) {
    clsIt = e.classes.emplace(cls, ResultClass{vb.rw, vb.result, {}}).first;
    e.classOrder.push_back(cls);
  }
  clsIt->second.senders.insert(env.signer);
  uint64_t clsOrdinal = 0;
  for (size_t i = 0; i < e.classOrder.size(); ++i)
    if (e.classOrder[i] == cls) clsOrdinal = i;
  ctx.trace(VerifierObsRec{ctx.now(), batchDigest, VerifierEvent::kReport,
                           clsOrdinal});

  const Config& cfg = ctx.config();
  if (!e.matched && clsIt->second.senders.size() >= cfg.match_quorum()) {
    e.matched = true;
    e.matchedClass = cls;
    ctx.cancel_timer(timer_key(batchDigest));
    ctx.trace(VerifierObsRec{ctx.now(), batchDigest, VerifierEvent::kMatched,
                             clsOrdinal});
    if (e.seq != kmax_)
      ctx.trace(VerifierObsRec{ctx.now(), batchDigest, VerifierEvent::kParked,
                               e.seq});
    try_advance(ctx);
    return;
  }
  if (!e.matched && e.reporters.size() >= cfg.nE) {
    // Every executor of the pool reported and nothing matched: divergence.
    ctx.cancel_timer(timer_key(batchDigest));
    ctx.trace(VerifierObsRec{ctx.now(), batchDigest,
                             VerifierEvent::kDivergenceAborted,
                             e.reporters.size()});
    e.abortTagged = true;
    if (e.seq != kmax_)
      ctx.trace(VerifierObsRec{ctx.now(), batchDigest, VerifierEvent::kParked,
                               e.seq});
    try_advance(ctx);
  }
}

void VerifierComponent::on_timer(const std::string& timerKey, Context& ctx) {
  Digest target;
  Entry* e = nullptr;
  for (auto& [d, entry] : entries_) {
    if (timer_key(d) == timerKey) {
      target = d;
      e = &entry;
      break;
    }
  }
  if (!e || e->matched || e->decided || e->abortTagged) return;

  const Config& cfg = ctx.config();
  ctx.trace(VerifierObsRec{ctx.now(), target, VerifierEvent::kTimerExpired,
                           e->reporters.size()});
  if (e->reporters.size() < cfg.verify_quorum()) {
    // Too few reports to separate executor faults from a primary that
    // spawned short; conservatively demand a new primary.
    ReplaceBody rb;
    if (!e->request.txns.empty()) rb.txn = e->request.txns.front();
    broadcast_nodes(ctx, Message{rb});
    ctx.trace(VerifierObsRec{ctx.now(), target, VerifierEvent::kReplaceSent,
                             e->reporters.size()});
    return;
  }
  // A verify quorum reported yet nothing matched: honest executors saw
  // different states, abort the batch.
  ctx.trace(VerifierObsRec{ctx.now(), target,
                           VerifierEvent::kDivergenceAborted,
                           e->reporters.size()});
  e->abortTagged = true;
  if (e->seq != kmax_)
    ctx.trace(
        VerifierObsRec{ctx.now(), target, VerifierEvent::kParked, e->seq});
  try_advance(ctx);
}

void VerifierComponent::try_advance(Context& ctx) {
  for (;;) {
    auto seqIt = seqIndex_.find(kmax_);
    if (seqIt == seqIndex_.end()) return;
    auto entryIt = entries_.find(seqIt->second);
    if (entryIt == entries_.end()) return;
    Entry& e = entryIt->second;
    if (e.decided) return;
    if (e.abortTagged) {
      decide_abort(e, 1, ctx);
    } else if (e.matched) {
      const ResultClass& cls = e.classes.at(e.matchedClass);
      bool fresh = true;
      if (ctx.config().conflictMode != ConflictMode::kNonConflicting) {
        for (const auto& [k, ver] : cls.rw.reads) {
          if (storage_->version(k) != ver) {
            fresh = false;
            break;
          }
        }
      }
      if (fresh) {
        decide_apply(e, ctx);
      } else {
        decide_abort(e, 0, ctx);
      }
    } else {
      return;
    }
    kmax_ += 1;
  }
}

void VerifierComponent::decide_apply(Entry& e, Context& ctx) {
  const ResultClass& cls = e.classes.at(e.matchedClass);
  storage_->apply(id(), e.seq, cls.result.writes);
  e.decided = true;
  ++decidedCount_;
  ctx.trace(VerifierObsRec{ctx.now(), e.cert.digest, VerifierEvent::kApplied,
                           e.seq});
  ApplyRec ar;
  ar.time = ctx.now();
  ar.seq = e.seq;
  ar.digest = e.cert.digest;
  for (const auto& t : e.request.txns) ar.txns.push_back(t.payload);
  ar.writes = cls.result.writes;
  ctx.trace(std::move(ar));

  // Group outputs per client; spawners get the full reply.
  std::map<uint32_t, std::vector<TxnOutput>> perClient;
  for (const auto& out : cls.result.outputs)
    perClient[out.client].push_back(out);
  for (const auto& [client, outs] : perClient) {
    ResponseBody rb;
    rb.view = e.cert.view;
    rb.seq = e.seq;
    rb.digest = e.cert.digest;
    rb.outputs = outs;
    ctx.send(client_id(client), Message{rb});
  }
  ResponseBody full;
  full.view = e.cert.view;
  full.seq = e.seq;
  full.digest = e.cert.digest;
  full.outputs = cls.result.outputs;
  // Every node on the spawning side learns the height is settled, not just
  // the ones whose launches happened to arrive; backups need this to retire
  // their copies of the batch.
  broadcast_nodes(ctx, Message{full});

  for (const auto& out : cls.result.outputs) {
    Digest td;
    for (const auto& t : e.request.txns) {
      if (t.payload.client == out.client && t.payload.nonce == out.nonce) {
        td = txn_digest(t);
        break;
      }
    }
    txnOutcomes_[td] =
        TxnOutcome{false, out.value, e.seq, e.cert.view, e.cert.digest};
  }
  post_decision(e, ctx);
}

void VerifierComponent::decide_abort(Entry& e, uint8_t reason, Context& ctx) {
  e.decided = true;
  e.abortedOutcome = true;
  ++decidedCount_;
  ++abortedCount_;
  ctx.trace(VerifierObsRec{ctx.now(), e.cert.digest,
                           reason == 0 ? VerifierEvent::kStaleAborted
                                       : VerifierEvent::kDivergenceAborted,
                           e.seq});
  ctx.trace(AbortRec{ctx.now(), e.seq, e.cert.digest, reason,
                     static_cast<uint32_t>(e.request.txns.size())});
  for (const auto& t : e.request.txns) {
    AbortBody ab;
    ab.txn = t;
    ab.seq = e.seq;
    ab.batchDigest = e.cert.digest;
    ctx.send(client_id(t.payload.client), Message{ab});
    txnOutcomes_[txn_digest(t)] =
        TxnOutcome{true, 0, e.seq, e.cert.view, e.cert.digest};
  }
  AbortBody spawnerNote;
  if (!e.request.txns.empty()) spawnerNote.txn = e.request.txns.front();
  spawnerNote.seq = e.seq;
  spawnerNote.batchDigest = e.cert.digest;
  broadcast_nodes(ctx, Message{spawnerNote});
  post_decision(e, ctx);
}

void VerifierComponent::post_decision(Entry& e, Context& ctx) {
  if (errSeqOutstanding_.erase(e.seq) > 0) {
    AckBody ack;
    ack.kind = ErrorKind::kMissingBelow;
    ack.kmax = e.seq;
    broadcast_nodes(ctx, Message{ack});
  }
  for (const auto& t : e.request.txns) {
    Digest td = txn_digest(t);
    if (errTxnOutstanding_.erase(td) > 0) {
      AckBody ack;
      ack.kind = ErrorKind::kUnknownRequest;
      ack.kmax = e.seq;
      ack.reqDigest = td;
      broadcast_nodes(ctx, Message{ack});
    }
  }
}

void VerifierComponent::on_resubmit(const Envelope& env, Context& ctx) {
  const auto& body = env.payload.as<ClientRequestBody>();
  if (!verify_signed(body.txn)) return;
  if (body.txn.signer.role != Role::kClient) {
    // Admission work was spent, but garbage earns no reply.
    ctx.count_flood_drop(env.signer, MessageKind::kClientRequest);
    return;
  }
  Digest td = txn_digest(body.txn);

  auto outIt = txnOutcomes_.find(td);
  if (outIt != txnOutcomes_.end()) {
    const TxnOutcome& o = outIt->second;
    ctx.trace(VerifierObsRec{ctx.now(), o.batchDigest, VerifierEvent::kResent,
                             o.seq});
    if (o.aborted) {
      AbortBody ab;
      ab.txn = body.txn;
      ab.seq = o.seq;
      ab.batchDigest = o.batchDigest;
      ctx.send(client_id(body.txn.payload.client), Message{ab});
    } else {
      ResponseBody rb;
      rb.view = o.view;
      rb.seq = o.seq;
      rb.digest = o.batchDigest;
      rb.outputs = {
          TxnOutput{body.txn.payload.client, body.txn.payload.nonce, o.value}};
      ctx.send(client_id(body.txn.payload.client), Message{rb});
    }
    return;
  }

  const SimTime cooldown = ctx.config().nodeProgressTimeout;
  auto batchIt = txnToBatch_.find(td);
  if (batchIt == txnToBatch_.end()) {
    // Never saw an executor report carrying this request.
    auto last = errTxnLast_.find(td);
    if (last != errTxnLast_.end() && ctx.now() - last->second < cooldown)
      return;
    errTxnLast_[td] = ctx.now();
    ErrorBody eb;
    eb.kind = ErrorKind::kUnknownRequest;
    eb.kmax = kmax_;
    eb.txn = body.txn;
    broadcast_nodes(ctx, Message{eb});
    errTxnOutstanding_.insert(td);
    ctx.trace(
        VerifierObsRec{ctx.now(), td, VerifierEvent::kErrorSent, kmax_});
    return;
  }
  const Entry& e = entries_.at(batchIt->second);
  if (e.matched || e.abortTagged) {
    // Parked behind a missing earlier sequence number.
    auto last = errSeqLast_.find(kmax_);
    if (last != errSeqLast_.end() && ctx.now() - last->second < cooldown)
      return;
    errSeqLast_[kmax_] = ctx.now();
    ErrorBody eb;
    eb.kind = ErrorKind::kMissingBelow;
    eb.kmax = kmax_;
    broadcast_nodes(ctx, Message{eb});
    errSeqOutstanding_.insert(kmax_);
    ctx.trace(VerifierObsRec{ctx.now(), e.cert.digest,
                             VerifierEvent::kErrorSent, kmax_});
    return;
  }
  // Reports exist but no match quorum: only a misbehaving primary can
  // explain the shortfall from here.
  auto last = replaceLast_.find(e.cert.digest);
  if (last != replaceLast_.end() && ctx.now() - last->second < cooldown)
    return;
  replaceLast_[e.cert.digest] = ctx.now();
  ReplaceBody rb;
  rb.txn = body.txn;
  broadcast_nodes(ctx, Message{rb});
  ctx.trace(VerifierObsRec{ctx.now(), e.cert.digest,
                           VerifierEvent::kReplaceSent, e.reporters.size()});
}

}  // namespace sbft
