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

#include "sbft/baselines.hpp"

#include <utility>

#include "sbft/trace.hpp"

namespace sbft {
namespace {

constexpr const char* kFlushTimer = "flush";

ExecuteBody placeholder_execute(uint64_t seq, const Batch& request,
                                const Digest& digest) {
  ExecuteBody body;
  body.request = request;
  body.cert.view = 0;
  body.cert.seq = seq;
  body.cert.digest = digest;
  body.digest = digest;
  return body;
}

}  // namespace

// ---------------------------------------------------------------- gateway

GatewayComponent::GatewayComponent(Identity verifier)
    : verifier_(verifier) {}

void GatewayComponent::admit(const Signed<Transaction>& txn, Context& ctx) {
  if (!verify_signed(txn) || txn.signer.role != Role::kClient) return;
  Digest td = digest_of(txn.payload);
  auto slot = txnSlot_.find(td);
  if (slot != txnSlot_.end()) {
    // Retransmission of an already launched transaction. Relaunch unless
    // the verifier already settled it; a lost executor burst is the only
    // way the first launch can fail in this baseline.
    if (!resolvedSeqs_.count(slot->second)) launch(slot->second, ctx);
    return;
  }
  if (pendingSet_.count(td) || orderedTxns_.count(td)) return;
  pending_.push_back(txn);
  pendingSet_.insert(td);
  form_batches(ctx, false);
  if (!pending_.empty() && !ctx.timer_active(kFlushTimer)) {
    ctx.set_timer(kFlushTimer, ctx.config().batchFlushTimeout);
  }
}

void GatewayComponent::form_batches(Context& ctx, bool flush) {
  const Config& cfg = ctx.config();
  while (!pending_.empty() &&
         orderedTxns_.count(digest_of(pending_.front().payload))) {
    pendingSet_.erase(digest_of(pending_.front().payload));
    pending_.pop_front();
  }
  while (pending_.size() >= cfg.batchSize ||
         (flush && !pending_.empty())) {
    Batch batch;
    uint32_t take = static_cast<uint32_t>(
        std::min<size_t>(pending_.size(), cfg.batchSize));
    for (uint32_t i = 0; i < take; ++i) {
      Digest td = digest_of(pending_.front().payload);
      batch.txns.push_back(std::move(pending_.front()));
      pending_.pop_front();
      pendingSet_.erase(td);
      orderedTxns_.insert(td);
    }
    uint64_t seq = nextSeq_++;
    Digest d = digest_of(batch);
    for (const auto& t : batch.txns) txnSlot_[digest_of(t.payload)] = seq;
    slots_[seq] = Entry{std::move(batch), d};
    launch(seq, ctx);
    if (flush) break;
  }
}

void GatewayComponent::launch(uint64_t seq, Context& ctx) {
  auto it = slots_.find(seq);
  if (it == slots_.end()) return;
  ExecuteBody body = placeholder_execute(seq, it->second.request,
                                         it->second.digest);
  for (uint32_t i = 0; i < ctx.config().nE; ++i) ctx.spawn_executor(body);
}

void GatewayComponent::on_envelope(const Envelope& env, Context& ctx) {
  const Message& m = env.payload;
  switch (m.kind()) {
    case MessageKind::kClientRequest:
      admit(m.as<ClientRequestBody>().txn, ctx);
      return;
    case MessageKind::kError: {
      if (env.signer != verifier_) return;
      const auto& eb = m.as<ErrorBody>();
      if (eb.kind == ErrorKind::kMissingBelow) {
        if (!resolvedSeqs_.count(eb.kmax)) launch(eb.kmax, ctx);
      } else if (eb.txn) {
        admit(*eb.txn, ctx);
      }
      return;
    }
    case MessageKind::kReplace: {
      if (env.signer != verifier_) return;
      const auto& rb = m.as<ReplaceBody>();
      auto slot = txnSlot_.find(digest_of(rb.txn.payload));
      if (slot != txnSlot_.end()) {
        if (!resolvedSeqs_.count(slot->second)) launch(slot->second, ctx);
      } else {
        admit(rb.txn, ctx);
      }
      return;
    }
    case MessageKind::kResponse: {
      if (env.signer != verifier_) return;
      resolvedSeqs_.insert(m.as<ResponseBody>().seq);
      return;
    }
    case MessageKind::kAbort: {
      if (env.signer != verifier_) return;
      resolvedSeqs_.insert(m.as<AbortBody>().seq);
      return;
    }
    default:
      return;
  }
}

void GatewayComponent::on_timer(const std::string& timerKey, Context& ctx) {
  if (timerKey != kFlushTimer) return;
  form_batches(ctx, true);
  if (!pending_.empty()) {
    ctx.set_timer(kFlushTimer, ctx.config().batchFlushTimeout);
  }
}

// -------------------------------------------------------------- cft node

CftNodeComponent::CftNodeComponent(std::vector<Identity> nodes,
                                   Identity verifier)
    : nodes_(std::move(nodes)), verifier_(verifier) {}

void CftNodeComponent::admit(const Signed<Transaction>& txn, Context& ctx) {
  if (!verify_signed(txn) || txn.signer.role != Role::kClient) return;
  if (!leader()) {
    // Followers relay; the fixed leader is the only ordering point.
    ctx.send(nodes_.front(), Message{ClientRequestBody{txn}});
    return;
  }
  Digest td = digest_of(txn.payload);
  auto slot = txnSlot_.find(td);
  if (slot != txnSlot_.end()) {
    if (slots_[slot->second].committed && !resolvedSeqs_.count(slot->second)) {
      launch(slot->second, ctx);
    }
    return;
  }
  if (pendingSet_.count(td) || orderedTxns_.count(td)) return;
  pending_.push_back(txn);
  pendingSet_.insert(td);
  form_batches(ctx, false);
  if (!pending_.empty() && !ctx.timer_active(kFlushTimer)) {
    ctx.set_timer(kFlushTimer, ctx.config().batchFlushTimeout);
  }
}

void CftNodeComponent::form_batches(Context& ctx, bool flush) {
  const Config& cfg = ctx.config();
  while (!pending_.empty() &&
         orderedTxns_.count(digest_of(pending_.front().payload))) {
    pendingSet_.erase(digest_of(pending_.front().payload));
    pending_.pop_front();
  }
  while (pending_.size() >= cfg.batchSize ||
         (flush && !pending_.empty())) {
    Batch batch;
    uint32_t take = static_cast<uint32_t>(
        std::min<size_t>(pending_.size(), cfg.batchSize));
    for (uint32_t i = 0; i < take; ++i) {
      Digest td = digest_of(pending_.front().payload);
      batch.txns.push_back(std::move(pending_.front()));
      pending_.pop_front();
      pendingSet_.erase(td);
      orderedTxns_.insert(td);
    }
    uint64_t seq = nextSeq_++;
    Digest d = digest_of(batch);
    for (const auto& t : batch.txns) txnSlot_[digest_of(t.payload)] = seq;
    Slot& s = slots_[seq];
    s.request = batch;
    s.digest = d;
    s.acks.insert(id().index);
    for (const auto& n : nodes_) {
      if (n == id()) continue;
      ctx.send(n, Message{CftAcceptBody{seq, d, batch}});
    }
    check_commit(seq, ctx);
    if (flush) break;
  }
}

void CftNodeComponent::launch(uint64_t seq, Context& ctx) {
  auto it = slots_.find(seq);
  if (it == slots_.end() || !it->second.committed) return;
  ExecuteBody body = placeholder_execute(seq, it->second.request,
                                         it->second.digest);
  for (uint32_t i = 0; i < ctx.config().nE; ++i) ctx.spawn_executor(body);
}

void CftNodeComponent::check_commit(uint64_t seq, Context& ctx) {
  auto it = slots_.find(seq);
  if (it == slots_.end()) return;
  Slot& s = it->second;
  if (s.committed || s.acks.size() < ctx.config().cft_quorum()) return;
  s.committed = true;
  ++committedCount_;
  ctx.trace(TraceRecord{CommitRec{ctx.now(), id(), 0, seq, s.digest}});
  launch(seq, ctx);
}

void CftNodeComponent::on_envelope(const Envelope& env, Context& ctx) {
  const Message& m = env.payload;
  switch (m.kind()) {
    case MessageKind::kClientRequest:
      admit(m.as<ClientRequestBody>().txn, ctx);
      return;
    case MessageKind::kCftAccept: {
      if (leader()) return;
      if (env.signer != nodes_.front()) return;
      const auto& ab = m.as<CftAcceptBody>();
      if (digest_of(ab.request) != ab.digest) return;
      auto ins = accepted_.emplace(ab.seq, ab.digest);
      if (!ins.second && ins.first->second != ab.digest) return;
      ctx.send(nodes_.front(), Message{CftAckBody{ab.seq, ab.digest}});
      return;
    }
    case MessageKind::kCftAck: {
      if (!leader()) return;
      if (env.signer.role != Role::kShimNode) return;
      const auto& ab = m.as<CftAckBody>();
      auto it = slots_.find(ab.seq);
      if (it == slots_.end() || it->second.digest != ab.digest) return;
      it->second.acks.insert(env.signer.index);
      check_commit(ab.seq, ctx);
      return;
    }
    case MessageKind::kError: {
      if (!leader() || env.signer != verifier_) return;
      const auto& eb = m.as<ErrorBody>();
      if (eb.kind == ErrorKind::kMissingBelow) {
        if (!resolvedSeqs_.count(eb.kmax)) launch(eb.kmax, ctx);
      } else if (eb.txn) {
        admit(*eb.txn, ctx);
      }
      return;
    }
    case MessageKind::kReplace: {
      if (!leader() || env.signer != verifier_) return;
      const auto& rb = m.as<ReplaceBody>();
      auto slot = txnSlot_.find(digest_of(rb.txn.payload));
      if (slot != txnSlot_.end()) {
        if (!resolvedSeqs_.count(slot->second)) launch(slot->second, ctx);
      } else {
        admit(rb.txn, ctx);
      }
      return;
    }
    case MessageKind::kResponse: {
      if (env.signer != verifier_) return;
      resolvedSeqs_.insert(m.as<ResponseBody>().seq);
      return;
    }
    case MessageKind::kAbort: {
      if (env.signer != verifier_) return;
      resolvedSeqs_.insert(m.as<AbortBody>().seq);
      return;
    }
    default:
      return;
  }
}

void CftNodeComponent::on_timer(const std::string& timerKey, Context& ctx) {
  if (timerKey != kFlushTimer) return;
  if (!leader()) return;
  form_batches(ctx, true);
  if (!pending_.empty()) {
    ctx.set_timer(kFlushTimer, ctx.config().batchFlushTimeout);
  }
}

}  // namespace sbft
