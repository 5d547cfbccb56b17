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

#include "sbft/client.hpp"

namespace sbft {

namespace {

Digest outputs_digest(const std::vector<TxnOutput>& outs) {
  ByteWriter w;
  w.seq(outs);
  return digest_bytes(w.data());
}

}  // namespace

ClientComponent::ClientComponent(std::vector<Identity> nodes,
                                 Identity verifier, Identity gateway,
                                 WorkloadGen* gen, Metrics* metrics,
                                 uint64_t txnLimit, SimTime issueCutoff)
    : nodes_(std::move(nodes)),
      verifier_(verifier),
      gateway_(gateway),
      gen_(gen),
      metrics_(metrics),
      txnLimit_(txnLimit),
      issueCutoff_(issueCutoff) {}

void ClientComponent::preload(std::vector<Transaction> txns) {
  preloaded_ = std::move(txns);
  preloadNext_ = 0;
}

void ClientComponent::on_start(Context& ctx) { issue_next(ctx); }

void ClientComponent::issue_next(Context& ctx) {
  if (inflight_) return;
  if (txnLimit_ > 0 && issued_ >= txnLimit_) return;
  if (issueCutoff_ > 0 && ctx.now() >= issueCutoff_) return;
  Transaction t;
  if (!preloaded_.empty()) {
    if (preloadNext_ >= preloaded_.size()) return;
    t = preloaded_[preloadNext_++];
  } else {
    if (gen_ == nullptr) return;
    t = gen_->next(id().index);
  }
  inflight_ = ctx.key().sign(t, SigScheme::kDs);
  inflightDigest_ = digest_of(t);
  issuedAt_ = ctx.now();
  ++issued_;
  matchVotes_.clear();
  if (metrics_) metrics_->txn_issued(t.client, t.nonce, ctx.now());
  submit_first(ctx);
}

void ClientComponent::submit_first(Context& ctx) {
  const Config& cfg = ctx.config();
  Identity target;
  switch (cfg.mode) {
    case RunMode::kNoShim:
      target = gateway_;
      break;
    case RunMode::kServerlessCft:
      target = nodes_.front();
      break;
    default:
      target = nodes_[believedView_ % nodes_.size()];
      break;
  }
  ctx.send(target, Message{ClientRequestBody{*inflight_}});
  backoff_ = cfg.clientRetryTimeout;
  ctx.set_timer("retry", backoff_);
}

void ClientComponent::resubmit(Context& ctx) {
  if (!inflight_) return;
  if (ctx.config().mode == RunMode::kShimLocal) {
    for (const auto& n : nodes_)
      ctx.send(n, Message{ClientRequestBody{*inflight_}});
  } else {
    ctx.send(verifier_, Message{ClientRequestBody{*inflight_}});
  }
  backoff_ *= 2;
  ctx.set_timer("retry", backoff_);
}

void ClientComponent::on_timer(const std::string& timerKey, Context& ctx) {
  if (timerKey == "retry") resubmit(ctx);
}

void ClientComponent::on_envelope(const Envelope& env, Context& ctx) {
  if (!verify_signed(env)) return;
  if (!inflight_) return;
  const Config& cfg = ctx.config();
  const Transaction& cur = inflight_->payload;

  if (env.payload.is<ResponseBody>()) {
    const auto& rb = env.payload.as<ResponseBody>();
    const TxnOutput* mine = nullptr;
    for (const auto& o : rb.outputs)
      if (o.client == cur.client && o.nonce == cur.nonce) mine = &o;
    if (mine == nullptr) return;
    if (cfg.mode == RunMode::kShimLocal) {
      if (env.signer.role != Role::kShimNode) return;
      believedView_ = std::max(believedView_, rb.view);
      auto key = std::make_tuple(rb.seq, rb.digest, outputs_digest(rb.outputs));
      auto& votes = matchVotes_[key];
      votes.insert(env.signer.index);
      if (votes.size() < cfg.fR + 1) return;
      finish(false, mine->value, ctx);
      return;
    }
    if (env.signer != verifier_) return;
    believedView_ = std::max(believedView_, rb.view);
    finish(false, mine->value, ctx);
    return;
  }

  if (env.payload.is<AbortBody>()) {
    if (env.signer != verifier_) return;
    const auto& ab = env.payload.as<AbortBody>();
    if (digest_of(ab.txn.payload) != inflightDigest_) return;
    finish(true, 0, ctx);
    return;
  }
}

void ClientComponent::finish(bool wasAborted, uint64_t value, Context& ctx) {
  const Transaction& cur = inflight_->payload;
  if (metrics_) {
    if (wasAborted)
      metrics_->txn_aborted(cur.client, cur.nonce, ctx.now());
    else
      metrics_->txn_committed(cur.client, cur.nonce, ctx.now());
  }
  ctx.trace(
      ClientDoneRec{ctx.now(), cur.client, cur.nonce, value, wasAborted});
  if (wasAborted)
    ++aborted_;
  else
    ++completed_;
  if (!wasAborted) outputsSeen_.push_back(value);
  inflight_.reset();
  matchVotes_.clear();
  ctx.cancel_timer("retry");
  issue_next(ctx);
}

}  // namespace sbft
