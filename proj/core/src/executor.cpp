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

#include "sbft/executor.hpp"

namespace sbft {

ExecutorComponent::ExecutorComponent(const Storage* storage, Identity verifier,
                                     const ProcessingModel& proc,
                                     LinkSpec storageLink, ExecutorFault fault,
                                     uint32_t ordinal, bool requireCert)
    : storage_(storage),
      verifier_(verifier),
      proc_(proc),
      storageLink_(storageLink),
      fault_(fault),
      ordinal_(ordinal),
      requireCert_(requireCert) {}

SimTime ExecutorComponent::fetch_delay(const Transaction& t) const {
  auto reads = t.read_keys();
  return 2 * storageLink_.base + proc_.storageFetchBase +
         static_cast<SimTime>(reads.size()) * proc_.storagePerKey;
}

SimTime ExecutorComponent::compute_delay(const Transaction& t) const {
  return proc_.execPerTxn +
         static_cast<SimTime>(t.ops.size()) * proc_.execPerOp;
}

void ExecutorComponent::on_envelope(const Envelope& env, Context& ctx) {
  if (env.payload.kind() != MessageKind::kExecute) return;
  if (!verify_signed(env)) return;
  const auto& body = env.payload.as<ExecuteBody>();
  if (requireCert_) {
    if (!certificate_valid(body.cert, ctx.config().commit_quorum())) return;
    if (body.cert.digest != body.digest) return;
    if (body.commit.payload.digest != body.digest ||
        !verify_signed(body.commit))
      return;
  }
  if (running_) return;  // one job per worker
  running_ = true;
  body_ = body;
  spawner_ = env.signer;
  txnIdx_ = 0;
  if (fault_ == ExecutorFault::kSilent) return;
  if (body_.request.txns.empty()) {
    finish(ctx);
    return;
  }
  // Cold-start stagger plus the first fetch round trip.
  SimTime delay = static_cast<SimTime>(ordinal_) * proc_.executorStagger +
                  fetch_delay(body_.request.txns[0].payload);
  ctx.charge_busy(delay);
  ctx.schedule_step(delay, 0);
}

void ExecutorComponent::run_txn(const Transaction& t) {
  uint64_t acc = txn_seed(t);
  for (const auto& op : t.ops) {
    if (op.kind == OpKind::kRead) {
      auto bufIt = buffer_.find(op.key);
      Value v;
      if (bufIt != buffer_.end()) {
        // Own-batch write: no storage dependency to validate.
        v = bufIt->second;
      } else if (fault_ == ExecutorFault::kStaleRead) {
        v = initial_value(storage_->seed(), op.key);
        rw_.add_read(op.key, 0);
      } else {
        auto [val, ver] = storage_->read(op.key);
        v = val;
        rw_.add_read(op.key, ver);
      }
      acc = mix64(acc, v);
    } else {
      Value nv = mix64(acc, op.arg);
      buffer_[op.key] = nv;
      rw_.add_write(op.key);
      acc = mix64(acc, nv);
    }
  }
  outputs_.push_back(TxnOutput{t.client, t.nonce, acc});
}

void ExecutorComponent::on_step(uint64_t token, Context& ctx) {
  if (!running_ || token != txnIdx_) return;
  const Transaction& t = body_.request.txns[txnIdx_].payload;
  run_txn(t);
  ++txnIdx_;
  if (txnIdx_ < body_.request.txns.size()) {
    SimTime delay = compute_delay(t) +
                    fetch_delay(body_.request.txns[txnIdx_].payload);
    ctx.charge_busy(delay);
    ctx.schedule_step(delay, txnIdx_);
  } else {
    SimTime delay = compute_delay(t);
    ctx.charge_busy(delay);
    finish(ctx);
  }
}

void ExecutorComponent::finish(Context& ctx) {
  ExecResult result;
  result.writes = buffer_;
  result.outputs = outputs_;
  if (fault_ == ExecutorFault::kWrongResult) {
    for (auto& [k, v] : result.writes) {
      (void)k;
      v ^= 0x00DEAD00ULL;
    }
    for (auto& o : result.outputs) o.value ^= 0x00DEAD00ULL;
  }
  VerifyBody vb;
  vb.request = body_.request;
  vb.cert = body_.cert;
  vb.commit = body_.commit;
  vb.rw = rw_;
  vb.result = std::move(result);
  vb.spawner = spawner_;
  uint32_t copies = fault_ == ExecutorFault::kDuplicateReport ? 3 : 1;
  for (uint32_t i = 0; i < copies; ++i)
    ctx.send(verifier_, Message{vb});
}

}  // namespace sbft
