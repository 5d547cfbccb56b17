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

#include "sbft/oracle.hpp"

#include <fmt/format.h>

namespace sbft {

ExecResult ReplayOracle::step(uint64_t seq,
                              const std::vector<Transaction>& txns) {
  ExecResult res;
  for (const Transaction& t : txns) {
    uint64_t acc = txn_seed(t);
    for (const Op& op : t.ops) {
      if (op.kind == OpKind::kRead) {
        auto buf = res.writes.find(op.key);
        Value v = buf != res.writes.end() ? buf->second
                                          : store_.read(op.key).first;
        acc = mix64(acc, v);
      } else {
        Value nv = mix64(acc, op.arg);
        res.writes[op.key] = nv;
        acc = mix64(acc, nv);
      }
    }
    res.outputs.push_back(TxnOutput{t.client, t.nonce, acc});
  }
  store_.apply(verifier_id(), seq, res.writes);
  return res;
}

void OracleReport::flag(std::string what) {
  ok = false;
  ++problemCount;
  if (problems.size() < 24) problems.push_back(std::move(what));
}

OracleReport check_trace(const std::vector<TraceRecord>& trace,
                         uint64_t kvSeed, uint64_t keyspaceSize,
                         const Storage* finalState) {
  OracleReport rep;
  ReplayOracle oracle(kvSeed, keyspaceSize);
  uint64_t prevSeq = 0;
  for (const TraceRecord& rec : trace) {
    const ApplyRec* ap = std::get_if<ApplyRec>(&rec);
    if (!ap) continue;
    // Aborted heights leave gaps; the invariant monitor checks that every
    // gap is accounted for. Here only monotonicity matters: replaying in a
    // different order than the run applied would compare garbage.
    if (ap->seq <= prevSeq) {
      rep.flag(fmt::format("apply order broken: seq {} after {}", ap->seq,
                           prevSeq));
    }
    prevSeq = ap->seq;
    ExecResult computed = oracle.step(ap->seq, ap->txns);
    if (computed.writes != ap->writes) {
      rep.flag(fmt::format("write set mismatch at seq {}: recorded {} keys, "
                           "replay produced {}",
                           ap->seq, ap->writes.size(),
                           computed.writes.size()));
    }
    for (const TxnOutput& out : computed.outputs) {
      auto key = std::make_pair(out.client, out.nonce);
      auto ins = rep.outputs.emplace(key, out.value);
      if (!ins.second) {
        rep.flag(fmt::format("transaction c{}:{} applied twice (seq {})",
                             out.client, out.nonce, ap->seq));
      }
    }
    ++rep.batches;
    rep.txns += ap->txns.size();
  }
  rep.finalDigest = oracle.state().state_digest();
  if (finalState) {
    if (finalState->applied_batches() != rep.batches) {
      rep.flag(fmt::format("store applied {} batches, trace records {}",
                           finalState->applied_batches(), rep.batches));
    }
    if (!finalState->same_state(oracle.state())) {
      rep.flag("final store state differs from replay");
    }
  }
  return rep;
}

}  // namespace sbft
