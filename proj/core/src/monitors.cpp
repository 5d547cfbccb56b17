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

#include "sbft/monitors.hpp"

#include <fmt/format.h>

namespace sbft {

void MonitorFindings::flag(std::string what) {
  ok = false;
  ++violationCount;
  if (violations.size() < 24) violations.push_back(std::move(what));
}

std::string MonitorFindings::summary() const {
  if (ok) return "ok";
  std::string out = fmt::format("{} violation(s)", violationCount);
  for (const auto& v : violations) out += "\n  " + v;
  return out;
}

template <typename T>
void WireAuditor::check_issued(const Signed<T>& s, const char* what,
                               SimTime now) {
  if (!s.valid) return;
  if (!audit_ || audit_->was_issued(s.signer, s.integrity)) return;
  if (violations_.size() < 24) {
    violations_.push_back(fmt::format(
        "t={} {} from {} claims a signature the log never issued", now, what,
        s.signer.str()));
  }
}

void WireAuditor::observe(const Envelope& env, const Identity& to,
                          SimTime now) {
  (void)to;
  ++seen_;
  check_issued(env, "envelope", now);
  const Message& m = env.payload;
  switch (m.kind()) {
    case MessageKind::kPreprepare: {
      const auto& pp = m.as<PreprepareBody>();
      if (env.valid && digest_of(env.payload) == env.integrity) {
        auto key = std::make_tuple(env.signer, pp.view, pp.seq);
        auto ins = proposals_.emplace(key, pp.digest);
        if (!ins.second && ins.first->second != pp.digest) ++equivocations_;
      }
      return;
    }
    case MessageKind::kPrepare:
      check_issued(m.as<Signed<PrepareBody>>(), "prepare", now);
      return;
    case MessageKind::kCommit:
      check_issued(m.as<Signed<CommitBody>>(), "commit", now);
      return;
    case MessageKind::kExecute: {
      const auto& eb = m.as<ExecuteBody>();
      for (const auto& a : eb.cert.attestations)
        check_issued(a, "cert attestation", now);
      check_issued(eb.commit, "spawner commit", now);
      return;
    }
    case MessageKind::kVerify: {
      const auto& vb = m.as<VerifyBody>();
      for (const auto& a : vb.cert.attestations)
        check_issued(a, "cert attestation", now);
      check_issued(vb.commit, "spawner commit", now);
      return;
    }
    case MessageKind::kViewChange: {
      const auto& vc = m.as<Signed<ViewChangeBody>>();
      check_issued(vc, "view change vote", now);
      for (const auto& p : vc.payload.proofs)
        for (const auto& pr : p.prepares)
          check_issued(pr, "proof prepare", now);
      return;
    }
    case MessageKind::kNewView: {
      const auto& nv = m.as<NewViewBody>();
      for (const auto& vote : nv.support) {
        check_issued(vote, "support vote", now);
        for (const auto& p : vote.payload.proofs)
          for (const auto& pr : p.prepares)
            check_issued(pr, "support proof prepare", now);
      }
      for (const auto& a : nv.assignments)
        for (const auto& pr : a.proof)
          check_issued(pr, "assignment prepare", now);
      return;
    }
    case MessageKind::kCheckpoint: {
      for (const auto& cert : m.as<CheckpointBody>().certs)
        for (const auto& a : cert.attestations)
          check_issued(a, "checkpoint attestation", now);
      return;
    }
    default:
      return;
  }
}

MonitorFindings check_invariants(const std::vector<TraceRecord>& trace,
                                 const Config& cfg) {
  (void)cfg;
  MonitorFindings f;
  uint64_t prevApply = 0;
  std::set<uint64_t> appliedSeqs;
  std::set<uint64_t> abortedSeqs;
  std::map<std::pair<uint32_t, uint64_t>, uint64_t> decisions;
  std::map<uint64_t, Digest> checkpointCoverage;
  for (const TraceRecord& rec : trace) {
    if (const auto* c = std::get_if<CommitRec>(&rec)) {
      auto ins = f.committedDigestBySeq.emplace(c->seq, c->digest);
      if (!ins.second && ins.first->second != c->digest) {
        f.flag(fmt::format(
            "commit disagreement at seq {}: {} committed {}, earlier {}",
            c->seq, c->node.str(), c->digest.short_hex(),
            ins.first->second.short_hex()));
      }
    } else if (const auto* a = std::get_if<ApplyRec>(&rec)) {
      ++f.applyCount;
      if (a->seq <= prevApply) {
        f.flag(fmt::format("apply order broken: seq {} after {}", a->seq,
                           prevApply));
      }
      // Gaps are fine only where an abort consumed the height.
      for (uint64_t missing = prevApply + 1; missing < a->seq; ++missing) {
        if (!abortedSeqs.count(missing)) {
          f.flag(fmt::format("seq {} skipped without an abort (applying {})",
                             missing, a->seq));
          break;
        }
      }
      prevApply = a->seq;
      if (!appliedSeqs.insert(a->seq).second) {
        f.flag(fmt::format("seq {} applied twice", a->seq));
      }
      if (abortedSeqs.count(a->seq)) {
        f.flag(fmt::format("seq {} applied after aborting", a->seq));
      }
    } else if (const auto* ab = std::get_if<AbortRec>(&rec)) {
      ++f.abortCount;
      abortedSeqs.insert(ab->seq);
      if (appliedSeqs.count(ab->seq)) {
        f.flag(fmt::format("seq {} aborted after applying", ab->seq));
      }
    } else if (const auto* v = std::get_if<VcVoteRec>(&rec)) {
      f.vcVotesByView[v->targetView].insert(v->node.index);
    } else if (const auto* nv = std::get_if<NewViewRec>(&rec)) {
      ++f.newViewCount;
      uint64_t& cur = f.viewInstalledByNode[nv->node.index];
      if (nv->view <= cur && cur != 0) {
        f.flag(fmt::format("{} installed view {} after {}", nv->node.str(),
                           nv->view, cur));
      }
      cur = nv->view;
      f.maxViewInstalled = std::max(f.maxViewInstalled, nv->view);
    } else if (const auto* cp = std::get_if<CheckpointRec>(&rec)) {
      uint64_t& cur = f.stableSeqByNode[cp->node.index];
      cur = std::max(cur, cp->stableSeq);
      auto ins = checkpointCoverage.emplace(cp->stableSeq, cp->coverage);
      if (!ins.second && ins.first->second != cp->coverage) {
        f.flag(fmt::format(
            "checkpoint coverage disagreement at stable seq {}",
            cp->stableSeq));
      }
    } else if (const auto* d = std::get_if<ClientDoneRec>(&rec)) {
      auto key = std::make_pair(d->client, d->nonce);
      auto ins = decisions.emplace(key, d->value);
      if (!ins.second) {
        f.flag(fmt::format("transaction c{}:{} decided twice", d->client,
                           d->nonce));
      }
    }
  }
  return f;
}

void cross_check_clients(const std::vector<TraceRecord>& trace,
                         const OracleReport& oracle, MonitorFindings& f) {
  for (const TraceRecord& rec : trace) {
    const auto* d = std::get_if<ClientDoneRec>(&rec);
    if (!d) continue;
    auto it = oracle.outputs.find({d->client, d->nonce});
    if (d->aborted) {
      if (it != oracle.outputs.end()) {
        f.flag(fmt::format(
            "transaction c{}:{} reported aborted but its batch applied",
            d->client, d->nonce));
      }
      continue;
    }
    if (it == oracle.outputs.end()) {
      f.flag(fmt::format(
          "transaction c{}:{} reported committed but never applied",
          d->client, d->nonce));
    } else if (it->second != d->value) {
      f.flag(fmt::format(
          "transaction c{}:{} returned {:#x}, replay says {:#x}", d->client,
          d->nonce, d->value, it->second));
    }
  }
}

}  // namespace sbft
