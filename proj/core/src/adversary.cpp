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

#include "sbft/adversary.hpp"

#include <algorithm>

namespace sbft {

ScriptedAdversary::ScriptedAdversary(Config cfg, uint64_t seed,
                                     AuthAudit* audit, Identity verifier,
                                     SimTime abortTimerFixed,
                                     SimTime abortTimerPerTxn)
    : cfg_(std::move(cfg)),
      audit_(audit),
      verifier_(verifier),
      abortTimerFixed_(abortTimerFixed),
      abortTimerPerTxn_(abortTimerPerTxn),
      rng_(seed, "adversary") {}

void ScriptedAdversary::add_attack(uint32_t nodeIndex, AttackSpec spec) {
  nodeAttacks_[nodeIndex].push_back(std::move(spec));
}

void ScriptedAdversary::set_executor_fault(ExecutorFaultSpec spec) {
  execFaults_.push_back(std::move(spec));
}

std::set<uint32_t> ScriptedAdversary::byzantine_nodes() const {
  std::set<uint32_t> out;
  for (const auto& [idx, specs] : nodeAttacks_) {
    (void)specs;
    out.insert(idx);
  }
  return out;
}

SimTime ScriptedAdversary::default_abort_delay(size_t txns) const {
  return abortTimerFixed_ +
         abortTimerPerTxn_ * static_cast<SimTime>(txns) + 10 * kMs;
}

void ScriptedAdversary::transform_outputs(const Identity& source, SimTime now,
                                          ActionBatch& actions) {
  if (source.role != Role::kShimNode) return;
  auto it = nodeAttacks_.find(source.index);
  if (it == nodeAttacks_.end()) return;
  for (const auto& spec : it->second) apply(spec, source, now, actions);
}

void ScriptedAdversary::apply(const AttackSpec& spec, const Identity& source,
                              SimTime now, ActionBatch& actions) {
  switch (spec.kind) {
    case AttackKind::kRequestIgnorance:
      break;  // inbound side only

    case AttackKind::kUnsuccessfulConsensus: {
      uint32_t kept = 0;
      auto end = std::remove_if(
          actions.sends.begin(), actions.sends.end(), [&](const SendAction& s) {
            if (s.env.payload.kind() != MessageKind::kPreprepare) return false;
            return ++kept > spec.fanout;
          });
      actions.sends.erase(end, actions.sends.end());
      break;
    }

    case AttackKind::kLessExecutors:
      if (actions.spawns.size() > spec.spawnCount)
        actions.spawns.resize(spec.spawnCount);
      break;

    case AttackKind::kNodeExclusion: {
      auto excluded = [&](const Identity& to, uint64_t seq) {
        if (to.role != Role::kShimNode) return false;
        if (!spec.rotating) return spec.dark.count(to.index) > 0;
        // Rotating window over the peers, sized like the fixed set.
        uint64_t width = spec.dark.size();
        for (uint64_t i = 0; i < width; ++i) {
          uint32_t d = static_cast<uint32_t>((seq + i) % cfg_.nR);
          if (d == source.index) d = (d + 1) % cfg_.nR;
          if (d == to.index) return true;
        }
        return false;
      };
      auto end = std::remove_if(
          actions.sends.begin(), actions.sends.end(), [&](const SendAction& s) {
            if (s.env.payload.kind() != MessageKind::kPreprepare) return false;
            return excluded(s.to, s.env.payload.as<PreprepareBody>().seq);
          });
      actions.sends.erase(end, actions.sends.end());
      break;
    }

    case AttackKind::kEquivocation: {
      std::vector<size_t> ppIdx;
      for (size_t i = 0; i < actions.sends.size(); ++i)
        if (actions.sends[i].env.payload.kind() == MessageKind::kPreprepare)
          ppIdx.push_back(i);
      if (ppIdx.size() < 2) break;
      size_t firstHalf = (ppIdx.size() + 1) / 2;
      SigningKey key(source, audit_);
      for (size_t j = firstHalf; j < ppIdx.size(); ++j) {
        SendAction& s = actions.sends[ppIdx[j]];
        PreprepareBody pp = s.env.payload.as<PreprepareBody>();
        Batch alt = pp.request;
        if (alt.txns.size() >= 2) {
          std::reverse(alt.txns.begin(), alt.txns.end());
        } else {
          alt.txns.clear();
        }
        pp.request = std::move(alt);
        pp.digest = digest_of(pp.request);
        s.env = key.sign(Message{pp}, expected_scheme(MessageKind::kPreprepare));
      }
      break;
    }

    case AttackKind::kDuplicateSpawnPrimary: {
      size_t orig = actions.spawns.size();
      for (uint32_t e = 0; e < spec.extraSpawns; ++e)
        for (size_t i = 0; i < orig; ++i)
          actions.spawns.push_back(actions.spawns[i]);
      break;
    }

    case AttackKind::kDuplicateSpawnOldPrimary: {
      auto& stored = storedSpawns_[source.index];
      if (now < spec.replayAfter) {
        for (const auto& sp : actions.spawns) stored.push_back(sp.body);
      } else if (!replayed_.count(source.index)) {
        replayed_.insert(source.index);
        for (const auto& body : stored)
          actions.spawns.push_back(SpawnAction{body, 0});
      }
      break;
    }

    case AttackKind::kByzantineAbortDelay:
      for (auto& sp : actions.spawns) {
        if (!spec.seqs.empty() && !spec.seqs.count(sp.body.cert.seq)) continue;
        SimTime d = spec.delay > 0
                        ? spec.delay
                        : default_abort_delay(sp.body.request.txns.size());
        sp.delay = std::max(sp.delay, d);
      }
      break;

    case AttackKind::kVerifierFlood: {
      SigningKey key(source, audit_);
      for (uint32_t i = 0; i < spec.floodCopies; ++i) {
        // Junk resubmission: signed by the node itself, so the verifier
        // rejects it after doing admission work.
        Transaction junk;
        junk.client = source.index;
        junk.nonce = ++junkNonce_;
        ClientRequestBody crb{key.sign(junk, SigScheme::kDs)};
        Envelope env = key.sign(Message{std::move(crb)},
                                expected_scheme(MessageKind::kClientRequest));
        actions.sends.push_back({verifier_, std::move(env)});
      }
      break;
    }
  }
}

bool ScriptedAdversary::allow_inbound(const Identity& target,
                                      const Envelope& env, SimTime now) {
  (void)now;
  if (target.role != Role::kShimNode) return true;
  auto it = nodeAttacks_.find(target.index);
  if (it == nodeAttacks_.end()) return true;
  for (const auto& spec : it->second) {
    if (spec.kind != AttackKind::kRequestIgnorance) continue;
    const Transaction* t = nullptr;
    if (env.payload.is<ClientRequestBody>()) {
      t = &env.payload.as<ClientRequestBody>().txn.payload;
    } else if (env.payload.is<ErrorBody>()) {
      const auto& eb = env.payload.as<ErrorBody>();
      if (eb.txn) t = &eb.txn->payload;
    }
    if (t == nullptr) continue;
    if (spec.clients.empty() || spec.clients.count(t->client)) return false;
  }
  return true;
}

uint8_t ScriptedAdversary::executor_behavior(const Identity& spawner,
                                             uint64_t seq, const Digest& digest,
                                             uint32_t ordinal) {
  (void)digest;
  for (const auto& f : execFaults_) {
    if (f.perBurst == 0) continue;
    if (!f.seqs.empty() && !f.seqs.count(seq)) continue;
    if (!f.spawners.empty() &&
        (spawner.role != Role::kShimNode || !f.spawners.count(spawner.index)))
      continue;
    if (ordinal < f.perBurst) return static_cast<uint8_t>(f.fault);
  }
  return 0;
}

}  // namespace sbft
