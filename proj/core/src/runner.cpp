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

#include "sbft/runner.hpp"

#include <memory>

#include <fmt/format.h>

#include "sbft/adversary.hpp"
#include "sbft/baselines.hpp"
#include "sbft/client.hpp"
#include "sbft/executor.hpp"
#include "sbft/shim_node.hpp"
#include "sbft/simnet.hpp"
#include "sbft/verifier.hpp"
#include "sbft/workload.hpp"

namespace sbft {

std::string RunResult::verdict_line() const {
  return fmt::format(
      "{}: {} issued, {} committed, {} aborted, {:.0f} tps, p50 {:.2f} ms, "
      "checks {}",
      scenario.name, metrics.issued, metrics.committed, metrics.aborted,
      metrics.throughputTps, metrics.p50Ms, findings.ok ? "ok" : "FAILED");
}

std::vector<VerifierView> verifier_observations(
    const std::vector<TraceRecord>& trace) {
  std::vector<VerifierView> out;
  for (const TraceRecord& rec : trace) {
    if (const auto* obs = std::get_if<VerifierObsRec>(&rec)) {
      out.push_back(VerifierView{obs->digest,
                                 static_cast<uint8_t>(obs->what), obs->aux});
    }
  }
  return out;
}

SimTime abort_timer_per_txn(const ProcessingModel& proc,
                            const LinkSpec& storageLink, uint32_t opsPerTxn) {
  SimTime fetch = 2 * storageLink.base + proc.storageFetchBase +
                  static_cast<SimTime>(opsPerTxn) * proc.storagePerKey;
  SimTime compute =
      proc.execPerTxn + static_cast<SimTime>(opsPerTxn) * proc.execPerOp;
  return 2 * (fetch + compute);
}

RunResult run_scenario(const Scenario& s) {
  s.validate();

  Trace trace;
  Metrics metrics;
  Simnet net(s.config, s.net, s.proc, s.seed, &trace, &metrics);

  Storage storage(s.kvSeed, s.workload.keyspace);
  const bool requireCert = s.config.mode == RunMode::kServerlessBft;
  const bool hasVerifier = s.config.mode != RunMode::kShimLocal;
  const bool hasShim = s.config.mode == RunMode::kServerlessBft ||
                       s.config.mode == RunMode::kShimLocal;
  const bool hasCft = s.config.mode == RunMode::kServerlessCft;
  const bool hasGateway = s.config.mode == RunMode::kNoShim;

  std::vector<Identity> nodeIds;
  if (!hasGateway) {
    for (uint32_t i = 0; i < s.config.nR; ++i) nodeIds.push_back(node_id(i));
  }

  const LinkSpec& storageLink = s.net.link(executor_id(0), storage_id());
  const SimTime abortFixed = s.config.verifierAbortTimeout;
  const SimTime abortPerTxn =
      abort_timer_per_txn(s.proc, storageLink, s.workload.opsPerTxn);

  // Components. The engine does not own them (spawned executors aside).
  WorkloadGen gen(s.workload, s.seed);
  std::vector<std::unique_ptr<ClientComponent>> clients;
  std::vector<std::unique_ptr<ShimNodeComponent>> shimNodes;
  std::vector<std::unique_ptr<CftNodeComponent>> cftNodes;
  std::unique_ptr<GatewayComponent> gateway;
  std::unique_ptr<VerifierComponent> verifier;

  for (uint32_t c = 0; c < s.workload.clients; ++c) {
    clients.push_back(std::make_unique<ClientComponent>(
        nodeIds, verifier_id(), gateway_id(), &gen, &metrics, s.txnLimit,
        s.duration));
    net.register_component(client_id(c), clients.back().get());
  }
  if (hasShim) {
    for (uint32_t i = 0; i < s.config.nR; ++i) {
      shimNodes.push_back(std::make_unique<ShimNodeComponent>(
          nodeIds, verifier_id(), s.kvSeed));
      net.register_component(node_id(i), shimNodes.back().get());
    }
  }
  if (hasCft) {
    for (uint32_t i = 0; i < s.config.nR; ++i) {
      cftNodes.push_back(
          std::make_unique<CftNodeComponent>(nodeIds, verifier_id()));
      net.register_component(node_id(i), cftNodes.back().get());
    }
  }
  if (hasGateway) {
    gateway = std::make_unique<GatewayComponent>(verifier_id());
    net.register_component(gateway_id(), gateway.get());
  }
  if (hasVerifier) {
    std::vector<Identity> spawnerSide =
        hasGateway ? std::vector<Identity>{gateway_id()} : nodeIds;
    verifier = std::make_unique<VerifierComponent>(
        &storage, spawnerSide, requireCert, abortFixed, abortPerTxn);
    net.register_component(verifier_id(), verifier.get());
  }

  net.set_executor_factory([&](Identity eid, uint8_t behavior,
                               uint32_t ordinal) {
    (void)eid;
    return std::make_unique<ExecutorComponent>(
        &storage, verifier_id(), s.proc, storageLink,
        static_cast<ExecutorFault>(behavior), ordinal, requireCert);
  });

  std::unique_ptr<ScriptedAdversary> adversary;
  if (!s.adversary.empty()) {
    adversary = std::make_unique<ScriptedAdversary>(
        s.config, s.seed, &net.audit(), verifier_id(), abortFixed,
        abortPerTxn);
    for (const auto& [node, spec] : s.adversary.nodeAttacks)
      adversary->add_attack(node, spec);
    for (const auto& fault : s.adversary.execFaults)
      adversary->set_executor_fault(fault);
    net.set_adversary(adversary.get());
  }

  WireAuditor auditor(&net.audit());
  net.set_delivery_observer(
      [&auditor](const Envelope& env, const Identity& to, SimTime now) {
        auditor.observe(env, to, now);
      });

  bool drained = net.run(s.duration + s.drain);

  // Audit before teardown.
  RunResult res;
  res.scenario = s;
  res.metrics =
      metrics.finalize(s.duration, s.warmup, net.busy_times(), s.cost);
  res.findings = check_invariants(trace.records(), s.config);
  res.oracle = check_trace(trace.records(), s.kvSeed, s.workload.keyspace,
                           hasVerifier ? &storage : nullptr);
  cross_check_clients(trace.records(), res.oracle, res.findings);
  for (const auto& v : auditor.violations()) res.findings.flag("wire: " + v);
  if (!res.oracle.ok) {
    for (const auto& p : res.oracle.problems)
      res.findings.flag("replay: " + p);
    if (res.oracle.problems.size() < res.oracle.problemCount) {
      res.findings.flag(fmt::format("replay: {} further problem(s)",
                                    res.oracle.problemCount -
                                        res.oracle.problems.size()));
    }
  }

  if (hasVerifier) res.storage.emplace(std::move(storage));
  res.endTime = net.now();
  res.drained = drained;
  res.traceDigest = trace.content_digest();
  res.busyTimes = net.busy_times();
  res.executorsMinted = net.executors_minted();
  for (const auto& n : shimNodes) {
    res.nodeView.push_back(n->view());
    res.nodeStableSeq.push_back(n->stable_seq());
    res.nodeCommitted.push_back(n->committed_count());
    res.nodeViewsInstalled.push_back(n->views_installed());
  }
  for (const auto& n : cftNodes) {
    res.nodeView.push_back(0);
    res.nodeStableSeq.push_back(0);
    res.nodeCommitted.push_back(n->committed_count());
    res.nodeViewsInstalled.push_back(0);
  }
  if (verifier) {
    res.verifierNextSeq = verifier->next_seq();
    res.verifierDecided = verifier->decided_batches();
    res.verifierAborted = verifier->aborted_batches();
  }
  for (const auto& c : clients) {
    if (c->idle()) ++res.clientsIdle;
  }
  res.trace = std::move(trace);
  return res;
}

}  // namespace sbft
