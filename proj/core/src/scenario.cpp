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

#include "sbft/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace sbft {
namespace {

using nlohmann::json;

const char* attack_kind_name(AttackKind k) {
  switch (k) {
    case AttackKind::kRequestIgnorance: return "request-ignorance";
    case AttackKind::kUnsuccessfulConsensus: return "unsuccessful-consensus";
    case AttackKind::kLessExecutors: return "less-executors";
    case AttackKind::kNodeExclusion: return "node-exclusion";
    case AttackKind::kEquivocation: return "equivocation";
    case AttackKind::kDuplicateSpawnPrimary: return "duplicate-spawn-primary";
    case AttackKind::kDuplicateSpawnOldPrimary:
      return "duplicate-spawn-old-primary";
    case AttackKind::kByzantineAbortDelay: return "byzantine-abort-delay";
    case AttackKind::kVerifierFlood: return "verifier-flood";
  }
  return "?";
}

const char* executor_fault_name(ExecutorFault f) {
  switch (f) {
    case ExecutorFault::kHonest: return "honest";
    case ExecutorFault::kWrongResult: return "wrong-result";
    case ExecutorFault::kSilent: return "silent";
    case ExecutorFault::kDuplicateReport: return "duplicate-report";
    case ExecutorFault::kStaleRead: return "stale-read";
  }
  return "?";
}

template <typename E>
E parse_enum(const std::string& text, const char* what,
             std::initializer_list<E> all, const char* (*name)(E)) {
  for (E e : all) {
    if (text == name(e)) return e;
  }
  throw ConfigError(fmt::format("unknown {} \"{}\"", what, text));
}

RunMode parse_run_mode(const std::string& s) {
  return parse_enum(s, "mode",
                    {RunMode::kServerlessBft, RunMode::kShimLocal,
                     RunMode::kServerlessCft, RunMode::kNoShim},
                    run_mode_name);
}

ConflictMode parse_conflict_mode(const std::string& s) {
  return parse_enum(s, "conflict mode",
                    {ConflictMode::kUnknownRw, ConflictMode::kKnownRw,
                     ConflictMode::kNonConflicting},
                    conflict_mode_name);
}

SpawnMode parse_spawn_mode(const std::string& s) {
  return parse_enum(s, "spawn mode",
                    {SpawnMode::kCentralized, SpawnMode::kDistributed,
                     SpawnMode::kDistributedConservative},
                    spawn_mode_name);
}

AttackKind parse_attack_kind(const std::string& s) {
  return parse_enum(
      s, "attack",
      {AttackKind::kRequestIgnorance, AttackKind::kUnsuccessfulConsensus,
       AttackKind::kLessExecutors, AttackKind::kNodeExclusion,
       AttackKind::kEquivocation, AttackKind::kDuplicateSpawnPrimary,
       AttackKind::kDuplicateSpawnOldPrimary, AttackKind::kByzantineAbortDelay,
       AttackKind::kVerifierFlood},
      attack_kind_name);
}

ExecutorFault parse_executor_fault(const std::string& s) {
  return parse_enum(s, "executor fault",
                    {ExecutorFault::kHonest, ExecutorFault::kWrongResult,
                     ExecutorFault::kSilent, ExecutorFault::kDuplicateReport,
                     ExecutorFault::kStaleRead},
                    executor_fault_name);
}

Role parse_role(const std::string& s) {
  return parse_enum(s, "role",
                    {Role::kClient, Role::kShimNode, Role::kExecutor,
                     Role::kVerifier, Role::kStorage, Role::kGateway},
                    role_name);
}

Identity parse_identity(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) return Identity{parse_role(s), 0};
  Identity id;
  id.role = parse_role(s.substr(0, colon));
  id.index = static_cast<uint32_t>(std::stoul(s.substr(colon + 1)));
  return id;
}

std::string identity_text(const Identity& id) {
  return fmt::format("{}:{}", role_name(id.role), id.index);
}

// Times may be written as integer microseconds or as "5ms" style strings.
SimTime time_field(const json& j, const char* key, SimTime fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_string()) return parse_duration(v.get<std::string>());
  return v.get<SimTime>();
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

template <typename T>
std::set<T> set_field(const json& j, const char* key) {
  std::set<T> out;
  if (!j.contains(key)) return out;
  for (const json& v : j.at(key)) out.insert(v.get<T>());
  return out;
}

void parse_config(const json& j, Config& c) {
  if (j.contains("mode")) c.mode = parse_run_mode(j.at("mode"));
  if (j.contains("conflict_mode"))
    c.conflictMode = parse_conflict_mode(j.at("conflict_mode"));
  if (j.contains("spawn_mode"))
    c.spawnMode = parse_spawn_mode(j.at("spawn_mode"));
  c.nR = field(j, "n_r", c.nR);
  c.fR = field(j, "f_r", c.fR);
  c.nE = field(j, "n_e", c.nE);
  c.fE = field(j, "f_e", c.fE);
  c.batchSize = field(j, "batch_size", c.batchSize);
  c.checkpointInterval = field(j, "checkpoint_interval", c.checkpointInterval);
  c.batchFlushTimeout = time_field(j, "batch_flush", c.batchFlushTimeout);
  c.clientRetryTimeout = time_field(j, "client_retry", c.clientRetryTimeout);
  c.nodeProgressTimeout = time_field(j, "progress", c.nodeProgressTimeout);
  c.errorRetryTimeout = time_field(j, "error_retry", c.errorRetryTimeout);
  c.viewChangeRetryTimeout =
      time_field(j, "vc_retry", c.viewChangeRetryTimeout);
  c.verifierAbortTimeout = time_field(j, "abort", c.verifierAbortTimeout);
}

json config_json(const Config& c) {
  return json{{"mode", run_mode_name(c.mode)},
              {"conflict_mode", conflict_mode_name(c.conflictMode)},
              {"spawn_mode", spawn_mode_name(c.spawnMode)},
              {"n_r", c.nR},
              {"f_r", c.fR},
              {"n_e", c.nE},
              {"f_e", c.fE},
              {"batch_size", c.batchSize},
              {"checkpoint_interval", c.checkpointInterval},
              {"batch_flush", c.batchFlushTimeout},
              {"client_retry", c.clientRetryTimeout},
              {"progress", c.nodeProgressTimeout},
              {"error_retry", c.errorRetryTimeout},
              {"vc_retry", c.viewChangeRetryTimeout},
              {"abort", c.verifierAbortTimeout}};
}

void parse_network(const json& j, NetworkModel& n) {
  n.defaultLink.base = time_field(j, "link_base", n.defaultLink.base);
  n.defaultLink.jitter = time_field(j, "link_jitter", n.defaultLink.jitter);
  n.dropProb = field(j, "drop_prob", n.dropProb);
  n.dupProb = field(j, "dup_prob", n.dupProb);
  n.gst = time_field(j, "gst", n.gst);
  if (j.contains("partitions")) {
    for (const json& p : j.at("partitions")) {
      PartitionSpec spec;
      for (const json& who : p.at("isolated"))
        spec.isolated.insert(parse_identity(who.get<std::string>()));
      spec.from = time_field(p, "from", 0);
      spec.until = time_field(p, "until", 0);
      n.partitions.push_back(std::move(spec));
    }
  }
  if (j.contains("links")) {
    for (const json& l : j.at("links")) {
      LinkSpec spec{time_field(l, "base", n.defaultLink.base),
                    time_field(l, "jitter", n.defaultLink.jitter)};
      std::string from = l.at("from").get<std::string>();
      std::string to = l.at("to").get<std::string>();
      bool pair = from.find(':') != std::string::npos ||
                  to.find(':') != std::string::npos;
      if (pair) {
        n.idLinks[{parse_identity(from), parse_identity(to)}] = spec;
      } else {
        n.roleLinks[{parse_role(from), parse_role(to)}] = spec;
      }
    }
  }
}

json network_json(const NetworkModel& n) {
  json j{{"link_base", n.defaultLink.base},
         {"link_jitter", n.defaultLink.jitter},
         {"drop_prob", n.dropProb},
         {"dup_prob", n.dupProb},
         {"gst", n.gst}};
  if (!n.partitions.empty()) {
    json parts = json::array();
    for (const auto& p : n.partitions) {
      json who = json::array();
      for (const auto& id : p.isolated) who.push_back(identity_text(id));
      parts.push_back(
          json{{"isolated", who}, {"from", p.from}, {"until", p.until}});
    }
    j["partitions"] = parts;
  }
  if (!n.roleLinks.empty() || !n.idLinks.empty()) {
    json links = json::array();
    for (const auto& [key, spec] : n.roleLinks) {
      links.push_back(json{{"from", role_name(key.first)},
                           {"to", role_name(key.second)},
                           {"base", spec.base},
                           {"jitter", spec.jitter}});
    }
    for (const auto& [key, spec] : n.idLinks) {
      links.push_back(json{{"from", identity_text(key.first)},
                           {"to", identity_text(key.second)},
                           {"base", spec.base},
                           {"jitter", spec.jitter}});
    }
    j["links"] = links;
  }
  return j;
}

void parse_processing(const json& j, ProcessingModel& p) {
  p.handlerBase = time_field(j, "handler_base", p.handlerBase);
  p.perByte = field(j, "per_byte", p.perByte);
  p.dsSign = time_field(j, "ds_sign", p.dsSign);
  p.dsVerify = time_field(j, "ds_verify", p.dsVerify);
  p.macOp = time_field(j, "mac_op", p.macOp);
  p.perSend = time_field(j, "per_send", p.perSend);
  p.spawnOverhead = time_field(j, "spawn_overhead", p.spawnOverhead);
  p.executorStagger = time_field(j, "executor_stagger", p.executorStagger);
  p.execPerTxn = time_field(j, "exec_per_txn", p.execPerTxn);
  p.execPerOp = time_field(j, "exec_per_op", p.execPerOp);
  p.storageFetchBase = time_field(j, "storage_fetch", p.storageFetchBase);
  p.storagePerKey = time_field(j, "storage_per_key", p.storagePerKey);
  p.verifierPerKey = time_field(j, "verifier_per_key", p.verifierPerKey);
}

json processing_json(const ProcessingModel& p) {
  return json{{"handler_base", p.handlerBase},
              {"per_byte", p.perByte},
              {"ds_sign", p.dsSign},
              {"ds_verify", p.dsVerify},
              {"mac_op", p.macOp},
              {"per_send", p.perSend},
              {"spawn_overhead", p.spawnOverhead},
              {"executor_stagger", p.executorStagger},
              {"exec_per_txn", p.execPerTxn},
              {"exec_per_op", p.execPerOp},
              {"storage_fetch", p.storageFetchBase},
              {"storage_per_key", p.storagePerKey},
              {"verifier_per_key", p.verifierPerKey}};
}

void parse_workload(const json& j, WorkloadSpec& w) {
  w.clients = field(j, "clients", w.clients);
  w.opsPerTxn = field(j, "ops_per_txn", w.opsPerTxn);
  w.conflictRate = field(j, "conflict_rate", w.conflictRate);
  w.keyspace = field(j, "keyspace", w.keyspace);
  w.hotKeys = field(j, "hot_keys", w.hotKeys);
}

json workload_json(const WorkloadSpec& w) {
  return json{{"clients", w.clients},
              {"ops_per_txn", w.opsPerTxn},
              {"conflict_rate", w.conflictRate},
              {"keyspace", w.keyspace},
              {"hot_keys", w.hotKeys}};
}

AttackSpec parse_attack(const json& j) {
  AttackSpec a;
  a.kind = parse_attack_kind(j.at("kind"));
  a.clients = set_field<uint32_t>(j, "clients");
  a.fanout = field(j, "fanout", a.fanout);
  a.spawnCount = field(j, "spawn_count", a.spawnCount);
  a.dark = set_field<uint32_t>(j, "dark");
  a.rotating = field(j, "rotating", a.rotating);
  a.extraSpawns = field(j, "extra_spawns", a.extraSpawns);
  a.replayAfter = time_field(j, "replay_after", a.replayAfter);
  a.delay = time_field(j, "delay", a.delay);
  a.seqs = set_field<uint64_t>(j, "seqs");
  a.floodCopies = field(j, "flood_copies", a.floodCopies);
  return a;
}

json attack_json(uint32_t node, const AttackSpec& a) {
  json j{{"node", node}, {"kind", attack_kind_name(a.kind)}};
  if (!a.clients.empty()) j["clients"] = a.clients;
  if (a.fanout) j["fanout"] = a.fanout;
  if (a.spawnCount) j["spawn_count"] = a.spawnCount;
  if (!a.dark.empty()) j["dark"] = a.dark;
  if (a.rotating) j["rotating"] = a.rotating;
  if (a.extraSpawns != 1) j["extra_spawns"] = a.extraSpawns;
  if (a.replayAfter) j["replay_after"] = a.replayAfter;
  if (a.delay) j["delay"] = a.delay;
  if (!a.seqs.empty()) j["seqs"] = a.seqs;
  if (a.floodCopies) j["flood_copies"] = a.floodCopies;
  return j;
}

ExecutorFaultSpec parse_exec_fault(const json& j) {
  ExecutorFaultSpec f;
  f.fault = parse_executor_fault(j.at("fault"));
  f.perBurst = field(j, "per_burst", f.perBurst);
  f.seqs = set_field<uint64_t>(j, "seqs");
  f.spawners = set_field<uint32_t>(j, "spawners");
  return f;
}

json exec_fault_json(const ExecutorFaultSpec& f) {
  json j{{"fault", executor_fault_name(f.fault)}, {"per_burst", f.perBurst}};
  if (!f.seqs.empty()) j["seqs"] = f.seqs;
  if (!f.spawners.empty()) j["spawners"] = f.spawners;
  return j;
}

}  // namespace

std::set<uint32_t> AdversaryScript::byzantine_nodes() const {
  std::set<uint32_t> out;
  for (const auto& [node, spec] : nodeAttacks) {
    (void)spec;
    out.insert(node);
  }
  return out;
}

Scenario Scenario::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("scenario is not valid JSON: {}", e.what()));
  }
  Scenario s;
  try {
    s.name = field<std::string>(j, "name", s.name);
    s.seed = field(j, "seed", s.seed);
    s.duration = time_field(j, "duration", s.duration);
    s.warmup = time_field(j, "warmup", s.warmup);
    s.drain = time_field(j, "drain", s.drain);
    s.txnLimit = field(j, "txn_limit", s.txnLimit);
    s.kvSeed = field(j, "kv_seed", s.kvSeed);
    s.outOfModel = field(j, "out_of_model", s.outOfModel);
    if (j.contains("config")) parse_config(j.at("config"), s.config);
    if (j.contains("network")) parse_network(j.at("network"), s.net);
    if (j.contains("processing")) parse_processing(j.at("processing"), s.proc);
    if (j.contains("workload")) parse_workload(j.at("workload"), s.workload);
    if (j.contains("adversary")) {
      const json& adv = j.at("adversary");
      if (adv.contains("node_attacks")) {
        for (const json& a : adv.at("node_attacks")) {
          s.adversary.nodeAttacks.emplace_back(a.at("node").get<uint32_t>(),
                                               parse_attack(a));
        }
      }
      if (adv.contains("executor_faults")) {
        for (const json& f : adv.at("executor_faults"))
          s.adversary.execFaults.push_back(parse_exec_fault(f));
      }
    }
    if (j.contains("cost")) {
      const json& c = j.at("cost");
      s.cost.spawnCents = field(c, "spawn_cents", s.cost.spawnCents);
      s.cost.vmCentsPerSec = field(c, "vm_cents_per_sec", s.cost.vmCentsPerSec);
      s.cost.execCentsPerSec =
          field(c, "exec_cents_per_sec", s.cost.execCentsPerSec);
    }
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("scenario field error: {}", e.what()));
  }
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  Scenario s = from_json(buf.str());
  if (const char* env = std::getenv("SBFTSIM_SEED")) {
    s.seed = std::strtoull(env, nullptr, 10);
  }
  return s;
}

std::string Scenario::to_json() const {
  json j{{"name", name},
         {"seed", seed},
         {"duration", duration},
         {"warmup", warmup},
         {"drain", drain},
         {"txn_limit", txnLimit},
         {"kv_seed", kvSeed},
         {"out_of_model", outOfModel},
         {"config", config_json(config)},
         {"network", network_json(net)},
         {"processing", processing_json(proc)},
         {"workload", workload_json(workload)},
         {"cost",
          json{{"spawn_cents", cost.spawnCents},
               {"vm_cents_per_sec", cost.vmCentsPerSec},
               {"exec_cents_per_sec", cost.execCentsPerSec}}}};
  if (!adversary.empty()) {
    json adv;
    if (!adversary.nodeAttacks.empty()) {
      json attacks = json::array();
      for (const auto& [node, spec] : adversary.nodeAttacks)
        attacks.push_back(attack_json(node, spec));
      adv["node_attacks"] = attacks;
    }
    if (!adversary.execFaults.empty()) {
      json faults = json::array();
      for (const auto& f : adversary.execFaults)
        faults.push_back(exec_fault_json(f));
      adv["executor_faults"] = faults;
    }
    j["adversary"] = adv;
  }
  return j.dump(2);
}

void Scenario::validate() const {
  if (duration <= 0) throw ConfigError("duration must be positive");
  if (warmup < 0 || drain < 0) throw ConfigError("negative time window");
  if (warmup >= duration)
    throw ConfigError("warmup must end before the issue window does");
  if (workload.clients == 0) throw ConfigError("need at least one client");
  if (workload.keyspace <= workload.hotKeys + workload.clients)
    throw ConfigError("keyspace too small for per-client shards");
  if (net.dropProb < 0 || net.dropProb > 1 || net.dupProb < 0 ||
      net.dupProb > 1)
    throw ConfigError("probabilities must lie in [0, 1]");
  if (config.nR == 0 || config.batchSize == 0 ||
      config.checkpointInterval == 0)
    throw ConfigError("zero-sized deployment");
  if (config.mode != RunMode::kShimLocal && config.nE == 0)
    throw ConfigError("executor pool cannot be empty");
  // Guarantee-envelope sizing; a scenario can opt out to study exactly the
  // configurations the envelope exists to rule out.
  if (!outOfModel) config.validate();

  bool shimmed = config.mode == RunMode::kServerlessBft ||
                 config.mode == RunMode::kShimLocal;
  std::set<uint32_t> byz = adversary.byzantine_nodes();
  for (uint32_t n : byz) {
    if (n >= config.nR)
      throw ConfigError(fmt::format("attack on node {} outside shim of {}",
                                    n, config.nR));
  }
  if (!outOfModel) {
    if (shimmed && byz.size() > config.fR)
      throw ConfigError(fmt::format(
          "{} byzantine nodes exceeds fR={}; set out_of_model to force",
          byz.size(), config.fR));
    for (const auto& f : adversary.execFaults) {
      if (f.fault != ExecutorFault::kHonest && f.perBurst > config.fE)
        throw ConfigError(fmt::format(
            "{} faulty executors per burst exceeds fE={}; set out_of_model "
            "to force",
            f.perBurst, config.fE));
    }
    if (!adversary.empty() && config.mode == RunMode::kServerlessCft)
      throw ConfigError(
          "byzantine script under the crash-tolerant baseline; set "
          "out_of_model to force");
  }
  for (const auto& p : net.partitions) {
    if (p.until < p.from) throw ConfigError("partition ends before it begins");
  }
}

}  // namespace sbft
