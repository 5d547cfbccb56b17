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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "sbft/auth.hpp"
#include "sbft/config.hpp"
#include "sbft/message.hpp"
#include "sbft/rng.hpp"
#include "sbft/time.hpp"
#include "sbft/trace.hpp"

namespace sbft {

class Simnet;
class Metrics;

// One-way link latency: base plus uniform jitter in [0, jitter].
struct LinkSpec {
  SimTime base = 500;
  SimTime jitter = 200;
};

struct PartitionSpec {
  std::set<Identity> isolated;
  SimTime from = 0;
  SimTime until = 0;
};

// Delivery policy. Losses and partitions only occur before `gst`; from
// that point on every sent message between live components arrives within
// its link bound, which is the synchrony assumption the liveness
// guarantees lean on. Duplication can happen at any time since the
// original copy still arrives.
struct NetworkModel {
  LinkSpec defaultLink{500, 200};
  std::map<std::pair<Role, Role>, LinkSpec> roleLinks;
  std::map<std::pair<Identity, Identity>, LinkSpec> idLinks;
  double dropProb = 0.0;
  double dupProb = 0.0;
  SimTime gst = 0;
  std::vector<PartitionSpec> partitions;

  const LinkSpec& link(const Identity& from, const Identity& to) const;
  bool partitioned(const Identity& from, const Identity& to, SimTime t) const;
};

// Service-time model. Every delivered message occupies its target for a
// base cost plus per-byte and authentication work; outbound traffic costs
// signing time at the sender. These knobs, together with the wire size
// model, are what produce saturation and batching behavior.
struct ProcessingModel {
  SimTime handlerBase = 15;
  double perByte = 0.002;
  SimTime dsSign = 70;
  SimTime dsVerify = 30;
  SimTime macOp = 2;
  SimTime perSend = 2;
  SimTime spawnOverhead = 120;
  SimTime executorStagger = 0;  // per-ordinal cold start spread
  SimTime execPerTxn = 10;
  SimTime execPerOp = 4;
  SimTime storageFetchBase = 8;
  SimTime storagePerKey = 1;
  SimTime verifierPerKey = 2;
};

struct SendAction {
  Identity to;
  Envelope env;
};

struct SpawnAction {
  ExecuteBody body;
  SimTime delay = 0;  // honest spawns use 0; a byzantine spawner may stall
};

// Outputs of one handler invocation, collected so a byzantine node's
// strategy can rewrite them before they touch the network.
struct ActionBatch {
  std::vector<SendAction> sends;
  std::vector<SpawnAction> spawns;
};

// Strategy surface for byzantine shim nodes and executors. The engine
// consults it at the choke points where a faulty participant could act:
// rewriting its own outbound traffic, ignoring inbound messages, and
// deciding the fault class of executors it spawns.
class AdversaryHook {
 public:
  virtual ~AdversaryHook() = default;
  virtual void transform_outputs(const Identity& source, SimTime now,
                                 ActionBatch& actions) {
    (void)source; (void)now; (void)actions;
  }
  virtual bool allow_inbound(const Identity& target, const Envelope& env,
                             SimTime now) {
    (void)target; (void)env; (void)now;
    return true;
  }
  virtual uint8_t executor_behavior(const Identity& spawner, uint64_t seq,
                                    const Digest& digest, uint32_t ordinal) {
    (void)spawner; (void)seq; (void)digest; (void)ordinal;
    return 0;
  }
};

class Component;

// Capability handle passed into component handlers. All interaction with
// the outside world goes through this; sends and spawns take effect when
// the handler returns, after the adversary has had its say.
class Context {
 public:
  Context(Simnet* net, Component* self) : net_(net), self_(self) {}

  SimTime now() const;
  const Config& config() const;
  const SigningKey& key() const;

  void send(const Identity& to, Message msg);
  void send_forged(const Identity& to, Message msg, const Identity& claimed);
  void spawn_executor(ExecuteBody body);

  void set_timer(const std::string& timerKey, SimTime delay);
  void cancel_timer(const std::string& timerKey);
  bool timer_active(const std::string& timerKey) const;

  void schedule_step(SimTime delay, uint64_t token);

  // Adds to the component's accounted busy time without blocking it;
  // executors use this for compute phases modeled as scheduled steps.
  void charge_busy(SimTime d);

  // Records a message discarded by the component's own admission control.
  void count_flood_drop(const Identity& from, MessageKind kind);

  void trace(TraceRecord rec);

 private:
  Simnet* net_;
  Component* self_;
};

class Component {
 public:
  virtual ~Component() = default;

  virtual void on_start(Context& ctx) { (void)ctx; }
  virtual void on_envelope(const Envelope& env, Context& ctx) = 0;
  virtual void on_timer(const std::string& timerKey, Context& ctx) {
    (void)timerKey; (void)ctx;
  }
  virtual void on_step(uint64_t token, Context& ctx) {
    (void)token; (void)ctx;
  }

  const Identity& id() const { return id_; }
  const SigningKey& key() const { return key_; }

 private:
  friend class Simnet;
  Identity id_;
  SigningKey key_;
};

// Discrete event engine. A single queue ordered by (time, tiebreak
// sequence number) carries message deliveries, timer firings and executor
// compute steps. Components are single threaded: while one is busy
// processing, further events for it are pushed back to the moment it
// frees up.
class Simnet {
 public:
  Simnet(Config config, NetworkModel net, ProcessingModel proc, uint64_t seed,
         Trace* trace, Metrics* metrics);

  void register_component(Identity id, Component* c);
  void set_adversary(AdversaryHook* hook) { adversary_ = hook; }

  // Invoked for every envelope actually handed to a component, after drop
  // and adversary filtering. The audit monitors tap the wire here.
  void set_delivery_observer(
      std::function<void(const Envelope&, const Identity&, SimTime)> obs) {
    observer_ = std::move(obs);
  }
  void set_executor_factory(
      std::function<std::unique_ptr<Component>(Identity, uint8_t, uint32_t)>
          f) {
    executorFactory_ = std::move(f);
  }

  // Runs until the queue drains or simulated time would pass `hardStop`.
  // Returns true when the queue drained.
  bool run(SimTime hardStop);

  SimTime now() const { return now_; }
  const Config& config() const { return config_; }
  AuthAudit& audit() { return audit_; }
  Trace& trace() { return *trace_; }
  Metrics& metrics() { return *metrics_; }
  uint64_t events_processed() const { return eventsProcessed_; }
  SimTime busy_time(const Identity& id) const;
  const std::map<Identity, SimTime>& busy_times() const { return busy_; }
  uint32_t executors_minted() const { return executorCounter_; }

 private:
  friend class Context;

  enum class EvKind : uint8_t { kDeliver, kTimerFire, kStep };

  struct Event {
    SimTime time = 0;
    uint64_t seqno = 0;
    EvKind kind = EvKind::kDeliver;
    Identity target;
    Envelope env;
    std::string timerKey;
    uint64_t timerGen = 0;
    uint64_t stepToken = 0;
  };

  struct EventOrder {
    // Min-heap on (time, seqno) via std::push_heap's max-heap convention.
    bool operator()(const std::unique_ptr<Event>& a,
                    const std::unique_ptr<Event>& b) const {
      if (a->time != b->time) return a->time > b->time;
      return a->seqno > b->seqno;
    }
  };

  void dispatch(Event& ev);
  void flush_actions(Component* c, ActionBatch& actions, SimTime departAt);
  void schedule_delivery(const Identity& to, Envelope env, SimTime departAt);
  SimTime inbound_cost(const Component* c, const Event& ev) const;
  SimTime outbound_cost(const ActionBatch& actions) const;
  void push_event(std::unique_ptr<Event> ev);
  std::unique_ptr<Event> pop_event();

  Config config_;
  NetworkModel net_;
  ProcessingModel proc_;
  Trace* trace_;
  Metrics* metrics_;
  AuthAudit audit_;
  Rng netRng_;

  std::vector<std::unique_ptr<Event>> queue_;
  uint64_t nextSeqno_ = 0;
  SimTime now_ = 0;
  uint64_t eventsProcessed_ = 0;

  std::map<Identity, Component*> components_;
  std::vector<std::unique_ptr<Component>> ownedExecutors_;
  std::map<Identity, SimTime> busyUntil_;
  std::map<Identity, SimTime> busy_;
  std::map<std::pair<Identity, std::string>, uint64_t> timers_;

  AdversaryHook* adversary_ = nullptr;
  std::function<void(const Envelope&, const Identity&, SimTime)> observer_;
  std::function<std::unique_ptr<Component>(Identity, uint8_t, uint32_t)>
      executorFactory_;
  uint32_t executorCounter_ = 0;

  // Dispatch state for the component currently being served.
  Component* current_ = nullptr;
  ActionBatch pending_;
  SimTime dispatchNow_ = 0;
};

}  // namespace sbft
