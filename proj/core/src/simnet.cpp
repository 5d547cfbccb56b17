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

#include "sbft/simnet.hpp"

#include <algorithm>
#include <cassert>

#include "sbft/metrics.hpp"

namespace sbft {

const LinkSpec& NetworkModel::link(const Identity& from,
                                   const Identity& to) const {
  auto idIt = idLinks.find({from, to});
  if (idIt != idLinks.end()) return idIt->second;
  auto roleIt = roleLinks.find({from.role, to.role});
  if (roleIt != roleLinks.end()) return roleIt->second;
  return defaultLink;
}

bool NetworkModel::partitioned(const Identity& from, const Identity& to,
                               SimTime t) const {
  for (const auto& p : partitions) {
    // Partitions cannot outlive the synchrony bound.
    SimTime until = gst > 0 ? std::min(p.until, gst) : p.from;
    if (t < p.from || t >= until) continue;
    bool a = p.isolated.count(from) > 0;
    bool b = p.isolated.count(to) > 0;
    if (a != b) return true;
  }
  return false;
}

Simnet::Simnet(Config config, NetworkModel net, ProcessingModel proc,
               uint64_t seed, Trace* trace, Metrics* metrics)
    : config_(std::move(config)),
      net_(std::move(net)),
      proc_(proc),
      trace_(trace),
      metrics_(metrics),
      netRng_(seed, "network") {}

void Simnet::register_component(Identity id, Component* c) {
  c->id_ = id;
  c->key_ = SigningKey(id, &audit_);
  components_[id] = c;
  busyUntil_[id] = 0;
  busy_[id] = 0;
}

SimTime Simnet::busy_time(const Identity& id) const {
  auto it = busy_.find(id);
  return it == busy_.end() ? 0 : it->second;
}

void Simnet::push_event(std::unique_ptr<Event> ev) {
  queue_.push_back(std::move(ev));
  std::push_heap(queue_.begin(), queue_.end(), EventOrder{});
}

std::unique_ptr<Simnet::Event> Simnet::pop_event() {
  std::pop_heap(queue_.begin(), queue_.end(), EventOrder{});
  auto ev = std::move(queue_.back());
  queue_.pop_back();
  return ev;
}

bool Simnet::run(SimTime hardStop) {
  // Start pass: components fire their initial actions at t=0 in identity
  // order (clients first, so the first requests enter the queue before
  // any protocol activity).
  static_assert(static_cast<int>(Role::kClient) == 0);
  for (auto& [id, c] : components_) {
    (void)id;
    current_ = c;
    pending_ = {};
    dispatchNow_ = 0;
    Context ctx(this, c);
    c->on_start(ctx);
    SimTime outCost = outbound_cost(pending_);
    busyUntil_[c->id()] = std::max(busyUntil_[c->id()], outCost);
    busy_[c->id()] += outCost;
    flush_actions(c, pending_, outCost);
    current_ = nullptr;
  }

  while (!queue_.empty()) {
    if (queue_.front()->time > hardStop) return false;
    auto ev = pop_event();
    auto cIt = components_.find(ev->target);
    if (cIt == components_.end()) continue;
    SimTime freeAt = busyUntil_[ev->target];
    if (freeAt > ev->time) {
      ev->time = freeAt;
      push_event(std::move(ev));
      continue;
    }
    dispatch(*ev);
  }
  return true;
}

void Simnet::dispatch(Event& ev) {
  now_ = ev.time;
  Component* c = components_[ev.target];

  if (ev.kind == EvKind::kTimerFire) {
    auto it = timers_.find({ev.target, ev.timerKey});
    if (it == timers_.end() || it->second != ev.timerGen) return;  // stale
    timers_.erase(it);
  }
  if (ev.kind == EvKind::kDeliver && adversary_ &&
      !adversary_->allow_inbound(ev.target, ev.env, now_)) {
    trace_->add(DropRec{now_, ev.env.signer, ev.target,
                        static_cast<uint8_t>(ev.env.payload.kind()), 2});
    metrics_->count_drop(2);
    return;
  }
  if (ev.kind == EvKind::kDeliver && observer_) {
    observer_(ev.env, ev.target, now_);
  }

  EventRec rec;
  rec.time = ev.time;
  rec.seqno = ev.seqno;
  rec.at = ev.target;
  switch (ev.kind) {
    case EvKind::kDeliver:
      rec.etype = EventType::kDeliver;
      rec.mkind = static_cast<uint8_t>(ev.env.payload.kind());
      rec.from = ev.env.signer;
      rec.sizeBytes = static_cast<uint32_t>(wire_size(ev.env));
      break;
    case EvKind::kTimerFire:
      rec.etype = EventType::kTimer;
      rec.detail = ev.timerKey;
      break;
    case EvKind::kStep:
      rec.etype = EventType::kStep;
      rec.detail = std::to_string(ev.stepToken);
      break;
  }
  trace_->add(rec);

  SimTime inCost = inbound_cost(c, ev);
  current_ = c;
  pending_ = {};
  dispatchNow_ = ev.time + inCost;
  Context ctx(this, c);
  switch (ev.kind) {
    case EvKind::kDeliver:
      c->on_envelope(ev.env, ctx);
      break;
    case EvKind::kTimerFire:
      c->on_timer(ev.timerKey, ctx);
      break;
    case EvKind::kStep:
      c->on_step(ev.stepToken, ctx);
      break;
  }
  SimTime finish = dispatchNow_ + outbound_cost(pending_);
  busyUntil_[ev.target] = std::max(busyUntil_[ev.target], finish);
  busy_[ev.target] += finish - ev.time;
  flush_actions(c, pending_, finish);
  current_ = nullptr;
  ++eventsProcessed_;
}

SimTime Simnet::inbound_cost(const Component* c, const Event& ev) const {
  (void)c;
  if (ev.kind != EvKind::kDeliver) {
    return ev.kind == EvKind::kTimerFire ? proc_.handlerBase : 0;
  }
  const Envelope& env = ev.env;
  SimTime cost = proc_.handlerBase +
                 static_cast<SimTime>(proc_.perByte *
                                      static_cast<double>(wire_size(env)));
  switch (env.scheme) {
    case SigScheme::kDs: cost += proc_.dsVerify; break;
    case SigScheme::kMac: cost += proc_.macOp; break;
    case SigScheme::kNone: break;
  }
  const Message& m = env.payload;
  switch (m.kind()) {
    case MessageKind::kPreprepare:
      cost += static_cast<SimTime>(m.as<PreprepareBody>().request.txns.size()) *
              proc_.dsVerify;
      break;
    case MessageKind::kExecute:
      cost += static_cast<SimTime>(
                  m.as<ExecuteBody>().cert.attestations.size()) *
              proc_.dsVerify;
      break;
    case MessageKind::kVerify:
      cost += static_cast<SimTime>(
                  m.as<VerifyBody>().cert.attestations.size()) *
              proc_.dsVerify;
      break;
    case MessageKind::kViewChange: {
      const auto& vc = m.as<Signed<ViewChangeBody>>().payload;
      for (const auto& p : vc.proofs)
        cost += static_cast<SimTime>(p.prepares.size()) * proc_.macOp;
      break;
    }
    case MessageKind::kNewView: {
      const auto& nv = m.as<NewViewBody>();
      cost += static_cast<SimTime>(nv.support.size()) * proc_.dsVerify;
      for (const auto& a : nv.assignments)
        cost += static_cast<SimTime>(a.proof.size()) * proc_.macOp;
      break;
    }
    case MessageKind::kCheckpoint: {
      const auto& cp = m.as<CheckpointBody>();
      for (const auto& cert : cp.certs)
        cost += static_cast<SimTime>(cert.attestations.size()) * proc_.dsVerify;
      break;
    }
    default:
      break;
  }
  return cost;
}

SimTime Simnet::outbound_cost(const ActionBatch& actions) const {
  SimTime cost = 0;
  std::set<Digest> signedOnce;
  for (const auto& s : actions.sends) {
    cost += proc_.perSend;
    if (s.env.scheme == SigScheme::kDs) {
      if (signedOnce.insert(s.env.integrity).second) cost += proc_.dsSign;
    } else if (s.env.scheme == SigScheme::kMac) {
      cost += proc_.macOp;
    }
  }
  for (const auto& sp : actions.spawns) {
    cost += proc_.spawnOverhead + proc_.perSend;
    Digest d = digest_of(sp.body);
    if (signedOnce.insert(d).second) cost += proc_.dsSign;
  }
  return cost;
}

void Simnet::flush_actions(Component* c, ActionBatch& actions,
                           SimTime departAt) {
  if (adversary_) adversary_->transform_outputs(c->id(), departAt, actions);
  for (auto& s : actions.sends) schedule_delivery(s.to, std::move(s.env), departAt);
  uint32_t ordinal = 0;
  for (auto& sp : actions.spawns) {
    Identity eid = executor_id(executorCounter_++);
    uint8_t behavior =
        adversary_ ? adversary_->executor_behavior(c->id(), sp.body.cert.seq,
                                                   sp.body.digest, ordinal)
                   : 0;
    assert(executorFactory_);
    auto comp = executorFactory_(eid, behavior, ordinal);
    ++ordinal;
    register_component(eid, comp.get());
    ownedExecutors_.push_back(std::move(comp));
    SimTime launchAt = departAt + sp.delay;
    trace_->add(SpawnRec{launchAt, c->id(), eid, sp.body.cert.seq,
                         sp.body.digest, behavior});
    metrics_->count_spawn(c->id());
    Envelope env = c->key().sign(Message{std::move(sp.body)}, SigScheme::kDs);
    schedule_delivery(eid, std::move(env), launchAt);
  }
  actions.sends.clear();
  actions.spawns.clear();
}

void Simnet::schedule_delivery(const Identity& to, Envelope env,
                               SimTime departAt) {
  const Identity& from = current_ ? current_->id() : env.signer;
  MessageKind kind = env.payload.kind();
  size_t size = wire_size(env);
  metrics_->count_send(kind, size);

  if (net_.partitioned(from, to, departAt)) {
    trace_->add(DropRec{departAt, from, to, static_cast<uint8_t>(kind), 1});
    metrics_->count_drop(1);
    return;
  }
  const LinkSpec& l = net_.link(from, to);
  SimTime lat = l.base;
  if (l.jitter > 0) lat += static_cast<SimTime>(netRng_.next_below(
      static_cast<uint64_t>(l.jitter) + 1));
  if (net_.dropProb > 0 && departAt < net_.gst &&
      netRng_.next_bernoulli(net_.dropProb)) {
    trace_->add(DropRec{departAt, from, to, static_cast<uint8_t>(kind), 0});
    metrics_->count_drop(0);
    return;
  }
  auto ev = std::make_unique<Event>();
  ev->time = departAt + lat;
  ev->seqno = nextSeqno_++;
  ev->kind = EvKind::kDeliver;
  ev->target = to;
  ev->env = env;
  push_event(std::move(ev));

  if (net_.dupProb > 0 && netRng_.next_bernoulli(net_.dupProb)) {
    SimTime lat2 = l.base;
    if (l.jitter > 0) lat2 += static_cast<SimTime>(netRng_.next_below(
        static_cast<uint64_t>(l.jitter) + 1));
    auto dup = std::make_unique<Event>();
    dup->time = departAt + lat2;
    dup->seqno = nextSeqno_++;
    dup->kind = EvKind::kDeliver;
    dup->target = to;
    dup->env = std::move(env);
    push_event(std::move(dup));
    metrics_->count_send(kind, size);
  }
}

SimTime Context::now() const { return net_->dispatchNow_; }

const Config& Context::config() const { return net_->config_; }

const SigningKey& Context::key() const { return self_->key(); }

void Context::send(const Identity& to, Message msg) {
  SigScheme scheme = expected_scheme(msg.kind());
  Envelope env = self_->key().sign(msg, scheme);
  net_->pending_.sends.push_back({to, std::move(env)});
}

void Context::send_forged(const Identity& to, Message msg,
                          const Identity& claimed) {
  SigScheme scheme = expected_scheme(msg.kind());
  Envelope env = self_->key().forge(msg, claimed, scheme);
  net_->pending_.sends.push_back({to, std::move(env)});
}

void Context::spawn_executor(ExecuteBody body) {
  net_->pending_.spawns.push_back({std::move(body)});
}

void Context::set_timer(const std::string& timerKey, SimTime delay) {
  uint64_t gen = ++net_->nextSeqno_;
  net_->timers_[{self_->id(), timerKey}] = gen;
  auto ev = std::make_unique<Simnet::Event>();
  ev->time = net_->dispatchNow_ + delay;
  ev->seqno = net_->nextSeqno_++;
  ev->kind = Simnet::EvKind::kTimerFire;
  ev->target = self_->id();
  ev->timerKey = timerKey;
  ev->timerGen = gen;
  net_->push_event(std::move(ev));
}

void Context::cancel_timer(const std::string& timerKey) {
  net_->timers_.erase({self_->id(), timerKey});
}

bool Context::timer_active(const std::string& timerKey) const {
  return net_->timers_.count({self_->id(), timerKey}) > 0;
}

void Context::schedule_step(SimTime delay, uint64_t token) {
  auto ev = std::make_unique<Simnet::Event>();
  ev->time = net_->dispatchNow_ + delay;
  ev->seqno = net_->nextSeqno_++;
  ev->kind = Simnet::EvKind::kStep;
  ev->target = self_->id();
  ev->stepToken = token;
  net_->push_event(std::move(ev));
}

void Context::charge_busy(SimTime d) { net_->busy_[self_->id()] += d; }

void Context::count_flood_drop(const Identity& from, MessageKind kind) {
  net_->trace_->add(DropRec{net_->dispatchNow_, from, self_->id(),
                            static_cast<uint8_t>(kind), 3});
  net_->metrics_->count_drop(3);
}

void Context::trace(TraceRecord rec) { net_->trace_->add(std::move(rec)); }

}  // namespace sbft
