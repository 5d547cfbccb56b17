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

#include "sbft/trace.hpp"

#include <fmt/format.h>

#include <fstream>

namespace sbft {

namespace {

const char* verifier_event_name(VerifierEvent e) {
  switch (e) {
    case VerifierEvent::kReport: return "report";
    case VerifierEvent::kMatched: return "matched";
    case VerifierEvent::kApplied: return "applied";
    case VerifierEvent::kStaleAborted: return "stale-aborted";
    case VerifierEvent::kTimerExpired: return "timer-expired";
    case VerifierEvent::kDivergenceAborted: return "divergence-aborted";
    case VerifierEvent::kParked: return "parked";
    case VerifierEvent::kReplaceSent: return "replace-sent";
    case VerifierEvent::kErrorSent: return "error-sent";
    case VerifierEvent::kResent: return "resent";
  }
  return "?";
}

}  // namespace

void EventRec::encode(ByteWriter& w) const {
  w.i64(time);
  w.u64(seqno);
  at.encode(w);
  w.u8(static_cast<uint8_t>(etype));
  w.u8(mkind);
  from.encode(w);
  w.u32(sizeBytes);
  w.str(detail);
}

EventRec EventRec::decode(ByteReader& r) {
  EventRec e;
  e.time = r.i64();
  e.seqno = r.u64();
  e.at = Identity::decode(r);
  e.etype = static_cast<EventType>(r.u8());
  e.mkind = r.u8();
  e.from = Identity::decode(r);
  e.sizeBytes = r.u32();
  e.detail = r.str();
  return e;
}

std::string EventRec::text() const {
  switch (etype) {
    case EventType::kDeliver:
      return fmt::format("{:>10} #{:<6} {} <- {} {} ({}B)", time, seqno,
                         at.str(), from.str(),
                         message_kind_name(static_cast<MessageKind>(mkind)),
                         sizeBytes);
    case EventType::kTimer:
      return fmt::format("{:>10} #{:<6} {} timer {}", time, seqno, at.str(),
                         detail);
    case EventType::kStep:
      return fmt::format("{:>10} #{:<6} {} step {}", time, seqno, at.str(),
                         detail);
  }
  return "?";
}

void DropRec::encode(ByteWriter& w) const {
  w.i64(time);
  from.encode(w);
  to.encode(w);
  w.u8(mkind);
  w.u8(reason);
}

DropRec DropRec::decode(ByteReader& r) {
  DropRec d;
  d.time = r.i64();
  d.from = Identity::decode(r);
  d.to = Identity::decode(r);
  d.mkind = r.u8();
  d.reason = r.u8();
  return d;
}

std::string DropRec::text() const {
  static const char* reasons[] = {"loss", "partition", "adversary", "flood"};
  return fmt::format("{:>10} drop {} -> {} {} ({})", time, from.str(), to.str(),
                     message_kind_name(static_cast<MessageKind>(mkind)),
                     reasons[reason < 4 ? reason : 0]);
}

void CommitRec::encode(ByteWriter& w) const {
  w.i64(time);
  node.encode(w);
  w.u64(view);
  w.u64(seq);
  digest.encode(w);
}

CommitRec CommitRec::decode(ByteReader& r) {
  CommitRec c;
  c.time = r.i64();
  c.node = Identity::decode(r);
  c.view = r.u64();
  c.seq = r.u64();
  c.digest = Digest::decode(r);
  return c;
}

std::string CommitRec::text() const {
  return fmt::format("{:>10} commit {} v{} seq{} {}", time, node.str(), view,
                     seq, digest.short_hex());
}

void SpawnRec::encode(ByteWriter& w) const {
  w.i64(time);
  spawner.encode(w);
  executor.encode(w);
  w.u64(seq);
  digest.encode(w);
  w.u8(behavior);
}

SpawnRec SpawnRec::decode(ByteReader& r) {
  SpawnRec s;
  s.time = r.i64();
  s.spawner = Identity::decode(r);
  s.executor = Identity::decode(r);
  s.seq = r.u64();
  s.digest = Digest::decode(r);
  s.behavior = r.u8();
  return s;
}

std::string SpawnRec::text() const {
  return fmt::format("{:>10} spawn {} -> {} seq{} {} b{}", time, spawner.str(),
                     executor.str(), seq, digest.short_hex(), behavior);
}

void VerifierObsRec::encode(ByteWriter& w) const {
  w.i64(time);
  digest.encode(w);
  w.u8(static_cast<uint8_t>(what));
  w.u64(aux);
}

VerifierObsRec VerifierObsRec::decode(ByteReader& r) {
  VerifierObsRec v;
  v.time = r.i64();
  v.digest = Digest::decode(r);
  v.what = static_cast<VerifierEvent>(r.u8());
  v.aux = r.u64();
  return v;
}

std::string VerifierObsRec::text() const {
  return fmt::format("{:>10} verifier {} {} aux{}", time, digest.short_hex(),
                     verifier_event_name(what), aux);
}

void ApplyRec::encode(ByteWriter& w) const {
  w.i64(time);
  w.u64(seq);
  digest.encode(w);
  w.seq(txns);
  w.kvmap(writes);
}

ApplyRec ApplyRec::decode(ByteReader& r) {
  ApplyRec a;
  a.time = r.i64();
  a.seq = r.u64();
  a.digest = Digest::decode(r);
  uint32_t n = r.u32();
  a.txns.reserve(n);
  for (uint32_t i = 0; i < n; ++i) a.txns.push_back(Transaction::decode(r));
  uint32_t m = r.u32();
  for (uint32_t i = 0; i < m; ++i) {
    Key k = r.u64();
    Value v = r.u64();
    a.writes.emplace(k, v);
  }
  return a;
}

std::string ApplyRec::text() const {
  return fmt::format("{:>10} apply seq{} {} txns={} writes={}", time, seq,
                     digest.short_hex(), txns.size(), writes.size());
}

void AbortRec::encode(ByteWriter& w) const {
  w.i64(time);
  w.u64(seq);
  digest.encode(w);
  w.u8(reason);
  w.u32(txnCount);
}

AbortRec AbortRec::decode(ByteReader& r) {
  AbortRec a;
  a.time = r.i64();
  a.seq = r.u64();
  a.digest = Digest::decode(r);
  a.reason = r.u8();
  a.txnCount = r.u32();
  return a;
}

std::string AbortRec::text() const {
  return fmt::format("{:>10} abort seq{} {} reason{} txns={}", time, seq,
                     digest.short_hex(), reason, txnCount);
}

void VcVoteRec::encode(ByteWriter& w) const {
  w.i64(time);
  node.encode(w);
  w.u64(targetView);
}

VcVoteRec VcVoteRec::decode(ByteReader& r) {
  VcVoteRec v;
  v.time = r.i64();
  v.node = Identity::decode(r);
  v.targetView = r.u64();
  return v;
}

std::string VcVoteRec::text() const {
  return fmt::format("{:>10} vc-vote {} -> v{}", time, node.str(), targetView);
}

void NewViewRec::encode(ByteWriter& w) const {
  w.i64(time);
  node.encode(w);
  w.u64(view);
}

NewViewRec NewViewRec::decode(ByteReader& r) {
  NewViewRec n;
  n.time = r.i64();
  n.node = Identity::decode(r);
  n.view = r.u64();
  return n;
}

std::string NewViewRec::text() const {
  return fmt::format("{:>10} new-view {} v{}", time, node.str(), view);
}

void CheckpointRec::encode(ByteWriter& w) const {
  w.i64(time);
  node.encode(w);
  w.u64(stableSeq);
  coverage.encode(w);
}

CheckpointRec CheckpointRec::decode(ByteReader& r) {
  CheckpointRec c;
  c.time = r.i64();
  c.node = Identity::decode(r);
  c.stableSeq = r.u64();
  c.coverage = Digest::decode(r);
  return c;
}

std::string CheckpointRec::text() const {
  return fmt::format("{:>10} checkpoint {} stable seq{} {}", time, node.str(),
                     stableSeq, coverage.short_hex());
}

void ClientDoneRec::encode(ByteWriter& w) const {
  w.i64(time);
  w.u32(client);
  w.u64(nonce);
  w.u64(value);
  w.boolean(aborted);
}

ClientDoneRec ClientDoneRec::decode(ByteReader& r) {
  ClientDoneRec c;
  c.time = r.i64();
  c.client = r.u32();
  c.nonce = r.u64();
  c.value = r.u64();
  c.aborted = r.boolean();
  return c;
}

std::string ClientDoneRec::text() const {
  return fmt::format("{:>10} client{} nonce{} {} value={:x}", time, client,
                     nonce, aborted ? "aborted" : "done", value);
}

void NoteRec::encode(ByteWriter& w) const {
  w.i64(time);
  at.encode(w);
  w.str(note);
}

NoteRec NoteRec::decode(ByteReader& r) {
  NoteRec n;
  n.time = r.i64();
  n.at = Identity::decode(r);
  n.note = r.str();
  return n;
}

std::string NoteRec::text() const {
  return fmt::format("{:>10} note {} {}", time, at.str(), note);
}

std::vector<uint8_t> Trace::serialize() const {
  ByteWriter w;
  w.u32(static_cast<uint32_t>(records_.size()));
  for (const auto& rec : records_) {
    w.u8(static_cast<uint8_t>(rec.index()));
    std::visit([&w](const auto& r) { r.encode(w); }, rec);
  }
  return w.take();
}

std::vector<TraceRecord> Trace::deserialize(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  uint32_t n = r.u32();
  std::vector<TraceRecord> out;
  out.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    auto tag = static_cast<TraceTag>(r.u8());
    switch (tag) {
      case TraceTag::kEvent: out.push_back(EventRec::decode(r)); break;
      case TraceTag::kDrop: out.push_back(DropRec::decode(r)); break;
      case TraceTag::kCommit: out.push_back(CommitRec::decode(r)); break;
      case TraceTag::kSpawn: out.push_back(SpawnRec::decode(r)); break;
      case TraceTag::kVerifierObs: out.push_back(VerifierObsRec::decode(r)); break;
      case TraceTag::kApply: out.push_back(ApplyRec::decode(r)); break;
      case TraceTag::kAbort: out.push_back(AbortRec::decode(r)); break;
      case TraceTag::kVcVote: out.push_back(VcVoteRec::decode(r)); break;
      case TraceTag::kNewView: out.push_back(NewViewRec::decode(r)); break;
      case TraceTag::kCheckpoint: out.push_back(CheckpointRec::decode(r)); break;
      case TraceTag::kClientDone: out.push_back(ClientDoneRec::decode(r)); break;
      case TraceTag::kNote: out.push_back(NoteRec::decode(r)); break;
      default: throw CodecError("unknown trace record tag");
    }
  }
  return out;
}

std::string Trace::render_text() const {
  std::string out;
  for (const auto& rec : records_) {
    out += std::visit([](const auto& r) { return r.text(); }, rec);
    out += '\n';
  }
  return out;
}

Digest Trace::content_digest() const { return digest_bytes(serialize()); }

void Trace::save_binary(const std::string& path) const {
  auto bytes = serialize();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

void Trace::save_text(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << render_text();
}

std::vector<TraceRecord> Trace::load_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace sbft
