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
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "sbft/codec.hpp"
#include "sbft/digest.hpp"
#include "sbft/ids.hpp"
#include "sbft/message.hpp"
#include "sbft/time.hpp"
#include "sbft/tx.hpp"

namespace sbft {

// Every record the simulator writes into the run trace. The binary trace is
// the determinism surface: two runs of the same scenario and seed must
// produce byte-identical traces. The audit monitors and the replay oracle
// read these records rather than poking at live component state.

enum class TraceTag : uint8_t {
  kEvent = 0,
  kDrop = 1,
  kCommit = 2,
  kSpawn = 3,
  kVerifierObs = 4,
  kApply = 5,
  kAbort = 6,
  kVcVote = 7,
  kNewView = 8,
  kCheckpoint = 9,
  kClientDone = 10,
  kNote = 11,
};

enum class EventType : uint8_t { kDeliver = 0, kTimer = 1, kStep = 2 };

struct EventRec {
  SimTime time = 0;
  uint64_t seqno = 0;
  Identity at;
  EventType etype = EventType::kDeliver;
  // Deliver fields
  uint8_t mkind = 0;
  Identity from;
  uint32_t sizeBytes = 0;
  // Timer key or step token rendered as text
  std::string detail;

  void encode(ByteWriter& w) const;
  static EventRec decode(ByteReader& r);
  std::string text() const;
};

struct DropRec {
  SimTime time = 0;
  Identity from;
  Identity to;
  uint8_t mkind = 0;
  uint8_t reason = 0;  // 0 policy loss, 1 partition, 2 adversary, 3 flood guard

  void encode(ByteWriter& w) const;
  static DropRec decode(ByteReader& r);
  std::string text() const;
};

struct CommitRec {
  SimTime time = 0;
  Identity node;
  uint64_t view = 0;
  uint64_t seq = 0;
  Digest digest;

  void encode(ByteWriter& w) const;
  static CommitRec decode(ByteReader& r);
  std::string text() const;
};

struct SpawnRec {
  SimTime time = 0;
  Identity spawner;
  Identity executor;
  uint64_t seq = 0;
  Digest digest;
  uint8_t behavior = 0;  // executor fault class, 0 = honest

  void encode(ByteWriter& w) const;
  static SpawnRec decode(ByteReader& r);
  std::string text() const;
};

// What the verifier can actually observe, in arrival order. `what`
// enumerates report arrival (aux = result class within the request),
// match, validation outcome, timer expiry (aux = reports so far) and the
// recovery decisions.
enum class VerifierEvent : uint8_t {
  kReport = 0,
  kMatched = 1,
  kApplied = 2,
  kStaleAborted = 3,
  kTimerExpired = 4,
  kDivergenceAborted = 5,
  kParked = 6,
  kReplaceSent = 7,
  kErrorSent = 8,
  kResent = 9,
};

struct VerifierObsRec {
  SimTime time = 0;
  Digest digest;
  VerifierEvent what = VerifierEvent::kReport;
  uint64_t aux = 0;

  void encode(ByteWriter& w) const;
  static VerifierObsRec decode(ByteReader& r);
  std::string text() const;
};

struct ApplyRec {
  SimTime time = 0;
  uint64_t seq = 0;
  Digest digest;
  std::vector<Transaction> txns;
  std::map<Key, Value> writes;

  void encode(ByteWriter& w) const;
  static ApplyRec decode(ByteReader& r);
  std::string text() const;
};

struct AbortRec {
  SimTime time = 0;
  uint64_t seq = 0;
  Digest digest;
  uint8_t reason = 0;  // 0 stale read, 1 divergence under timeout
  uint32_t txnCount = 0;

  void encode(ByteWriter& w) const;
  static AbortRec decode(ByteReader& r);
  std::string text() const;
};

struct VcVoteRec {
  SimTime time = 0;
  Identity node;
  uint64_t targetView = 0;

  void encode(ByteWriter& w) const;
  static VcVoteRec decode(ByteReader& r);
  std::string text() const;
};

struct NewViewRec {
  SimTime time = 0;
  Identity node;
  uint64_t view = 0;

  void encode(ByteWriter& w) const;
  static NewViewRec decode(ByteReader& r);
  std::string text() const;
};

struct CheckpointRec {
  SimTime time = 0;
  Identity node;
  uint64_t stableSeq = 0;
  Digest coverage;

  void encode(ByteWriter& w) const;
  static CheckpointRec decode(ByteReader& r);
  std::string text() const;
};

struct ClientDoneRec {
  SimTime time = 0;
  uint32_t client = 0;
  uint64_t nonce = 0;
  uint64_t value = 0;
  bool aborted = false;

  void encode(ByteWriter& w) const;
  static ClientDoneRec decode(ByteReader& r);
  std::string text() const;
};

struct NoteRec {
  SimTime time = 0;
  Identity at;
  std::string note;

  void encode(ByteWriter& w) const;
  static NoteRec decode(ByteReader& r);
  std::string text() const;
};

using TraceRecord =
    std::variant<EventRec, DropRec, CommitRec, SpawnRec, VerifierObsRec,
                 ApplyRec, AbortRec, VcVoteRec, NewViewRec, CheckpointRec,
                 ClientDoneRec, NoteRec>;

class Trace {
 public:
  void add(TraceRecord rec) { records_.push_back(std::move(rec)); }

  const std::vector<TraceRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }

  std::vector<uint8_t> serialize() const;
  static std::vector<TraceRecord> deserialize(const std::vector<uint8_t>& bytes);

  std::string render_text() const;
  Digest content_digest() const;

  void save_binary(const std::string& path) const;
  void save_text(const std::string& path) const;
  static std::vector<TraceRecord> load_binary(const std::string& path);

 private:
  std::vector<TraceRecord> records_;
};

}  // namespace sbft
