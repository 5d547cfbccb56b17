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
#include <optional>
#include <variant>
#include <vector>

#include "sbft/auth.hpp"
#include "sbft/codec.hpp"
#include "sbft/digest.hpp"
#include "sbft/ids.hpp"
#include "sbft/tx.hpp"

namespace sbft {

// Order must match the Message variant below.
enum class MessageKind : uint8_t {
  kClientRequest = 0,
  kPreprepare,
  kPrepare,
  kCommit,
  kExecute,
  kVerify,
  kResponse,
  kAbort,
  kError,
  kReplace,
  kAck,
  kViewChange,
  kNewView,
  kCheckpoint,
  kCftAccept,
  kCftAck,
};

const char* message_kind_name(MessageKind k);

// Unit of agreement: an ordered group of client transactions. An empty
// batch is the no-op filler installed for sequence gaps after a view
// change; it flows through execution and verification like any other
// batch and touches no keys.
struct Batch {
  std::vector<Signed<Transaction>> txns;

  bool noop() const { return txns.empty(); }
  void encode(ByteWriter& w) const { w.seq(txns); }
};

struct ClientRequestBody {
  Signed<Transaction> txn;
  void encode(ByteWriter& w) const { txn.encode(w); }
};

struct PreprepareBody {
  uint64_t view = 0;
  uint64_t seq = 0;
  Digest digest;  // digest of the batch
  Batch request;

  void encode(ByteWriter& w) const {
    w.u64(view);
    w.u64(seq);
    digest.encode(w);
    request.encode(w);
  }
};

struct PrepareBody {
  uint64_t view = 0;
  uint64_t seq = 0;
  Digest digest;

  void encode(ByteWriter& w) const {
    w.u64(view);
    w.u64(seq);
    digest.encode(w);
  }
};

struct CommitBody {
  uint64_t view = 0;
  uint64_t seq = 0;
  Digest digest;

  void encode(ByteWriter& w) const {
    w.u64(view);
    w.u64(seq);
    digest.encode(w);
  }
};

// Proof that a batch committed: matching commit attestations from a
// commit quorum of distinct nodes, each carrying a digital signature so
// that parties outside the shim can check it.
struct CommitCertificate {
  uint64_t view = 0;
  uint64_t seq = 0;
  Digest digest;
  std::vector<Signed<CommitBody>> attestations;

  void encode(ByteWriter& w) const {
    w.u64(view);
    w.u64(seq);
    digest.encode(w);
    w.seq(attestations);
  }
};

// Checks signature validity, field agreement and distinctness of signers
// against the required quorum size.
bool certificate_valid(const CommitCertificate& cert, uint32_t quorum);

struct ExecuteBody {
  Batch request;
  CommitCertificate cert;
  Signed<CommitBody> commit;  // the spawner's own attestation
  Digest digest;

  void encode(ByteWriter& w) const {
    request.encode(w);
    cert.encode(w);
    commit.encode(w);
    digest.encode(w);
  }
};

struct VerifyBody {
  Batch request;
  CommitCertificate cert;
  Signed<CommitBody> commit;
  RwSet rw;
  ExecResult result;
  Identity spawner;

  void encode(ByteWriter& w) const {
    request.encode(w);
    cert.encode(w);
    commit.encode(w);
    rw.encode(w);
    result.encode(w);
    spawner.encode(w);
  }
};

struct ResponseBody {
  uint64_t view = 0;
  uint64_t seq = 0;
  Digest digest;
  std::vector<TxnOutput> outputs;

  void encode(ByteWriter& w) const {
    w.u64(view);
    w.u64(seq);
    digest.encode(w);
    w.seq(outputs);
  }
};

struct AbortBody {
  Signed<Transaction> txn;
  uint64_t seq = 0;
  Digest batchDigest;

  void encode(ByteWriter& w) const {
    txn.encode(w);
    w.u64(seq);
    batchDigest.encode(w);
  }
};

enum class ErrorKind : uint8_t {
  kMissingBelow = 0,   // storage is ahead of or behind the shim: carries the
                       // verifier's next expected sequence number
  kUnknownRequest = 1, // client resubmitted a request the verifier never saw
};

struct ErrorBody {
  ErrorKind kind = ErrorKind::kMissingBelow;
  uint64_t kmax = 0;
  std::optional<Signed<Transaction>> txn;

  void encode(ByteWriter& w) const {
    w.u8(static_cast<uint8_t>(kind));
    w.u64(kmax);
    w.opt(txn);
  }
};

struct ReplaceBody {
  Signed<Transaction> txn;
  void encode(ByteWriter& w) const { txn.encode(w); }
};

struct AckBody {
  ErrorKind kind = ErrorKind::kMissingBelow;
  uint64_t kmax = 0;
  Digest reqDigest;

  void encode(ByteWriter& w) const {
    w.u8(static_cast<uint8_t>(kind));
    w.u64(kmax);
    reqDigest.encode(w);
  }
};

// Evidence that a batch reached the prepared state in some view: the
// batch itself plus a prepare quorum of signed prepare statements
// (the primary's counts via the prepare it broadcasts alongside its
// preprepare).
struct PreparedProof {
  uint64_t seq = 0;
  uint64_t view = 0;  // view in which the quorum formed
  Digest digest;
  Batch request;
  std::vector<Signed<PrepareBody>> prepares;

  void encode(ByteWriter& w) const {
    w.u64(seq);
    w.u64(view);
    digest.encode(w);
    request.encode(w);
    w.seq(prepares);
  }
};

struct ViewChangeBody {
  uint64_t newView = 0;
  uint64_t baseSeq = 0;  // sender's stable checkpoint
  std::vector<PreparedProof> proofs;

  void encode(ByteWriter& w) const {
    w.u64(newView);
    w.u64(baseSeq);
    w.seq(proofs);
  }
};

struct SeqAssignment {
  uint64_t seq = 0;
  Digest digest;
  Batch request;
  bool noop = false;
  std::vector<Signed<PrepareBody>> proof;  // empty for no-op fillers

  void encode(ByteWriter& w) const {
    w.u64(seq);
    digest.encode(w);
    request.encode(w);
    w.boolean(noop);
    w.seq(proof);
  }
};

// Carries the supporting view-change vote quorum so receivers can
// recompute the assignments themselves instead of trusting the new
// primary's word.
struct NewViewBody {
  uint64_t view = 0;
  uint64_t baseSeq = 0;
  std::vector<Signed<ViewChangeBody>> support;
  std::vector<SeqAssignment> assignments;

  void encode(ByteWriter& w) const {
    w.u64(view);
    w.u64(baseSeq);
    w.seq(support);
    w.seq(assignments);
  }
};

// Certificate-only checkpoint: the commit certificates covering a range
// of sequence numbers, no state transfer involved.
struct CheckpointBody {
  uint64_t fromSeq = 0;
  uint64_t toSeq = 0;
  Digest coverage;  // digest over (seq, batch digest) pairs in the range
  std::vector<CommitCertificate> certs;

  void encode(ByteWriter& w) const {
    w.u64(fromSeq);
    w.u64(toSeq);
    coverage.encode(w);
    w.seq(certs);
  }
};

// Crash-tolerant baseline: leader-assigned order with a majority ack.
struct CftAcceptBody {
  uint64_t seq = 0;
  Digest digest;
  Batch request;

  void encode(ByteWriter& w) const {
    w.u64(seq);
    digest.encode(w);
    request.encode(w);
  }
};

struct CftAckBody {
  uint64_t seq = 0;
  Digest digest;

  void encode(ByteWriter& w) const {
    w.u64(seq);
    digest.encode(w);
  }
};

struct Message {
  std::variant<ClientRequestBody, PreprepareBody, Signed<PrepareBody>,
               Signed<CommitBody>, ExecuteBody, VerifyBody, ResponseBody,
               AbortBody, ErrorBody, ReplaceBody, AckBody,
               Signed<ViewChangeBody>, NewViewBody, CheckpointBody,
               CftAcceptBody, CftAckBody>
      body;

  MessageKind kind() const { return static_cast<MessageKind>(body.index()); }

  template <typename T>
  const T& as() const {
    return std::get<T>(body);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(body);
  }

  void encode(ByteWriter& w) const;
};

// Transport unit. The wrapper authenticates the sender on the wire; bodies
// that must remain checkable by third parties (commit attestations, view
// change votes, prepare statements in proofs) are additionally signed
// inline.
using Envelope = Signed<Message>;

// Models wire footprint for metrics and service-time accounting. Sizes for
// ordering, execution and reply traffic scale with batch occupancy and
// certificate size; reference points at batch occupancy 100 match the
// measured deployment this simulator is calibrated against.
size_t wire_size(const Message& m);

inline size_t wire_size(const Envelope& e) { return wire_size(e.payload); }

// True when the wrapper's scheme matches the one expected for its kind
// (digital signatures where third-party checkability is needed, MACs for
// the cheap shim-internal ordering traffic).
SigScheme expected_scheme(MessageKind k);

}  // namespace sbft
