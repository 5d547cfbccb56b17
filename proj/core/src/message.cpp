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

#include "sbft/message.hpp"

#include <fmt/format.h>

#include <set>

namespace sbft {

const char* role_name(Role r) {
  switch (r) {
    case Role::kClient: return "client";
    case Role::kShimNode: return "node";
    case Role::kExecutor: return "exec";
    case Role::kVerifier: return "verifier";
    case Role::kStorage: return "storage";
    case Role::kGateway: return "gateway";
  }
  return "?";
}

std::string Identity::str() const {
  return fmt::format("{}{}", role_name(role), index);
}

const char* message_kind_name(MessageKind k) {
  switch (k) {
    case MessageKind::kClientRequest: return "ClientRequest";
    case MessageKind::kPreprepare: return "Preprepare";
    case MessageKind::kPrepare: return "Prepare";
    case MessageKind::kCommit: return "Commit";
    case MessageKind::kExecute: return "Execute";
    case MessageKind::kVerify: return "Verify";
    case MessageKind::kResponse: return "Response";
    case MessageKind::kAbort: return "Abort";
    case MessageKind::kError: return "Error";
    case MessageKind::kReplace: return "Replace";
    case MessageKind::kAck: return "Ack";
    case MessageKind::kViewChange: return "ViewChange";
    case MessageKind::kNewView: return "NewView";
    case MessageKind::kCheckpoint: return "Checkpoint";
    case MessageKind::kCftAccept: return "CftAccept";
    case MessageKind::kCftAck: return "CftAck";
  }
  return "?";
}

void Message::encode(ByteWriter& w) const {
  w.u8(static_cast<uint8_t>(kind()));
  std::visit([&w](const auto& b) { b.encode(w); }, body);
}

bool certificate_valid(const CommitCertificate& cert, uint32_t quorum) {
  if (cert.attestations.size() < quorum) return false;
  std::set<Identity> signers;
  for (const auto& att : cert.attestations) {
    if (!verify_signed(att)) return false;
    if (att.scheme != SigScheme::kDs) return false;
    if (att.signer.role != Role::kShimNode) return false;
    if (att.payload.view != cert.view || att.payload.seq != cert.seq ||
        att.payload.digest != cert.digest)
      return false;
    signers.insert(att.signer);
  }
  return signers.size() >= quorum;
}

namespace {

// Byte model for metrics and service times. Calibrated so that at batch
// occupancy 100 with a quorum of 3 the ordering, execution and reply
// messages land on their reference footprints (5392 / 216 / 220 / 3320 /
// 2270 bytes).
constexpr size_t kPerTxnOrdering = 50;   // signed txn inside a batch
constexpr size_t kPerTxnCompact = 30;    // txn forwarded to an executor
constexpr size_t kPerTxnReply = 20;      // per-txn output in a response
constexpr size_t kPerAttestation = 68;   // one signed commit statement
constexpr size_t kPerPrepareSig = 68;

size_t batch_count(const Batch& b) { return b.txns.size(); }

size_t proof_size(const PreparedProof& p) {
  return 48 + kPerTxnOrdering * batch_count(p.request) +
         kPerPrepareSig * p.prepares.size();
}

size_t viewchange_size(const ViewChangeBody& v) {
  size_t s = 100;
  for (const auto& p : v.proofs) s += proof_size(p);
  return s;
}

size_t cert_size(const CommitCertificate& c) {
  return 44 + kPerAttestation * c.attestations.size();
}

}  // namespace

size_t wire_size(const Message& m) {
  switch (m.kind()) {
    case MessageKind::kClientRequest:
      return 140;
    case MessageKind::kPreprepare: {
      const auto& b = m.as<PreprepareBody>();
      return 392 + kPerTxnOrdering * batch_count(b.request);
    }
    case MessageKind::kPrepare:
      return 216;
    case MessageKind::kCommit:
      return 220;
    case MessageKind::kExecute: {
      const auto& b = m.as<ExecuteBody>();
      return 116 + kPerTxnCompact * batch_count(b.request) +
             kPerAttestation * b.cert.attestations.size();
    }
    case MessageKind::kVerify: {
      const auto& b = m.as<VerifyBody>();
      return 116 + (kPerTxnCompact + 40) * batch_count(b.request) +
             kPerAttestation * b.cert.attestations.size() +
             16 * b.rw.reads.size() + 8 * b.rw.writes.size();
    }
    case MessageKind::kResponse: {
      const auto& b = m.as<ResponseBody>();
      return 270 + kPerTxnReply * b.outputs.size();
    }
    case MessageKind::kAbort:
      return 160;
    case MessageKind::kError:
      return 150;
    case MessageKind::kReplace:
      return 140;
    case MessageKind::kAck:
      return 60;
    case MessageKind::kViewChange:
      return viewchange_size(m.as<Signed<ViewChangeBody>>().payload);
    case MessageKind::kNewView: {
      const auto& b = m.as<NewViewBody>();
      size_t s = 100;
      for (const auto& vc : b.support) s += viewchange_size(vc.payload);
      for (const auto& a : b.assignments)
        s += 48 + kPerTxnOrdering * batch_count(a.request) +
             kPerPrepareSig * a.proof.size();
      return s;
    }
    case MessageKind::kCheckpoint: {
      const auto& b = m.as<CheckpointBody>();
      size_t s = 60;
      for (const auto& c : b.certs) s += cert_size(c);
      return s;
    }
    case MessageKind::kCftAccept: {
      const auto& b = m.as<CftAcceptBody>();
      return 60 + kPerTxnOrdering * batch_count(b.request);
    }
    case MessageKind::kCftAck:
      return 56;
  }
  return 64;
}

SigScheme expected_scheme(MessageKind k) {
  switch (k) {
    case MessageKind::kPreprepare:
    case MessageKind::kPrepare:
    case MessageKind::kCftAccept:
    case MessageKind::kCftAck:
      return SigScheme::kMac;
    default:
      return SigScheme::kDs;
  }
}

}  // namespace sbft
