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
#include <set>
#include <string>
#include <vector>

#include "sbft/auth.hpp"
#include "sbft/config.hpp"
#include "sbft/message.hpp"
#include "sbft/oracle.hpp"
#include "sbft/trace.hpp"

namespace sbft {

// Post-run verdicts plus extracted facts that scenario assertions build on.
struct MonitorFindings {
  bool ok = true;
  uint64_t violationCount = 0;
  std::vector<std::string> violations;  // first few, for diagnostics

  // Facts, not verdicts.
  std::map<uint64_t, std::set<uint32_t>> vcVotesByView;
  std::map<uint32_t, uint64_t> viewInstalledByNode;
  uint64_t maxViewInstalled = 0;
  uint64_t newViewCount = 0;
  uint64_t applyCount = 0;
  uint64_t abortCount = 0;
  std::map<uint32_t, uint64_t> stableSeqByNode;
  std::map<uint64_t, Digest> committedDigestBySeq;

  void flag(std::string what);

  std::string summary() const;
};

// Wire tap fed by the engine's delivery observer. Checks that every
// wrapper claiming validity, including the ones nested inside certificates
// and view change proofs, corresponds to a signature the audit log shows
// was actually issued by its claimed signer.
class WireAuditor {
 public:
  explicit WireAuditor(const AuthAudit* audit) : audit_(audit) {}

  void observe(const Envelope& env, const Identity& to, SimTime now);

  bool ok() const { return violations_.empty(); }
  uint64_t envelopes_seen() const { return seen_; }
  uint64_t equivocation_sightings() const { return equivocations_; }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  template <typename T>
  void check_issued(const Signed<T>& s, const char* what, SimTime now);

  const AuthAudit* audit_;
  uint64_t seen_ = 0;
  uint64_t equivocations_ = 0;
  std::vector<std::string> violations_;
  // (signer, view, seq) -> proposal digest, for equivocation sighting
  std::map<std::tuple<Identity, uint64_t, uint64_t>, Digest> proposals_;
};

// Safety invariants every run must satisfy regardless of fault script:
// agreement on what committed at each height, gap-free apply order, no
// height both applied and aborted, one decision per transaction, matching
// checkpoint coverage.
MonitorFindings check_invariants(const std::vector<TraceRecord>& trace,
                                 const Config& cfg);

// End-to-end value check: every committed client decision must carry the
// value the replay oracle computes for that transaction, and a transaction
// reported aborted must not appear in the applied record.
void cross_check_clients(const std::vector<TraceRecord>& trace,
                         const OracleReport& oracle, MonitorFindings& f);

}  // namespace sbft
