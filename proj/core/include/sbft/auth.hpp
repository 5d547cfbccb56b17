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
#include <set>
#include <utility>

#include "sbft/codec.hpp"
#include "sbft/digest.hpp"
#include "sbft/ids.hpp"

namespace sbft {

// Authentication scheme attached to a message. MACs authenticate a channel
// cheaply; digital signatures additionally let third parties check who
// produced a message, which is what commit certificates rely on.
enum class SigScheme : uint8_t { kNone = 0, kMac = 1, kDs = 2 };

// Modeled signature wrapper. `valid` stands in for signature verification:
// only SigningKey::sign produces valid=true, and every such call is entered
// into the run's audit log. A forged wrapper can imitate everything about a
// victim's message except validity, matching the standard assumption that
// signatures cannot be fabricated.
template <typename T>
struct Signed {
  T payload{};
  Identity signer;
  SigScheme scheme = SigScheme::kDs;
  bool valid = false;
  Digest integrity;  // digest of payload bytes at signing time

  void encode(ByteWriter& w) const {
    payload.encode(w);
    signer.encode(w);
    w.u8(static_cast<uint8_t>(scheme));
    w.boolean(valid);
    integrity.encode(w);
  }
};

// Run-wide record of every legitimately issued signature. The forgery
// monitor cross-checks any valid wrapper observed anywhere in a run
// against this log.
class AuthAudit {
 public:
  void record(const Identity& signer, const Digest& d) {
    issued_.insert({signer, d});
    ++signs_;
  }
  bool was_issued(const Identity& signer, const Digest& d) const {
    return issued_.count({signer, d}) > 0;
  }
  uint64_t sign_count() const { return signs_; }

 private:
  std::set<std::pair<Identity, Digest>> issued_;
  uint64_t signs_ = 0;
};

class SigningKey {
 public:
  SigningKey() = default;
  SigningKey(Identity me, AuthAudit* audit) : me_(me), audit_(audit) {}

  Identity id() const { return me_; }

  template <typename T>
  Signed<T> sign(const T& payload, SigScheme scheme) const {
    Digest d = digest_of(payload);
    if (audit_) audit_->record(me_, d);
    return Signed<T>{payload, me_, scheme, true, d};
  }

  // Produces a wrapper claiming to be from `victim`. It carries the right
  // bytes but can never pass verification.
  template <typename T>
  Signed<T> forge(const T& payload, Identity victim, SigScheme scheme) const {
    return Signed<T>{payload, victim, scheme, false, digest_of(payload)};
  }

 private:
  Identity me_;
  AuthAudit* audit_ = nullptr;
};

template <typename T>
bool verify_signed(const Signed<T>& s) {
  return s.valid && digest_of(s.payload) == s.integrity;
}

}  // namespace sbft
