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

#include <compare>
#include <cstdint>
#include <string>

#include "sbft/codec.hpp"

namespace sbft {

enum class Role : uint8_t {
  kClient = 0,
  kShimNode = 1,
  kExecutor = 2,
  kVerifier = 3,
  kStorage = 4,
  kGateway = 5,  // stand-in ingress used by the no-consensus baseline
};

const char* role_name(Role r);

// Stable identity of a simulated participant. Executors are minted during a
// run and get fresh indices from a per-run counter.
struct Identity {
  Role role = Role::kClient;
  uint32_t index = 0;

  auto operator<=>(const Identity&) const = default;
  std::string str() const;

  void encode(ByteWriter& w) const {
    w.u8(static_cast<uint8_t>(role));
    w.u32(index);
  }
  static Identity decode(ByteReader& r) {
    Identity id;
    id.role = static_cast<Role>(r.u8());
    id.index = r.u32();
    return id;
  }
};

inline Identity client_id(uint32_t i) { return {Role::kClient, i}; }
inline Identity node_id(uint32_t i) { return {Role::kShimNode, i}; }
inline Identity executor_id(uint32_t i) { return {Role::kExecutor, i}; }
inline Identity verifier_id() { return {Role::kVerifier, 0}; }
inline Identity storage_id() { return {Role::kStorage, 0}; }
inline Identity gateway_id() { return {Role::kGateway, 0}; }

}  // namespace sbft
