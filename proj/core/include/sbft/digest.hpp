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
#include <vector>

#include "sbft/codec.hpp"

namespace sbft {

// 128-bit content digest. Not cryptographic; collision resistance at
// simulation scale is enforced by a run-wide collision monitor instead.
struct Digest {
  uint64_t lo = 0;
  uint64_t hi = 0;

  auto operator<=>(const Digest&) const = default;
  bool zero() const { return lo == 0 && hi == 0; }
  std::string hex() const;
  std::string short_hex() const;  // first 12 hex chars, for traces

  void encode(ByteWriter& w) const {
    w.u64(lo);
    w.u64(hi);
  }
  static Digest decode(ByteReader& r) {
    Digest d;
    d.lo = r.u64();
    d.hi = r.u64();
    return d;
  }
};

Digest digest_bytes(const std::vector<uint8_t>& bytes);

template <typename T>
Digest digest_of(const T& v) {
  return digest_bytes(encode_bytes(v));
}

// Mixes two 64-bit values into one; used for synthetic record contents so
// that a value depends on everything that went into producing it.
uint64_t mix64(uint64_t a, uint64_t b);

}  // namespace sbft
