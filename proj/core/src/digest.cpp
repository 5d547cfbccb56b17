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

#include "sbft/digest.hpp"

#include <fmt/format.h>

namespace sbft {

namespace {

constexpr uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr uint64_t kOffsetLo = 0xcbf29ce484222325ULL;
constexpr uint64_t kOffsetHi = 0x6c62272e07bb0142ULL;

uint64_t avalanche(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

}  // namespace

Digest digest_bytes(const std::vector<uint8_t>& bytes) {
  uint64_t lo = kOffsetLo;
  uint64_t hi = kOffsetHi;
  for (uint8_t b : bytes) {
    lo = (lo ^ b) * kFnvPrime;
    hi = (hi ^ (b + 0x9eULL)) * kFnvPrime;
  }
  // Finalization guards short inputs and makes the lanes independent.
  Digest d;
  d.lo = avalanche(lo ^ (bytes.size() * 0x9e3779b97f4a7c15ULL));
  d.hi = avalanche(hi + 0x165667b19e3779f9ULL * (bytes.size() + 1));
  return d;
}

uint64_t mix64(uint64_t a, uint64_t b) {
  return avalanche(a * 0x9e3779b97f4a7c15ULL + b + 0x165667b19e3779f9ULL);
}

std::string Digest::hex() const { return fmt::format("{:016x}{:016x}", hi, lo); }

std::string Digest::short_hex() const {
  return fmt::format("{:016x}{:016x}", hi, lo).substr(0, 12);
}

}  // namespace sbft
