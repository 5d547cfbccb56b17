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

#include "sbft/storage.hpp"

#include <fstream>

#include "sbft/codec.hpp"

namespace sbft {

namespace {
constexpr uint64_t kSnapshotMagic = 0x53424654534e4150ULL;  // "SBFTSNAP"
}

std::pair<Value, Version> Storage::read(Key k) const {
  auto it = cells_.find(k);
  if (it == cells_.end()) return {initial_value(seed_, k), 0};
  return {it->second.value, it->second.version};
}

Version Storage::version(Key k) const {
  auto it = cells_.find(k);
  return it == cells_.end() ? 0 : it->second.version;
}

void Storage::apply(const Identity& caller, uint64_t seq,
                    const std::map<Key, Value>& writes) {
  if (caller.role != Role::kVerifier)
    throw StorageAccessError("write from " + caller.str() +
                             " rejected: only the verifier may apply");
  for (const auto& [k, v] : writes) {
    auto it = cells_.find(k);
    if (it == cells_.end()) {
      cells_[k] = Cell{v, 1};
    } else {
      it->second.value = v;
      it->second.version += 1;
    }
  }
  appliedSeqs_.push_back(seq);
}

Digest Storage::state_digest() const {
  ByteWriter w;
  w.u64(seed_);
  w.u64(keyspaceSize_);
  w.u32(static_cast<uint32_t>(cells_.size()));
  for (const auto& [k, c] : cells_) {
    w.u64(k);
    w.u64(c.value);
    w.u64(c.version);
  }
  return digest_bytes(w.data());
}

void Storage::save_snapshot(const std::string& path) const {
  ByteWriter w;
  w.u64(kSnapshotMagic);
  w.u64(keyspaceSize_);
  w.u64(seed_);
  w.u32(static_cast<uint32_t>(appliedSeqs_.size()));
  for (uint64_t seq : appliedSeqs_) w.u64(seq);
  w.u32(static_cast<uint32_t>(cells_.size()));
  for (const auto& [k, c] : cells_) {
    w.u64(k);
    w.u64(c.value);
    w.u64(c.version);
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  const auto& bytes = w.data();
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

Storage Storage::load_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  ByteReader r(bytes);
  if (r.u64() != kSnapshotMagic)
    throw std::runtime_error("not a storage snapshot: " + path);
  uint64_t keyspace = r.u64();
  uint64_t seed = r.u64();
  Storage s(seed, keyspace);
  uint32_t seqs = r.u32();
  s.appliedSeqs_.reserve(seqs);
  for (uint32_t i = 0; i < seqs; ++i) s.appliedSeqs_.push_back(r.u64());
  uint32_t n = r.u32();
  for (uint32_t i = 0; i < n; ++i) {
    Key k = r.u64();
    Cell c;
    c.value = r.u64();
    c.version = r.u64();
    s.cells_.emplace(k, c);
  }
  return s;
}

bool Storage::same_state(const Storage& other) const {
  if (seed_ != other.seed_ || keyspaceSize_ != other.keyspaceSize_)
    return false;
  if (cells_.size() != other.cells_.size()) return false;
  auto a = cells_.begin();
  auto b = other.cells_.begin();
  for (; a != cells_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.value != b->second.value ||
        a->second.version != b->second.version)
      return false;
  }
  return true;
}

}  // namespace sbft
