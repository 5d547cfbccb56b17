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

#include "sbft/tx.hpp"

#include <algorithm>

namespace sbft {

Op Op::decode(ByteReader& r) {
  Op op;
  op.kind = static_cast<OpKind>(r.u8());
  op.key = r.u64();
  op.arg = r.u64();
  return op;
}

Transaction Transaction::decode(ByteReader& r) {
  Transaction t;
  t.client = r.u32();
  t.nonce = r.u64();
  uint32_t n = r.u32();
  t.ops.reserve(n);
  for (uint32_t i = 0; i < n; ++i) t.ops.push_back(Op::decode(r));
  return t;
}

std::set<Key> Transaction::read_keys() const {
  std::set<Key> out;
  for (const auto& op : ops)
    if (op.kind == OpKind::kRead) out.insert(op.key);
  return out;
}

std::set<Key> Transaction::write_keys() const {
  std::set<Key> out;
  for (const auto& op : ops)
    if (op.kind == OpKind::kWrite) out.insert(op.key);
  return out;
}

void RwSet::add_read(Key k, Version v) {
  // First read of a key fixes the version the transaction depends on.
  reads.emplace(k, v);
}

void RwSet::add_write(Key k) {
  auto it = std::lower_bound(writes.begin(), writes.end(), k);
  if (it == writes.end() || *it != k) writes.insert(it, k);
}

}  // namespace sbft
