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
#include <cstring>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbft {

// Canonical byte encoding used for digests, signing, trace files and
// snapshots. Fixed-width little-endian integers, u32 length prefixes for
// strings/blobs/sequences, map entries emitted in key order. Two equal
// values always produce identical bytes, which is what makes digest
// comparison a sound stand-in for structural equality.
class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) { put_le(v); }
  void u32(uint32_t v) { put_le(v); }
  void u64(uint64_t v) { put_le(v); }
  void i64(int64_t v) { put_le(static_cast<uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }

  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void bytes(const std::vector<uint8_t>& b) {
    u32(static_cast<uint32_t>(b.size()));
    buf_.insert(buf_.end(), b.begin(), b.end());
  }

  template <typename T>
  void obj(const T& v) {
    v.encode(*this);
  }

  template <typename T>
  void seq(const std::vector<T>& items) {
    u32(static_cast<uint32_t>(items.size()));
    for (const auto& it : items) encode_one(it);
  }

  template <typename K, typename V>
  void kvmap(const std::map<K, V>& m) {
    u32(static_cast<uint32_t>(m.size()));
    for (const auto& [k, v] : m) {
      encode_one(k);
      encode_one(v);
    }
  }

  template <typename T>
  void opt(const std::optional<T>& v) {
    boolean(v.has_value());
    if (v) encode_one(*v);
  }

  const std::vector<uint8_t>& data() const { return buf_; }
  std::vector<uint8_t> take() { return std::move(buf_); }
  size_t size() const { return buf_.size(); }

 private:
  template <typename T>
  void encode_one(const T& v) {
    if constexpr (std::is_same_v<T, uint8_t>) {
      u8(v);
    } else if constexpr (std::is_same_v<T, uint32_t>) {
      u32(v);
    } else if constexpr (std::is_same_v<T, uint64_t>) {
      u64(v);
    } else if constexpr (std::is_same_v<T, int64_t>) {
      i64(v);
    } else if constexpr (std::is_same_v<T, bool>) {
      boolean(v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      str(v);
    } else {
      v.encode(*this);
    }
  }

  template <typename T>
  void put_le(T v) {
    for (size_t i = 0; i < sizeof(T); ++i)
      buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  std::vector<uint8_t> buf_;
};

class CodecError : public std::runtime_error {
 public:
  explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<uint8_t>& buf) : buf_(buf) {}

  uint8_t u8() { return take_le<uint8_t>(); }
  uint16_t u16() { return take_le<uint16_t>(); }
  uint32_t u32() { return take_le<uint32_t>(); }
  uint64_t u64() { return take_le<uint64_t>(); }
  int64_t i64() { return static_cast<int64_t>(take_le<uint64_t>()); }
  bool boolean() { return u8() != 0; }

  std::string str() {
    uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<uint8_t> bytes() {
    uint32_t n = u32();
    need(n);
    std::vector<uint8_t> b(buf_.begin() + pos_, buf_.begin() + pos_ + n);
    pos_ += n;
    return b;
  }

  bool done() const { return pos_ == buf_.size(); }
  size_t remaining() const { return buf_.size() - pos_; }

 private:
  template <typename T>
  T take_le() {
    need(sizeof(T));
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<T>(static_cast<T>(buf_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  void need(size_t n) {
    if (pos_ + n > buf_.size()) throw CodecError("byte reader underrun");
  }

  const std::vector<uint8_t>& buf_;
  size_t pos_ = 0;
};

template <typename T>
std::vector<uint8_t> encode_bytes(const T& v) {
  ByteWriter w;
  v.encode(w);
  return w.take();
}

}  // namespace sbft
