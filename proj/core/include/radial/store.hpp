// Copyright 2026 The Radial Authors.
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

// Keyed embedding tables and the "REMB" binary store format.
//
// Layout (all integers and floats little-endian):
//
//   offset  size  field
//   0       4     magic "REMB"
//   4       2     format version (u16, currently 1)
//   6       4     dimension d (u32, >= 1)
//   10      8     record count n (u64)
//   18      1     dtype tag: 4 = f32, 8 = f64
//   19      ...   n records, each:
//                   u32 key length L, L bytes of UTF-8 key,
//                   d values of the header dtype
//
// The empty key "" is reserved for the entailment root (the empty-string
// embedding). docs/store_format.md carries the same table with a worked
// example.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "radial/geometry.hpp"

namespace radial {

inline constexpr std::string_view kStoreMagic = "REMB";
inline constexpr std::uint16_t kStoreVersion = 1;
inline constexpr std::string_view kRootKey = "";

enum class DType : std::uint8_t { kF32 = 4, kF64 = 8 };

// Insertion-ordered key -> vector table with a fixed dimension.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Throws DuplicateKey, DimensionMismatch or NonFiniteValue. The first
  // insert into a dimensionless table fixes the dimension.
  void insert(std::string key, Vector values);
  // Replaces the vector of an existing key. Throws KeyNotFound.
  void assign(std::string_view key, Vector values);

  bool contains(std::string_view key) const;
  // Throws KeyNotFound naming the key.
  const Vector& at(std::string_view key) const;
  const Embedding& entry(std::string_view key) const;

  const std::vector<Embedding>& entries() const noexcept { return entries_; }

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.dimension_ == b.dimension_ && a.entries_.size() == b.entries_.size() &&
           std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                      [](const Embedding& x, const Embedding& y) {
                        return x.id == y.id && x.values == y.values;
                      });
  }

 private:
  void check_vector(std::string_view key, const Vector& values) const;

  std::size_t dimension_ = 0;
  std::vector<Embedding> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct StoreContents {
  EmbeddingTable table;
  DType dtype = DType::kF32;
};

// Serializes to the REMB byte layout. f32 payloads round to nearest.
std::string encode_store(const EmbeddingTable& table, DType dtype = DType::kF32);

// Parses REMB bytes. Throws CorruptHeader, TruncatedFile, DuplicateKey,
// DimensionMismatch or NonFiniteValue, each carrying the byte offset.
StoreContents decode_store(std::string_view bytes);

// Writes via a temporary file and rename, so a failed write never leaves a
// partial store at `path`.
void write_store(const std::filesystem::path& path, const EmbeddingTable& table,
                 DType dtype = DType::kF32);
StoreContents read_store(const std::filesystem::path& path);

// Atomic whole-file text/byte write shared by the checkpoint writers.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace radial
