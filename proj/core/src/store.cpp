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

#include "radial/store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "radial/error.hpp"

namespace radial {

namespace {

constexpr std::size_t kHeaderSize = 4 + 2 + 4 + 8 + 1;

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>(static_cast<unsigned char>(value >> (8 * i))));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  template <typename U>
  U get_le(const char* what) {
    need(sizeof(U), what);
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      value |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return value;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::kTruncatedFile,
                  std::string("file ends while reading ") + what + " (need " + std::to_string(n) +
                      " bytes, have " + std::to_string(remaining()) + ")",
                  Location{.byte_offset = pos_});
    }
  }

 private:
  std::string_view bytes_;
  std::uint64_t pos_ = 0;
};

}  // namespace

void EmbeddingTable::check_vector(std::string_view key, const Vector& values) const {
  if (values.size() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "key '" + std::string(key) + "' has dimension " + std::to_string(values.size()) +
                    ", table has " + std::to_string(dimension_),
                Location{.key = std::string(key)});
  }
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFiniteValue, "key '" + std::string(key) + "' has a non-finite value",
                  Location{.key = std::string(key)});
    }
  }
}

void EmbeddingTable::insert(std::string key, Vector values) {
  if (dimension_ == 0 && entries_.empty()) dimension_ = values.size();
  if (index_.contains(key)) {
    throw Error(ErrorCode::kDuplicateKey, "duplicate key '" + key + "'", Location{.key = key});
  }
  check_vector(key, values);
  index_.emplace(key, entries_.size());
  entries_.push_back(Embedding{std::move(key), std::move(values)});
}

void EmbeddingTable::assign(std::string_view key, Vector values) {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) {
    throw Error(ErrorCode::kKeyNotFound, "key '" + std::string(key) + "' not in table",
                Location{.key = std::string(key)});
  }
  check_vector(key, values);
  entries_[it->second].values = std::move(values);
}

bool EmbeddingTable::contains(std::string_view key) const {
  return index_.contains(std::string(key));
}

const Embedding& EmbeddingTable::entry(std::string_view key) const {
  auto it = index_.find(std::string(key));
  if (it == index_.end()) {
    throw Error(ErrorCode::kKeyNotFound, "key '" + std::string(key) + "' not in table",
                Location{.key = std::string(key)});
  }
  return entries_[it->second];
}

const Vector& EmbeddingTable::at(std::string_view key) const { return entry(key).values; }

std::string encode_store(const EmbeddingTable& table, DType dtype) {
  if (dtype != DType::kF32 && dtype != DType::kF64) {
    throw Error(ErrorCode::kInvalidArgument, "unknown dtype");
  }
  if (table.dimension() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot write a table of dimension 0");
  }
  std::string out;
  const std::size_t width = static_cast<std::size_t>(dtype);
  out.reserve(kHeaderSize + table.size() * (8 + table.dimension() * width));
  out.append(kStoreMagic);
  put_le<std::uint16_t>(out, kStoreVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(table.dimension()));
  put_le<std::uint64_t>(out, table.size());
  out.push_back(static_cast<char>(dtype));

  for (const auto& e : table.entries()) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.id.size()));
    out.append(e.id);
    for (double x : e.values) {
      if (dtype == DType::kF64) {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
      } else {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
      }
    }
  }
  return out;
}

StoreContents decode_store(std::string_view bytes) {
  Reader in(bytes);
  const std::string_view magic = in.take(4, "magic");
  if (magic != kStoreMagic) {
    throw Error(ErrorCode::kCorruptHeader, "bad magic bytes", Location{.byte_offset = 0});
  }
  const std::uint64_t version_at = in.offset();
  const auto version = in.get_le<std::uint16_t>("format version");
  if (version != kStoreVersion) {
    throw Error(ErrorCode::kCorruptHeader, "unsupported format version " + std::to_string(version),
                Location{.byte_offset = version_at});
  }
  const std::uint64_t dim_at = in.offset();
  const auto dimension = in.get_le<std::uint32_t>("dimension");
  if (dimension == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "declared dimension is 0",
                Location{.byte_offset = dim_at});
  }
  const auto count = in.get_le<std::uint64_t>("record count");
  const std::uint64_t dtype_at = in.offset();
  const auto tag = in.get_le<std::uint8_t>("dtype tag");
  if (tag != static_cast<std::uint8_t>(DType::kF32) && tag != static_cast<std::uint8_t>(DType::kF64)) {
    throw Error(ErrorCode::kCorruptHeader, "unknown dtype tag " + std::to_string(tag),
                Location{.byte_offset = dtype_at});
  }
  const auto dtype = static_cast<DType>(tag);
  const std::size_t width = dtype == DType::kF64 ? 8 : 4;

  StoreContents out;
  out.dtype = dtype;
  out.table = EmbeddingTable(dimension);
  for (std::uint64_t r = 0; r < count; ++r) {
    const std::uint64_t record_at = in.offset();
    const auto key_len = in.get_le<std::uint32_t>("key length");
    std::string key(in.take(key_len, "key"));
    // Check the payload exists before allocating for a possibly bogus dimension.
    in.need(static_cast<std::size_t>(dimension) * width, "vector payload");
    Vector values(dimension);
    for (auto& x : values) {
      x = dtype == DType::kF64
              ? std::bit_cast<double>(in.get_le<std::uint64_t>("vector payload"))
              : static_cast<double>(std::bit_cast<float>(in.get_le<std::uint32_t>("vector payload")));
    }
    try {
      out.table.insert(std::move(key), std::move(values));
    } catch (const Error& e) {
      Location loc = e.location();
      loc.byte_offset = record_at;
      throw Error(e.code(), "record " + std::to_string(r) + ": " + e.what(), loc);
    }
  }
  if (in.remaining() != 0) {
    throw Error(ErrorCode::kCorruptHeader,
                "declared count " + std::to_string(count) + " leaves " +
                    std::to_string(in.remaining()) + " trailing bytes",
                Location{.byte_offset = in.offset()});
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIoError, "cannot open '" + tmp.string() + "' for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!f) {
      f.close();
      std::filesystem::remove(tmp);
      throw Error(ErrorCode::kIoError, "short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::kIoError, "cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

void write_store(const std::filesystem::path& path, const EmbeddingTable& table, DType dtype) {
  write_file_atomic(path, encode_store(table, dtype));
}

StoreContents read_store(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIoError, "cannot open store '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_store(bytes);
}

}  // namespace radial
