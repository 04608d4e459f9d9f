// Copyright 2026 The cascadet Authors. All Rights Reserved.
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

// Named parameter storage and the ".cwts" archive format.
//
// Layout (all integers unsigned 32-bit little-endian, floats IEEE-754
// binary32 little-endian):
//
//   "CWTS"  version(=1)  entry_count
//   entry_count x { name_len  name_bytes  rank  extent[rank]  data[prod(extents)] }
//   crc32 of every preceding byte (zlib/IEEE polynomial)
//
// Metadata travels as an ordinary rank-1 entry named "__meta__" whose values
// are the bytes of "key=value\n" lines, one float per byte (0..255). It is
// written first and only when the metadata map is non-empty.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cascadet/error.hpp"
#include "cascadet/tensor.hpp"

namespace cascadet {

inline constexpr std::string_view kArchiveMagic = "CWTS";
inline constexpr std::uint32_t kArchiveVersion = 1;
inline constexpr std::string_view kMetaEntryName = "__meta__";

class WeightFormatError : public Error {
 public:
  enum class Kind { kIo, kBadMagic, kUnsupportedVersion, kChecksumMismatch, kTruncated, kMalformed };

  WeightFormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

const char* to_string(WeightFormatError::Kind kind);

class WeightArchive {
 public:
  using Entry = std::pair<std::string, Tensor>;

  // Appends an entry. Names must be unique, non-empty, printable ASCII, and
  // must not collide with the metadata entry.
  void add(std::string name, Tensor tensor);
  // Replaces the tensor of an existing entry; the shape must match.
  void replace(std::string_view name, Tensor tensor);

  const Tensor* find(std::string_view name) const;
  const Tensor& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::map<std::string, std::string>& metadata() noexcept { return metadata_; }
  const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }
  std::string meta_or(const std::string& key, std::string fallback) const;

  // Equal names, order, shapes, float bit patterns and metadata.
  bool bit_equal(const WeightArchive& other) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::map<std::string, std::string> metadata_;
};

std::vector<std::uint8_t> serialize(const WeightArchive& archive);
WeightArchive deserialize(std::span<const std::uint8_t> bytes);

void save(const WeightArchive& archive, const std::filesystem::path& path);
WeightArchive load(const std::filesystem::path& path);

// 64-bit linear congruential generator used for every seeded fixture:
//   state' = 6364136223846793005 * state + 1442695040888963407  (mod 2^64)
// next_unit() advances once and returns the top 24 bits of the new state
// scaled to [0, 1).
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = kMultiplier * state_ + kIncrement;
    return state_;
  }
  double next_unit() { return static_cast<double>(next() >> 40) / 16777216.0; }
  // Uniform in [lo, hi), evaluated in double and rounded to float.
  float uniform(double lo, double hi) { return static_cast<float>(lo + (hi - lo) * next_unit()); }
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return static_cast<std::uint64_t>(next_unit() * bound); }
  // Standard normal via Box-Muller; consumes two draws.
  double normal();

 private:
  std::uint64_t state_;
};

struct ParamSpec {
  std::string name;
  Shape shape;
};

// Fills every listed tensor, in order, from one Lcg64 stream seeded with
// `seed`; values are uniform in [-0.1, 0.1).
WeightArchive random_init(const std::vector<ParamSpec>& specs, std::uint64_t seed);

}  // namespace cascadet
