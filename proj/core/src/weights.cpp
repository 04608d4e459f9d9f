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

#include "cascadet/weights.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cascadet {
namespace {

static_assert(std::endian::native == std::endian::little,
              "archive I/O assumes a little-endian host");

bool valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
           return ch >= 0x21 && ch <= 0x7e;
         });
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for archives above 4 GiB.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - offset, 1u << 30);
    crc = crc32(crc, bytes.data() + offset, static_cast<uInt>(chunk));
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_entry(std::vector<std::uint8_t>& out, std::string_view name, const Tensor& t) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out.insert(out.end(), name.begin(), name.end());
  put_u32(out, static_cast<std::uint32_t>(t.shape().rank()));
  for (int e : t.shape().extents()) put_u32(out, static_cast<std::uint32_t>(e));
  const auto* raw = reinterpret_cast<const std::uint8_t*>(t.data().data());
  out.insert(out.end(), raw, raw + t.size() * sizeof(float));
}

Tensor encode_metadata(const std::map<std::string, std::string>& meta) {
  std::string text;
  for (const auto& [k, v] : meta) text += k + "=" + v + "\n";
  std::vector<float> values(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) values[i] = static_cast<unsigned char>(text[i]);
  return Tensor::vector(std::move(values));
}

std::map<std::string, std::string> decode_metadata(const Tensor& t) {
  std::string text;
  text.reserve(t.size());
  for (float v : t.data()) {
    if (!(v >= 0.0f && v <= 255.0f) || v != std::floor(v)) {
      throw WeightFormatError(WeightFormatError::Kind::kMalformed,
                              "metadata entry holds a non-byte value");
    }
    text.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  std::map<std::string, std::string> meta;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw WeightFormatError(WeightFormatError::Kind::kMalformed,
                              "metadata line without key=value: " + line);
    }
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

// Cursor over the entry section. Throws kTruncated when a read runs past
// `end`.
class Reader {
 public:
  Reader(const std::uint8_t* begin, const std::uint8_t* end) : p_(begin), end_(end) {}

  std::uint32_t u32() {
    need(4);
    const auto v = get_u32(p_);
    p_ += 4;
    return v;
  }
  const std::uint8_t* bytes(std::size_t n) {
    need(n);
    const auto* start = p_;
    p_ += n;
    return start;
  }
  bool done() const { return p_ == end_; }

 private:
  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end_ - p_) < n) {
      throw WeightFormatError(WeightFormatError::Kind::kTruncated,
                              "archive truncated: entry data runs past end of file");
    }
  }

  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

struct RawEntry {
  std::string name;
  Tensor tensor;
};

RawEntry read_entry(Reader& r) {
  const std::uint32_t name_len = r.u32();
  const auto* name_bytes = r.bytes(name_len);
  std::string name(reinterpret_cast<const char*>(name_bytes), name_len);
  const std::uint32_t rank = r.u32();
  if (rank < 1 || rank > Shape::kMaxRank) {
    throw WeightFormatError(WeightFormatError::Kind::kMalformed,
                            "entry '" + name + "' has unsupported rank " + std::to_string(rank));
  }
  std::vector<int> extents(rank);
  std::uint64_t count = 1;
  for (auto& e : extents) {
    const std::uint32_t v = r.u32();
    if (v == 0 || v > 0x7fffffffu) {
      throw WeightFormatError(WeightFormatError::Kind::kMalformed,
                              "entry '" + name + "' has invalid extent " + std::to_string(v));
    }
    e = static_cast<int>(v);
    count *= v;
    if (count > (std::uint64_t{1} << 40)) {
      throw WeightFormatError(WeightFormatError::Kind::kTruncated,
                              "entry '" + name + "' declares more data than the file holds");
    }
  }
  const auto* raw = r.bytes(count * sizeof(float));
  std::vector<float> data(count);
  std::memcpy(data.data(), raw, count * sizeof(float));
  return {std::move(name), Tensor(Shape(extents), std::move(data))};
}

// Walks the entry structure without materializing tensors; true when the
// declared entries fit in `payload_end`. Used to tell truncation from
// corruption when the checksum fails.
bool structure_fits(const std::uint8_t* begin, const std::uint8_t* payload_end,
                    std::uint32_t count) {
  std::uint64_t offset = 0;
  const auto avail = static_cast<std::uint64_t>(payload_end - begin);
  auto read = [&](std::uint64_t n) {
    offset += n;
    return offset <= avail;
  };
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!read(4)) return false;
    const std::uint32_t name_len = get_u32(begin + offset - 4);
    if (!read(name_len) || !read(4)) return false;
    const std::uint32_t rank = get_u32(begin + offset - 4);
    if (rank < 1 || rank > Shape::kMaxRank) return true;  // malformed, not short
    std::uint64_t elems = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      if (!read(4)) return false;
      elems *= get_u32(begin + offset - 4);
      if (elems > avail) return false;
    }
    if (!read(elems * sizeof(float))) return false;
  }
  return true;
}

}  // namespace

const char* to_string(WeightFormatError::Kind kind) {
  switch (kind) {
    case WeightFormatError::Kind::kIo: return "io";
    case WeightFormatError::Kind::kBadMagic: return "bad-magic";
    case WeightFormatError::Kind::kUnsupportedVersion: return "unsupported-version";
    case WeightFormatError::Kind::kChecksumMismatch: return "checksum-mismatch";
    case WeightFormatError::Kind::kTruncated: return "truncated";
    case WeightFormatError::Kind::kMalformed: return "malformed";
  }
  return "unknown";
}

void WeightArchive::add(std::string name, Tensor tensor) {
  if (!valid_name(name) || name == kMetaEntryName) {
    throw ArgumentError("invalid weight name '" + name + "'");
  }
  if (tensor.empty()) throw ArgumentError("weight '" + name + "' is empty");
  if (index_.contains(name)) throw ArgumentError("duplicate weight name '" + name + "'");
  index_.emplace(name, entries_.size());
  entries_.emplace_back(std::move(name), std::move(tensor));
}

void WeightArchive::replace(std::string_view name, Tensor tensor) {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ArgumentError("no weight named '" + std::string(name) + "'");
  Tensor& slot = entries_[it->second].second;
  if (!(slot.shape() == tensor.shape())) {
    throw ShapeError("replacement for '" + std::string(name) + "' has shape " +
                     tensor.shape().str() + ", expected " + slot.shape().str());
  }
  slot = std::move(tensor);
}

const Tensor* WeightArchive::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

const Tensor& WeightArchive::at(std::string_view name) const {
  if (const Tensor* t = find(name)) return *t;
  throw ShapeError("missing parameter '" + std::string(name) + "'");
}

std::string WeightArchive::meta_or(const std::string& key, std::string fallback) const {
  const auto it = metadata_.find(key);
  return it == metadata_.end() ? fallback : it->second;
}

bool WeightArchive::bit_equal(const WeightArchive& other) const {
  if (entries_.size() != other.entries_.size() || metadata_ != other.metadata_) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first ||
        !entries_[i].second.bit_equal(other.entries_[i].second)) {
      return false;
    }
  }
  return true;
}

std::vector<std::uint8_t> serialize(const WeightArchive& archive) {
  std::vector<std::uint8_t> out(kArchiveMagic.begin(), kArchiveMagic.end());
  put_u32(out, kArchiveVersion);
  const bool has_meta = !archive.metadata().empty();
  put_u32(out, static_cast<std::uint32_t>(archive.size() + (has_meta ? 1 : 0)));
  if (has_meta) put_entry(out, kMetaEntryName, encode_metadata(archive.metadata()));
  for (const auto& [name, tensor] : archive.entries()) put_entry(out, name, tensor);
  put_u32(out, crc32_of(out));
  return out;
}

WeightArchive deserialize(std::span<const std::uint8_t> bytes) {
  using Kind = WeightFormatError::Kind;
  if (bytes.size() < 8) throw WeightFormatError(Kind::kTruncated, "archive shorter than header");
  if (std::memcmp(bytes.data(), kArchiveMagic.data(), 4) != 0) {
    throw WeightFormatError(Kind::kBadMagic, "not a CWTS archive (bad magic)");
  }
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kArchiveVersion) {
    throw WeightFormatError(Kind::kUnsupportedVersion,
                            "unsupported archive version " + std::to_string(version));
  }
  if (bytes.size() < 16) throw WeightFormatError(Kind::kTruncated, "archive shorter than header");

  const std::size_t payload = bytes.size() - 4;
  const std::uint32_t count = get_u32(bytes.data() + 8);
  if (crc32_of(bytes.first(payload)) != get_u32(bytes.data() + payload)) {
    if (!structure_fits(bytes.data() + 12, bytes.data() + payload, count)) {
      throw WeightFormatError(Kind::kTruncated, "archive truncated");
    }
    throw WeightFormatError(Kind::kChecksumMismatch, "archive checksum mismatch");
  }

  Reader reader(bytes.data() + 12, bytes.data() + payload);
  WeightArchive archive;
  for (std::uint32_t i = 0; i < count; ++i) {
    RawEntry e = read_entry(reader);
    if (e.name == kMetaEntryName) {
      archive.metadata() = decode_metadata(e.tensor);
      continue;
    }
    try {
      archive.add(std::move(e.name), std::move(e.tensor));
    } catch (const ArgumentError& err) {
      throw WeightFormatError(Kind::kMalformed, err.what());
    }
  }
  if (!reader.done()) throw WeightFormatError(Kind::kMalformed, "trailing bytes after entries");
  return archive;
}

void save(const WeightArchive& archive, const std::filesystem::path& path) {
  const auto bytes = serialize(archive);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw WeightFormatError(WeightFormatError::Kind::kIo, "cannot write " + path.string());
  }
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw WeightFormatError(WeightFormatError::Kind::kIo, "write failed: " + path.string());
}

WeightArchive load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw WeightFormatError(WeightFormatError::Kind::kIo, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  try {
    return deserialize(bytes);
  } catch (const WeightFormatError& e) {
    throw WeightFormatError(e.kind(), path.string() + ": " + e.what());
  }
}

double Lcg64::normal() {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

WeightArchive random_init(const std::vector<ParamSpec>& specs, std::uint64_t seed) {
  Lcg64 rng(seed);
  WeightArchive archive;
  for (const auto& spec : specs) {
    std::vector<float> values(spec.shape.numel());
    for (float& v : values) v = rng.uniform(-0.1, 0.1);
    archive.add(spec.name, Tensor(spec.shape, std::move(values)));
  }
  return archive;
}

}  // namespace cascadet
