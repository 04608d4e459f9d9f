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

// 8-bit RGB frames, binary PPM (P6, maxval 255) I/O and frame manifests.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cascadet/error.hpp"
#include "cascadet/tensor.hpp"

namespace cascadet {

struct Frame {
  int index = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // RGB, row-major, 3 * width * height bytes

  Frame() = default;
  Frame(int index, int width, int height);

  std::uint8_t* pixel(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
  const std::uint8_t* pixel(int x, int y) const {
    return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
  }
  bool valid() const noexcept {
    return width > 0 && height > 0 && pixels.size() == 3 * static_cast<std::size_t>(width) * height;
  }
  friend bool operator==(const Frame&, const Frame&) = default;
};

class FrameError : public Error {
 public:
  using Error::Error;
};

Frame read_ppm(const std::filesystem::path& path, int index = 0);
void write_ppm(const std::filesystem::path& path, const Frame& frame);

std::vector<std::uint8_t> encode_ppm(const Frame& frame);
Frame decode_ppm(std::span<const std::uint8_t> bytes, int index = 0);

// Raw values 0..255 as a [1, 3, H, W] tensor.
Tensor to_tensor(const Frame& frame);

struct ManifestEntry {
  std::filesystem::path path;
  int line = 0;  // 1-based line in the manifest
};

// One frame path per non-blank line; relative paths resolve against the
// manifest's directory. Lines starting with '#' are comments.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

// Yields frames in manifest order with consecutive indices from 0.
class FrameStream {
 public:
  explicit FrameStream(const std::filesystem::path& manifest);

  // nullopt at end. Throws FrameError naming the manifest line on bad input.
  std::optional<Frame> next();
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::filesystem::path manifest_;
  std::vector<ManifestEntry> entries_;
  std::size_t position_ = 0;
};

// Loads the frame of one manifest entry; errors name the manifest line.
Frame load_frame(const std::filesystem::path& manifest, const ManifestEntry& entry, int index);

std::vector<Frame> read_frames(const std::filesystem::path& manifest);

}  // namespace cascadet
