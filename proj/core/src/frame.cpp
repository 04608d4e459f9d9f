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

#include "cascadet/frame.hpp"

#include <cctype>
#include <fstream>

namespace cascadet {
namespace {

class HeaderParser {
 public:
  explicit HeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (out.empty()) throw FrameError("malformed PPM header: unexpected end of header");
    return out;
  }

  int number(const char* what) {
    const std::string t = token();
    int v = 0;
    for (char ch : t) {
      if (!std::isdigit(static_cast<unsigned char>(ch)) || v > 1'000'000) {
        throw FrameError(std::string("malformed PPM header: bad ") + what + " '" + t + "'");
      }
      v = v * 10 + (ch - '0');
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FrameError("malformed PPM header: missing separator before raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FrameError("cannot open frame file " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

Frame::Frame(int index_, int width_, int height_)
    : index(index_), width(width_), height(height_),
      pixels(3 * static_cast<std::size_t>(width_) * height_, 0) {}

Frame decode_ppm(std::span<const std::uint8_t> bytes, int index) {
  HeaderParser parser(bytes);
  if (parser.token() != "P6") throw FrameError("malformed PPM header: expected magic P6");
  const int width = parser.number("width");
  const int height = parser.number("height");
  const int maxval = parser.number("maxval");
  if (width < 1 || height < 1) throw FrameError("malformed PPM header: zero image extent");
  if (maxval != 255) throw FrameError("unsupported PPM maxval " + std::to_string(maxval) + " (need 255)");
  const std::size_t start = parser.raster_start();
  Frame frame(index, width, height);
  if (bytes.size() - start < frame.pixels.size()) {
    throw FrameError("truncated PPM raster: expected " + std::to_string(frame.pixels.size()) +
                     " bytes, found " + std::to_string(bytes.size() - start));
  }
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(start), frame.pixels.size(),
              frame.pixels.begin());
  return frame;
}

std::vector<std::uint8_t> encode_ppm(const Frame& frame) {
  if (!frame.valid()) throw FrameError("cannot encode an invalid frame");
  const std::string header =
      "P6\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), frame.pixels.begin(), frame.pixels.end());
  return out;
}

Frame read_ppm(const std::filesystem::path& path, int index) {
  const auto bytes = read_file(path);
  try {
    return decode_ppm(bytes, index);
  } catch (const FrameError& e) {
    throw FrameError(path.string() + ": " + e.what());
  }
}

void write_ppm(const std::filesystem::path& path, const Frame& frame) {
  const auto bytes = encode_ppm(frame);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw FrameError("cannot write " + path.string());
}

Tensor to_tensor(const Frame& frame) {
  Tensor t = Tensor::nchw(1, 3, frame.height, frame.width);
  for (int c = 0; c < 3; ++c) {
    float* plane = t.plane(0, c);
    for (std::size_t i = 0, n = static_cast<std::size_t>(frame.width) * frame.height; i < n; ++i) {
      plane[i] = frame.pixels[3 * i + c];
    }
  }
  return t;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream is(manifest);
  if (!is) throw FrameError("cannot open manifest " + manifest.string());
  const auto base = manifest.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::filesystem::path p = line.substr(first, last - first + 1);
    entries.push_back({p.is_absolute() ? p : base / p, number});
  }
  return entries;
}

Frame load_frame(const std::filesystem::path& manifest, const ManifestEntry& entry, int index) {
  try {
    return read_ppm(entry.path, index);
  } catch (const FrameError& e) {
    throw FrameError(manifest.string() + ":" + std::to_string(entry.line) + ": " + e.what());
  }
}

FrameStream::FrameStream(const std::filesystem::path& manifest)
    : manifest_(manifest), entries_(read_manifest(manifest)) {}

std::optional<Frame> FrameStream::next() {
  if (position_ >= entries_.size()) return std::nullopt;
  const auto& entry = entries_[position_];
  const int index = static_cast<int>(position_++);
  return load_frame(manifest_, entry, index);
}

std::vector<Frame> read_frames(const std::filesystem::path& manifest) {
  FrameStream stream(manifest);
  std::vector<Frame> frames;
  while (auto f = stream.next()) frames.push_back(std::move(*f));
  return frames;
}

}  // namespace cascadet
