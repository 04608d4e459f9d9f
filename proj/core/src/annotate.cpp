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

#include "cascadet/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cascadet {
namespace {

void put(Frame& frame, int x, int y, Rgb color) {
  if (x < 0 || y < 0 || x >= frame.width || y >= frame.height) return;
  std::copy(color.begin(), color.end(), frame.pixel(x, y));
}

}  // namespace

std::array<std::uint8_t, kGlyphHeight> glyph(char ch) {
  switch (ch) {
    case ' ': return {0, 0, 0, 0, 0, 0, 0};
    case '.': return {0, 0, 0, 0, 0, 0x0C, 0x0C};
    case '0': return {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E};
    case '1': return {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E};
    case '2': return {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F};
    case '3': return {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E};
    case '4': return {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02};
    case '5': return {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E};
    case '6': return {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E};
    case '7': return {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08};
    case '8': return {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E};
    case '9': return {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C};
    case 'M': return {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11};
    case 'N': return {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11};
    case 'a': return {0, 0, 0x0E, 0x01, 0x0F, 0x11, 0x0F};
    case 'k': return {0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12};
    case 'o': return {0, 0, 0x0E, 0x11, 0x11, 0x11, 0x0E};
    case 's': return {0, 0, 0x0E, 0x10, 0x0E, 0x01, 0x1E};
    default: return {0x1F, 0x1F, 0x1F, 0x1F, 0x1F, 0x1F, 0x1F};
  }
}

void draw_text(Frame& frame, int x, int y, std::string_view text, Rgb color) {
  for (char ch : text) {
    const auto rows = glyph(ch);
    for (int r = 0; r < kGlyphHeight; ++r) {
      for (int c = 0; c < kGlyphWidth; ++c) {
        if (rows[r] & (0x10 >> c)) put(frame, x + c, y + r, color);
      }
    }
    x += kGlyphWidth + 1;
  }
}

void draw_outline(Frame& frame, const BoundingBox& box, int thickness, Rgb color) {
  const int x1 = std::max(0, static_cast<int>(std::floor(box.x1)));
  const int y1 = std::max(0, static_cast<int>(std::floor(box.y1)));
  const int x2 = std::min(frame.width, static_cast<int>(std::ceil(box.x2)));
  const int y2 = std::min(frame.height, static_cast<int>(std::ceil(box.y2)));
  for (int y = y1; y < y2; ++y) {
    for (int x = x1; x < x2; ++x) {
      const bool edge = x < x1 + thickness || x >= x2 - thickness || y < y1 + thickness ||
                        y >= y2 - thickness;
      if (edge) put(frame, x, y, color);
    }
  }
}

std::string label_text(const Detection& d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s %.2f", to_string(d.label), static_cast<double>(d.confidence));
  return buf;
}

Frame annotate(const Frame& frame, std::span<const Detection> detections, bool draw_labels) {
  Frame out = frame;
  for (const auto& d : detections) {
    const Rgb color = d.label == MaskLabel::kMask ? kMaskColor : kNoMaskColor;
    draw_outline(out, d.box, kOutlineThickness, color);
    if (!draw_labels) continue;
    const int x = static_cast<int>(std::floor(d.box.x1));
    const int top = static_cast<int>(std::floor(d.box.y1));
    int y = top - kGlyphHeight - 2;
    if (y < 0) y = top + kOutlineThickness + 1;
    draw_text(out, x, y, label_text(d), color);
  }
  return out;
}

}  // namespace cascadet
