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

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "cascadet/detection.hpp"
#include "cascadet/frame.hpp"

namespace cascadet {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kMaskColor{0, 255, 0};
inline constexpr Rgb kNoMaskColor{255, 0, 0};
inline constexpr int kOutlineThickness = 2;
inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

// Rows of a 5x7 glyph, bit 4 = leftmost column. Unknown characters map to a
// filled box.
std::array<std::uint8_t, kGlyphHeight> glyph(char ch);

// Draws `text` with its top-left corner at (x, y); pixels off the frame are
// skipped.
void draw_text(Frame& frame, int x, int y, std::string_view text, Rgb color);

// Draws a `thickness`-pixel outline just inside the integer box.
void draw_outline(Frame& frame, const BoundingBox& box, int thickness, Rgb color);

// "Mask 0.87" style label text for a detection.
std::string label_text(const Detection& d);

// Returns a copy of `frame` with one outline and label per detection: green for
// Mask, red for NoMask. The label sits above the box, or just inside its top
// edge when there is no room above.
Frame annotate(const Frame& frame, std::span<const Detection> detections, bool draw_labels = true);

}  // namespace cascadet
