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


#include <gtest/gtest.h>

#include "cascadet/annotate.hpp"
#include "cascadet/fixtures.hpp"

namespace cascadet {
namespace {

Frame gray(int w, int h, std::uint8_t v = 90) {
  Frame f(0, w, h);
  std::fill(f.pixels.begin(), f.pixels.end(), v);
  return f;
}

bool differs(const Frame& a, const Frame& b, int x, int y) {
  return !std::equal(a.pixel(x, y), a.pixel(x, y) + 3, b.pixel(x, y));
}

bool is_color(const Frame& f, int x, int y, Rgb c) { return std::equal(c.begin(), c.end(), f.pixel(x, y)); }

TEST(AnnotateTest, NoDetectionsUnchanged) {
  const Frame f = make_fixture_frame(64, 48, 0, 1);
  EXPECT_EQ(annotate(f, {}), f);
}

TEST(AnnotateTest, MaskOutlineIsPureGreenAndOnlyOutlineOrGlyphChanges) {
  const Frame src = gray(80, 60);
  const Detection d{0, {20, 25, 50, 55}, MaskLabel::kMask, 0.87f, 0.9f};
  const Frame out = annotate(src, std::vector<Detection>{d});
  EXPECT_EQ(label_text(d), "Mask 0.87");

  // Label glyphs live in a band above the box.
  const int text_top = 25 - kGlyphHeight - 2;
  int outline = 0;
  for (int y = 0; y < 60; ++y) {
    for (int x = 0; x < 80; ++x) {
      const bool in_box = x >= 20 && x < 50 && y >= 25 && y < 55;
      const bool ring = in_box && (x < 22 || x >= 48 || y < 27 || y >= 53);
      const bool band = y >= text_top && y < 25 && x >= 20;
      if (ring) {
        EXPECT_TRUE(is_color(out, x, y, kMaskColor)) << x << ',' << y;
        ++outline;
      } else if (!band) {
        EXPECT_FALSE(differs(src, out, x, y)) << x << ',' << y;
      } else if (differs(src, out, x, y)) {
        EXPECT_TRUE(is_color(out, x, y, kMaskColor));
      }
    }
  }
  EXPECT_EQ(outline, 30 * 30 - 26 * 26);
  EXPECT_EQ(src, gray(80, 60));
}

TEST(AnnotateTest, NoMaskIsRedAndLabelMovesInsideAtTopEdge) {
  const Frame src = gray(60, 40);
  const Detection d{0, {5, 0, 45, 30}, MaskLabel::kNoMask, 0.5f, 0.9f};
  const Frame out = annotate(src, std::vector<Detection>{d});
  EXPECT_TRUE(is_color(out, 5, 0, kNoMaskColor));
  int painted_below = 0;
  for (int y = 2; y < 30; ++y) {
    for (int x = 7; x < 43; ++x) painted_below += differs(src, out, x, y);
  }
  EXPECT_GT(painted_below, 0);
  const Frame bare = annotate(src, std::vector<Detection>{d}, false);
  for (int y = 2; y < 28; ++y) {
    for (int x = 7; x < 43; ++x) EXPECT_FALSE(differs(src, bare, x, y));
  }
}

TEST(AnnotateTest, IdempotentGeometry) {
  const Frame src = make_fixture_frame(100, 80, 0, 2);
  const std::vector<Detection> dets{{0, {10, 20, 40, 50}, MaskLabel::kMask, 0.7f, 0.9f},
                                    {0, {50, 10, 95, 78}, MaskLabel::kNoMask, 0.61f, 0.8f}};
  const Frame once = annotate(src, dets);
  const Frame twice = annotate(once, dets);
  EXPECT_EQ(once, twice);
}

TEST(AnnotateTest, StaysInBounds) {
  const Frame src = gray(30, 20);
  const std::vector<Detection> dets{{0, {0, 0, 30, 20}, MaskLabel::kMask, 1.0f, 1.0f},
                                    {0, {25, 15, 30, 20}, MaskLabel::kNoMask, 0.99f, 1.0f}};
  const Frame out = annotate(src, dets);
  EXPECT_TRUE(out.valid());
  EXPECT_EQ(out.pixels.size(), src.pixels.size());
}

TEST(AnnotateTest, GlyphsAreDistinct) {
  const std::string chars = "MaskNo0123456789.";
  for (std::size_t i = 0; i < chars.size(); ++i) {
    for (std::size_t j = i + 1; j < chars.size(); ++j) EXPECT_NE(glyph(chars[i]), glyph(chars[j]));
  }
  EXPECT_EQ(glyph(' '), (std::array<std::uint8_t, kGlyphHeight>{}));
}

}  // namespace
}  // namespace cascadet
