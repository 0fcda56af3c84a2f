// Copyright 2026 The Caption Authors
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

#include "caption/imaging.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "caption/rng.hpp"
#include "test_util.hpp"

namespace caption {
namespace {

Image noise(int w, int h, std::uint64_t seed) {
  Image img(w, h);
  Xoshiro256StarStar rng(seed);
  for (auto& b : img.pixels()) b = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

TEST(Png, RoundTripIsLossless) {
  const Image img = noise(37, 23, 1);
  EXPECT_EQ(decode_png(encode_png(img)), img);
}

TEST(Png, RejectsGarbage) {
  const Bytes junk{1, 2, 3, 4, 5};
  EXPECT_CAPTION_ERROR(decode_png(junk), Errc::SchemaViolation);
}

TEST(Png, MissingFile) { EXPECT_CAPTION_ERROR(load_png("/nonexistent/x.png"), Errc::MissingFile); }

TEST(Crop, MatchesSourcePixels) {
  const Image img = noise(40, 30, 2);
  const Rect r{5, 7, 25, 19};
  const Image c = crop_region(img, r);
  ASSERT_EQ(c.width(), 20);
  ASSERT_EQ(c.height(), 12);
  for (int y = 0; y < c.height(); ++y)
    for (int x = 0; x < c.width(); ++x) ASSERT_EQ(c.at(x, y), img.at(x + 5, y + 7));
}

TEST(Crop, ClampsOutOfBoundsRegions) {
  const Image img = noise(40, 30, 3);
  const Image c = crop_region(img, Rect{-10, 20, 15, 90});
  EXPECT_EQ(c.width(), 15);
  EXPECT_EQ(c.height(), 10);
  EXPECT_EQ(c.at(0, 0), img.at(0, 20));
  EXPECT_CAPTION_ERROR(crop_region(img, Rect{50, 0, 60, 10}), Errc::EmptyRegion);
  EXPECT_CAPTION_ERROR(crop_region(img, Rect{5, 5, 5, 10}), Errc::EmptyRegion);
}

// Independent oracle: a pixel is on the ring iff it lies inside the clamped rectangle
// and its distance to the nearest edge is below the stroke width.
bool on_ring(int x, int y, const Rect& r, int s) {
  if (x < r.left || x >= r.right || y < r.top || y >= r.bottom) return false;
  const int d = std::min({x - r.left, r.right - 1 - x, y - r.top, r.bottom - 1 - y});
  return d < s;
}

void check_ring(const Image& before, const Rect& bounds, const HighlightStyle& style) {
  const Image after = draw_highlight(before, bounds, style);
  const Rect r = clamp_to(bounds, before.width(), before.height());
  for (int y = 0; y < before.height(); ++y) {
    for (int x = 0; x < before.width(); ++x) {
      if (on_ring(x, y, r, style.stroke_px)) {
        ASSERT_EQ(after.at(x, y), style.color) << x << "," << y;
      } else {
        ASSERT_EQ(after.at(x, y), before.at(x, y)) << x << "," << y;
      }
    }
  }
}

TEST(Highlight, RingMatchesBruteForce) {
  const Image img = noise(64, 48, 4);
  HighlightStyle style;
  check_ring(img, Rect{10, 8, 40, 30}, style);
  style.stroke_px = 1;
  check_ring(img, Rect{0, 0, 64, 48}, style);
  style.stroke_px = 9;  // thicker than half the box: fills it
  check_ring(img, Rect{20, 20, 30, 30}, style);
}

TEST(Highlight, ClampsPartiallyOffscreenBounds) {
  const Image img = noise(50, 50, 5);
  check_ring(img, Rect{-20, 30, 20, 80}, HighlightStyle{});
}

TEST(Highlight, ElementInflatesFirst) {
  const Image img(60, 60, Rgba{0, 0, 0, 255});
  HighlightStyle style;
  style.stroke_px = 2;
  style.inflate_px = 3;
  const Image out = highlight_element(img, Rect{20, 20, 30, 30}, style);
  EXPECT_EQ(out, draw_highlight(img, Rect{17, 17, 33, 33}, style));
  EXPECT_EQ(out.at(17, 17), style.color);
  EXPECT_EQ(out.at(20, 20), img.at(20, 20));  // element pixels stay visible
}

TEST(Highlight, Errors) {
  const Image img(10, 10);
  EXPECT_CAPTION_ERROR(draw_highlight(img, Rect{20, 20, 30, 30}, {}), Errc::EmptyRegion);
  HighlightStyle bad;
  bad.stroke_px = 0;
  EXPECT_CAPTION_ERROR(draw_highlight(img, Rect{0, 0, 5, 5}, bad), Errc::InvalidArgument);
}

TEST(Downscale, DimensionsRoundHalfUp) {
  for (auto [w, h, m] : std::vector<std::array<int, 3>>{{2000, 1000, 1024}, {1080, 1920, 1024}, {3, 1001, 1000},
                                                        {1001, 1, 500}, {1025, 1025, 1024}, {4000, 3, 1024}}) {
    const Image out = downscale_max(Image(w, h), m);
    const double longest = std::max(w, h);
    EXPECT_EQ(out.width(), std::max(1L, std::lround(std::floor(w * m / longest + 0.5)))) << w << "x" << h;
    EXPECT_EQ(out.height(), std::max(1L, std::lround(std::floor(h * m / longest + 0.5)))) << w << "x" << h;
    EXPECT_EQ(std::max(out.width(), out.height()), m);
  }
}

TEST(Downscale, WithinBoundsIsUnchanged) {
  const Image img = noise(30, 20, 6);
  EXPECT_EQ(downscale_max(img, 30), img);
  EXPECT_EQ(downscale_max(img, 1024), img);
}

TEST(Downscale, HalvingIsABoxFilter) {
  const Image img = noise(40, 24, 7);
  const Image out = downscale_max(img, 20);
  ASSERT_EQ(out.width(), 20);
  ASSERT_EQ(out.height(), 12);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 20; ++x) {
      const Rgba a = img.at(2 * x, 2 * y), b = img.at(2 * x + 1, 2 * y), c = img.at(2 * x, 2 * y + 1),
                 d = img.at(2 * x + 1, 2 * y + 1);
      const Rgba o = out.at(x, y);
      EXPECT_NEAR(o.r, (a.r + b.r + c.r + d.r) / 4.0, 0.51);
      EXPECT_NEAR(o.g, (a.g + b.g + c.g + d.g) / 4.0, 0.51);
      EXPECT_NEAR(o.b, (a.b + b.b + c.b + d.b) / 4.0, 0.51);
    }
  }
}

TEST(Downscale, UniformStaysUniform) {
  const Rgba c{12, 200, 77, 255};
  const Image out = downscale_max(Image(1500, 900, c), 1024);
  for (int y = 0; y < out.height(); y += 37)
    for (int x = 0; x < out.width(); x += 41) ASSERT_EQ(out.at(x, y), c);
}

TEST(Downscale, ReferenceSizes) {
  EXPECT_EQ(downscale_max(Image(800, 600), 1024).width(), 800);
  const Image half = downscale_max(Image(2048, 1024), 1024);
  EXPECT_EQ(half.width(), 1024);
  EXPECT_EQ(half.height(), 512);
  const Image r = downscale_max(Image(1000, 500), 600);
  EXPECT_EQ(r.width(), 600);
  EXPECT_EQ(r.height(), 300);
}

TEST(Highlight, DisjointCropIsUntouched) {
  const Image img = noise(80, 60, 8);
  const Image marked = draw_highlight(img, Rect{5, 5, 30, 30}, HighlightStyle{});
  const Rect away{40, 35, 75, 58};
  EXPECT_EQ(crop_region(marked, away), crop_region(img, away));
}

TEST(Crop, FullBoundsIsIdentityAndIdempotent) {
  const Image img = noise(25, 19, 9);
  EXPECT_EQ(crop_region(img, img.bounds()), img);
  const Image a = crop_region(img, Rect{3, 4, 20, 15});
  EXPECT_EQ(crop_region(a, a.bounds()), a);
}

TEST(Imaging, InputsAreNotMutated) {
  const Image img = noise(30, 30, 10);
  const Image copy = img;
  (void)draw_highlight(img, Rect{0, 0, 10, 10}, {});
  (void)downscale_max(img, 7);
  (void)crop_region(img, Rect{1, 1, 5, 5});
  EXPECT_EQ(img, copy);
}

}  // namespace
}  // namespace caption
