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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "caption/digest.hpp"
#include "caption/geometry.hpp"

namespace caption {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 255;

  friend constexpr bool operator==(const Rgba&, const Rgba&) = default;
};

/// Row-major RGBA8 raster. pixels().size() == width * height * 4 always holds.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgba fill = {});
  Image(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Rect bounds() const noexcept { return Rect{0, 0, width_, height_}; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  Rgba at(int x, int y) const noexcept {
    const auto* p = &pixels_[offset(x, y)];
    return Rgba{p[0], p[1], p[2], p[3]};
  }
  void set(int x, int y, Rgba c) noexcept {
    auto* p = &pixels_[offset(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
    p[3] = c.a;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 4;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct HighlightStyle {
  Rgba color{255, 0, 0, 255};
  int stroke_px = 4;
  /// Outset applied to element bounds before drawing (then clamped).
  int inflate_px = 6;
};

inline constexpr int kDefaultPromptMaxDim = 1024;

/// Throws Error{SchemaViolation} if the bytes are not a decodable PNG.
Image decode_png(std::span<const std::uint8_t> png);
Bytes encode_png(const Image& img);
Image load_png(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Image& img);

/// Sub-image at `bounds` clamped to the image. Throws Error{EmptyRegion} on zero-area overlap.
Image crop_region(const Image& img, const Rect& bounds);

/// Copy of `img` with a stroke_px-wide ring drawn just inside the clamped `bounds`.
/// Pixels off the ring are untouched. Throws Error{EmptyRegion}.
Image draw_highlight(const Image& img, const Rect& bounds, const HighlightStyle& style);

/// Highlight for a UI element: inflates bounds by style.inflate_px first.
Image highlight_element(const Image& img, const Rect& element_bounds, const HighlightStyle& style);

/// Bilinear downscale so max(width, height) == max_dim_px, or an unchanged copy when already within bounds.
Image downscale_max(const Image& img, int max_dim_px);

}  // namespace caption
