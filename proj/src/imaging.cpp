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

#include <png.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "caption/error.hpp"

namespace caption {

Image::Image(int width, int height, Rgba fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(Errc::InvalidArgument, "image dimensions must be positive");
  }
  pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 4);
  for (std::size_t i = 0; i < pixels_.size(); i += 4) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
    pixels_[i + 3] = fill.a;
  }
}

Image::Image(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 4) {
    throw Error(Errc::InvalidArgument, "pixel buffer does not match dimensions");
  }
}

Image decode_png(std::span<const std::uint8_t> png) {
  png_image info{};
  info.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&info, png.data(), png.size()) == 0) {
    throw Error(Errc::SchemaViolation, std::string("PNG decode failed: ") + info.message);
  }
  info.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(info));
  if (png_image_finish_read(&info, nullptr, pixels.data(), 0, nullptr) == 0) {
    std::string msg = info.message;
    png_image_free(&info);
    throw Error(Errc::SchemaViolation, "PNG decode failed: " + msg);
  }
  return Image(static_cast<int>(info.width), static_cast<int>(info.height), std::move(pixels));
}

Bytes encode_png(const Image& img) {
  png_image info{};
  info.version = PNG_IMAGE_VERSION;
  info.width = static_cast<png_uint_32>(img.width());
  info.height = static_cast<png_uint_32>(img.height());
  info.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&info, nullptr, &size, 0, img.pixels().data(), 0, nullptr) == 0) {
    throw std::runtime_error(std::string("PNG encode failed: ") + info.message);
  }
  Bytes out(size);
  if (png_image_write_to_memory(&info, out.data(), &size, 0, img.pixels().data(), 0, nullptr) == 0) {
    throw std::runtime_error(std::string("PNG encode failed: ") + info.message);
  }
  out.resize(size);
  return out;
}

Image load_png(const std::filesystem::path& path) { return decode_png(read_file_bytes(path)); }

void save_png(const std::filesystem::path& path, const Image& img) { write_file_atomic(path, encode_png(img)); }

Image crop_region(const Image& img, const Rect& bounds) {
  const Rect r = clamp_to(bounds, img.width(), img.height());
  if (r.empty()) {
    throw Error(Errc::EmptyRegion, "crop " + to_string(bounds) + " misses the image");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(r.area()) * 4);
  const auto src = img.pixels();
  const std::size_t row_bytes = static_cast<std::size_t>(r.width()) * 4;
  for (int y = r.top; y < r.bottom; ++y) {
    const std::size_t from = (static_cast<std::size_t>(y) * img.width() + r.left) * 4;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(from), row_bytes,
                out.begin() + static_cast<std::ptrdiff_t>((y - r.top) * row_bytes));
  }
  return Image(r.width(), r.height(), std::move(out));
}

Image draw_highlight(const Image& img, const Rect& bounds, const HighlightStyle& style) {
  if (style.stroke_px < 1) {
    throw Error(Errc::InvalidArgument, "stroke_px must be >= 1");
  }
  const Rect r = clamp_to(bounds, img.width(), img.height());
  if (r.empty()) {
    throw Error(Errc::EmptyRegion, "highlight " + to_string(bounds) + " misses the image");
  }
  Image out = img;
  const int s = style.stroke_px;
  for (int y = r.top; y < r.bottom; ++y) {
    const bool edge_row = y < r.top + s || y >= r.bottom - s;
    for (int x = r.left; x < r.right; ++x) {
      if (edge_row || x < r.left + s || x >= r.right - s) {
        out.set(x, y, style.color);
      }
    }
  }
  return out;
}

Image highlight_element(const Image& img, const Rect& element_bounds, const HighlightStyle& style) {
  return draw_highlight(img, inflate(element_bounds, style.inflate_px), style);
}

Image downscale_max(const Image& img, int max_dim_px) {
  if (max_dim_px < 1) {
    throw Error(Errc::InvalidArgument, "max_dim_px must be >= 1");
  }
  const std::int64_t w = img.width();
  const std::int64_t h = img.height();
  const std::int64_t longest = std::max(w, h);
  if (longest <= max_dim_px) {
    return img;
  }
  // round-half-up of w * max_dim / longest, in integers
  const auto scaled = [&](std::int64_t v) {
    return static_cast<int>(std::max<std::int64_t>(1, (2 * v * max_dim_px + longest) / (2 * longest)));
  };
  const int nw = scaled(w);
  const int nh = scaled(h);

  Image out(nw, nh);
  const double sx = static_cast<double>(w) / nw;
  const double sy = static_cast<double>(h) / nh;
  const auto src = img.pixels();
  auto dst = out.pixels();
  for (int y = 0; y < nh; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min<int>(y0 + 1, static_cast<int>(h - 1));
    const double ty = fy - y0;
    for (int x = 0; x < nw; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min<int>(x0 + 1, static_cast<int>(w - 1));
      const double tx = fx - x0;
      const std::size_t p00 = (static_cast<std::size_t>(y0) * w + x0) * 4;
      const std::size_t p01 = (static_cast<std::size_t>(y0) * w + x1) * 4;
      const std::size_t p10 = (static_cast<std::size_t>(y1) * w + x0) * 4;
      const std::size_t p11 = (static_cast<std::size_t>(y1) * w + x1) * 4;
      const std::size_t q = (static_cast<std::size_t>(y) * nw + x) * 4;
      for (int c = 0; c < 4; ++c) {
        const double top = src[p00 + c] * (1 - tx) + src[p01 + c] * tx;
        const double bottom = src[p10 + c] * (1 - tx) + src[p11 + c] * tx;
        dst[q + c] = static_cast<std::uint8_t>(std::lround(top * (1 - ty) + bottom * ty));
      }
    }
  }
  return out;
}

}  // namespace caption
