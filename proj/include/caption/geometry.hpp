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

#include <algorithm>
#include <cstdint>
#include <string>

namespace caption {

/// Integer pixel rectangle, half-open: [left, right) x [top, bottom).
struct Rect {
  int left = 0;
  int top = 0;
  int right = 0;
  int bottom = 0;

  constexpr int width() const noexcept { return right - left; }
  constexpr int height() const noexcept { return bottom - top; }
  constexpr bool empty() const noexcept { return right <= left || bottom <= top; }
  constexpr std::int64_t area() const noexcept {
    return empty() ? 0 : std::int64_t{width()} * std::int64_t{height()};
  }
  constexpr bool contains(const Rect& other) const noexcept {
    return other.left >= left && other.top >= top && other.right <= right && other.bottom <= bottom;
  }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

constexpr Rect intersect(const Rect& a, const Rect& b) noexcept {
  return Rect{std::max(a.left, b.left), std::max(a.top, b.top), std::min(a.right, b.right),
              std::min(a.bottom, b.bottom)};
}

constexpr Rect clamp_to(const Rect& r, int width, int height) noexcept {
  return intersect(r, Rect{0, 0, width, height});
}

constexpr Rect inflate(const Rect& r, int px) noexcept {
  return Rect{r.left - px, r.top - px, r.right + px, r.bottom + px};
}

/// "[l,t][r,b]" as Android view hierarchies print bounds.
inline std::string to_string(const Rect& r) {
  return "[" + std::to_string(r.left) + "," + std::to_string(r.top) + "][" + std::to_string(r.right) + "," +
         std::to_string(r.bottom) + "]";
}

}  // namespace caption
