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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace caption {

using Bytes = std::vector<std::uint8_t>;

/// Incremental SHA-256. Feed with update(), read once with hex_digest().
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> data);
  Sha256& update(std::string_view text);
  /// Appends the value as 8 big-endian bytes.
  Sha256& update_u64(std::uint64_t value);
  /// Length-prefixed (u64 big-endian) field; keeps concatenations unambiguous.
  Sha256& update_field(std::string_view text);
  Sha256& update_field(std::span<const std::uint8_t> data);

  std::string hex_digest();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> data);
/// Throws Error{SchemaViolation} on malformed input.
Bytes base64_decode(std::string_view text);

/// Throws Error{MissingFile} when the file cannot be opened.
Bytes read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> content);

/// Current UTC instant as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now_iso8601();

}  // namespace caption
