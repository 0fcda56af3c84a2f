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

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "caption/digest.hpp"
#include "json.hpp"

namespace caption {

using json = nlohmann::json;

struct TextPart {
  std::string text;
  friend bool operator==(const TextPart&, const TextPart&) = default;
};

/// Images travel as encoded PNG bytes, never as paths.
struct ImagePart {
  Bytes png;
  friend bool operator==(const ImagePart&, const ImagePart&) = default;
};

using PromptPart = std::variant<TextPart, ImagePart>;

struct PromptRequest {
  std::string model_id;
  std::string system_text;
  std::vector<PromptPart> parts;
  double temperature = 0.0;
  int max_output_tokens = 64;

  friend bool operator==(const PromptRequest&, const PromptRequest&) = default;
};

std::size_t count_images(const PromptRequest& request);
std::size_t count_texts(const PromptRequest& request);

/// Hex SHA-256 over a length-prefixed canonical encoding of the request:
/// version tag, model id, system text, temperature ("%.17g"), token limit, then
/// each part as a type tag plus its UTF-8 text or raw image bytes.
std::string cache_key(const PromptRequest& request);

enum class ProviderKind { Live, Replay };

struct Transcript {
  PromptRequest request;
  std::string response_text;
  ProviderKind provider = ProviderKind::Live;
  std::string cache_key;
  std::string timestamp;  // UTC, ISO 8601
};

json to_json(const PromptRequest& request);
PromptRequest request_from_json(const json& doc);
json to_json(const Transcript& transcript);
Transcript transcript_from_json(const json& doc);

/// Directory of <cache_key>.json transcripts plus an append-only index.jsonl.
/// Writes are serialized; concurrent readers are fine.
class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  bool contains(const std::string& key) const;
  std::optional<Transcript> load(const std::string& key) const;
  /// No-op if the key is already stored.
  void save(const Transcript& transcript);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

/// Backend that actually talks to a model. Throws Error{ProviderError | Timeout}.
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  virtual std::string generate(const PromptRequest& request) = 0;
};

struct ProviderSettings {
  /// Base URL, e.g. "https://generativelanguage.googleapis.com/v1beta".
  std::string url;
  std::string api_key;
  std::int64_t timeout_ms = 60000;
  int max_attempts = 3;
  std::int64_t initial_backoff_ms = 1000;
};

/// Gemini-style generateContent client over HTTP(S). Retries transport
/// failures and HTTP 429 with exponential backoff.
class HttpProvider final : public LlmProvider {
 public:
  explicit HttpProvider(ProviderSettings settings);
  std::string generate(const PromptRequest& request) override;

  static json request_body(const PromptRequest& request);
  /// Concatenated text of the first candidate. Throws Error{ProviderError}.
  static std::string parse_response(const std::string& body);

 private:
  ProviderSettings settings_;
};

enum class ClientMode { Live, Record, Replay };

/// live: provider only; record: store-first, provider on miss, persisted;
/// replay: store only, ReplayMiss on absence.
class LlmClient {
 public:
  LlmClient(ClientMode mode, TranscriptStore* store, LlmProvider* provider);

  Transcript complete(const PromptRequest& request);

  ClientMode mode() const noexcept { return mode_; }
  TranscriptStore* store() const noexcept { return store_; }
  std::size_t live_calls() const;

 private:
  Transcript call_live(const PromptRequest& request, const std::string& key);

  ClientMode mode_;
  TranscriptStore* store_;
  LlmProvider* provider_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::set<std::string> in_flight_;
  std::size_t live_calls_ = 0;
};

std::string to_string(ClientMode mode);
/// "live" | "record" | "replay"; throws Error{InvalidArgument}.
ClientMode parse_client_mode(std::string_view text);

}  // namespace caption
