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

#include "caption/llm.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

#include "caption/error.hpp"
#include "httplib.h"
#include "json_util.hpp"

namespace caption {

namespace fs = std::filesystem;

std::size_t count_images(const PromptRequest& request) {
  return static_cast<std::size_t>(std::count_if(request.parts.begin(), request.parts.end(), [](const PromptPart& p) {
    return std::holds_alternative<ImagePart>(p);
  }));
}

std::size_t count_texts(const PromptRequest& request) { return request.parts.size() - count_images(request); }

std::string cache_key(const PromptRequest& request) {
  char temperature[40];
  std::snprintf(temperature, sizeof temperature, "%.17g", request.temperature);
  Sha256 h;
  h.update_field(std::string_view("caption.prompt.v1"));
  h.update_field(request.model_id);
  h.update_field(request.system_text);
  h.update_field(std::string_view(temperature));
  h.update_u64(static_cast<std::uint64_t>(request.max_output_tokens));
  h.update_u64(request.parts.size());
  for (const PromptPart& part : request.parts) {
    if (const auto* text = std::get_if<TextPart>(&part)) {
      h.update_field(std::string_view("text"));
      h.update_field(text->text);
    } else {
      h.update_field(std::string_view("image/png"));
      h.update_field(std::span<const std::uint8_t>(std::get<ImagePart>(part).png));
    }
  }
  return h.hex_digest();
}

json to_json(const PromptRequest& request) {
  json parts = json::array();
  for (const PromptPart& part : request.parts) {
    if (const auto* text = std::get_if<TextPart>(&part)) {
      parts.push_back({{"type", "text"}, {"text", text->text}});
    } else {
      const Bytes& png = std::get<ImagePart>(part).png;
      parts.push_back({{"type", "image"},
                       {"mime_type", "image/png"},
                       {"sha256", sha256_hex(std::span<const std::uint8_t>(png))},
                       {"data", base64_encode(png)}});
    }
  }
  return json{{"model_id", request.model_id},
              {"system_text", request.system_text},
              {"temperature", request.temperature},
              {"max_output_tokens", request.max_output_tokens},
              {"parts", std::move(parts)}};
}

PromptRequest request_from_json(const json& doc) {
  const std::string where = "prompt request";
  PromptRequest r;
  r.model_id = detail::get_string(doc, "model_id", where);
  r.system_text = detail::get_string(doc, "system_text", where);
  const json& t = detail::require(doc, "temperature", where);
  if (!t.is_number()) throw Error(Errc::SchemaViolation, where + ": temperature must be a number");
  r.temperature = t.get<double>();
  r.max_output_tokens = static_cast<int>(detail::get_int(doc, "max_output_tokens", where));
  for (const json& pj : detail::get_array(doc, "parts", where)) {
    const std::string type = detail::get_string(pj, "type", where);
    if (type == "text") {
      r.parts.emplace_back(TextPart{detail::get_string(pj, "text", where)});
    } else if (type == "image") {
      r.parts.emplace_back(ImagePart{base64_decode(detail::get_string(pj, "data", where))});
    } else {
      throw Error(Errc::SchemaViolation, where + ": unknown part type \"" + type + "\"");
    }
  }
  return r;
}

json to_json(const Transcript& transcript) {
  return json{{"cache_key", transcript.cache_key},
              {"provider", transcript.provider == ProviderKind::Live ? "live" : "replay"},
              {"timestamp", transcript.timestamp},
              {"response_text", transcript.response_text},
              {"request", to_json(transcript.request)}};
}

Transcript transcript_from_json(const json& doc) {
  const std::string where = "transcript";
  Transcript t;
  t.cache_key = detail::get_string(doc, "cache_key", where);
  const std::string provider = detail::get_string(doc, "provider", where);
  if (provider != "live" && provider != "replay") {
    throw Error(Errc::SchemaViolation, where + ": unknown provider \"" + provider + "\"");
  }
  t.provider = provider == "live" ? ProviderKind::Live : ProviderKind::Replay;
  t.timestamp = detail::get_string(doc, "timestamp", where);
  t.response_text = detail::get_string(doc, "response_text", where);
  t.request = request_from_json(detail::require(doc, "request", where));
  return t;
}

// TranscriptStore -----------------------------------------------------------------

TranscriptStore::TranscriptStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

bool TranscriptStore::contains(const std::string& key) const { return fs::exists(dir_ / (key + ".json")); }

std::optional<Transcript> TranscriptStore::load(const std::string& key) const {
  const fs::path path = dir_ / (key + ".json");
  if (!fs::exists(path)) return std::nullopt;
  Transcript t = transcript_from_json(detail::parse_json_text(read_file_text(path), path.string()));
  if (t.cache_key != key || cache_key(t.request) != key) {
    throw Error(Errc::SchemaViolation, path.string() + ": stored request does not hash to its key");
  }
  return t;
}

void TranscriptStore::save(const Transcript& transcript) {
  std::lock_guard lock(mu_);
  const fs::path path = dir_ / (transcript.cache_key + ".json");
  if (fs::exists(path)) return;
  write_file_atomic(path, to_json(transcript).dump(2) + "\n");
  std::ofstream index(dir_ / "index.jsonl", std::ios::app);
  index << json{{"cache_key", transcript.cache_key},
                {"model_id", transcript.request.model_id},
                {"timestamp", transcript.timestamp}}
               .dump()
        << "\n";
}

// HttpProvider ------------------------------------------------------------------------

HttpProvider::HttpProvider(ProviderSettings settings) : settings_(std::move(settings)) {
  if (settings_.url.empty()) {
    throw Error(Errc::InvalidArgument, "provider URL is not configured (CAPTION_PROVIDER_URL)");
  }
}

json HttpProvider::request_body(const PromptRequest& request) {
  json parts = json::array();
  for (const PromptPart& part : request.parts) {
    if (const auto* text = std::get_if<TextPart>(&part)) {
      parts.push_back({{"text", text->text}});
    } else {
      parts.push_back(
          {{"inline_data", {{"mime_type", "image/png"}, {"data", base64_encode(std::get<ImagePart>(part).png)}}}});
    }
  }
  return json{{"system_instruction", {{"parts", json::array({{{"text", request.system_text}}})}}},
              {"contents", json::array({{{"role", "user"}, {"parts", std::move(parts)}}})},
              {"generationConfig",
               {{"temperature", request.temperature}, {"maxOutputTokens", request.max_output_tokens}}}};
}

std::string HttpProvider::parse_response(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ProviderError, std::string("unparseable provider response: ") + e.what());
  }
  const auto candidates = doc.find("candidates");
  if (candidates == doc.end() || !candidates->is_array() || candidates->empty()) {
    throw Error(Errc::ProviderError, "provider response has no candidates");
  }
  std::string text;
  const json& content = (*candidates)[0].value("content", json::object());
  for (const json& part : content.value("parts", json::array())) {
    if (part.contains("text") && part["text"].is_string()) text += part["text"].get<std::string>();
  }
  return text;
}

std::string HttpProvider::generate(const PromptRequest& request) {
  // Split "scheme://host[:port]/base" into client origin and path prefix.
  const std::string& url = settings_.url;
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string base = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();
  const std::string path = base + "/models/" + request.model_id + ":generateContent";
  const std::string body = request_body(request).dump();

  httplib::Client client(origin);
  const auto secs = settings_.timeout_ms / 1000;
  const auto usecs = (settings_.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) headers.emplace("x-goog-api-key", settings_.api_key);

  std::string last_error;
  bool last_was_timeout = false;
  std::int64_t backoff = settings_.initial_backoff_ms;
  for (int attempt = 1; attempt <= std::max(1, settings_.max_attempts); ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (res) {
      if (res->status == 200) return parse_response(res->body);
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      last_was_timeout = false;
      if (res->status != 429) {
        throw Error(Errc::ProviderError, last_error);
      }
    } else {
      const auto err = res.error();
      last_error = httplib::to_string(err);
      last_was_timeout = err == httplib::Error::Read || err == httplib::Error::Write ||
                         err == httplib::Error::ConnectionTimeout;
    }
    if (attempt < settings_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
  }
  throw Error(last_was_timeout ? Errc::Timeout : Errc::ProviderError,
              "after " + std::to_string(settings_.max_attempts) + " attempts: " + last_error);
}

// LlmClient -----------------------------------------------------------------------------

LlmClient::LlmClient(ClientMode mode, TranscriptStore* store, LlmProvider* provider)
    : mode_(mode), store_(store), provider_(provider) {
  if ((mode == ClientMode::Record || mode == ClientMode::Replay) && store == nullptr) {
    throw Error(Errc::InvalidArgument, to_string(mode) + " mode needs a transcript store");
  }
  if ((mode == ClientMode::Live || mode == ClientMode::Record) && provider == nullptr) {
    throw Error(Errc::InvalidArgument, to_string(mode) + " mode needs a provider");
  }
}

std::size_t LlmClient::live_calls() const {
  std::lock_guard lock(mu_);
  return live_calls_;
}

Transcript LlmClient::call_live(const PromptRequest& request, const std::string& key) {
  Transcript t;
  t.request = request;
  t.response_text = provider_->generate(request);
  t.provider = ProviderKind::Live;
  t.cache_key = key;
  t.timestamp = utc_now_iso8601();
  std::lock_guard lock(mu_);
  ++live_calls_;
  return t;
}

Transcript LlmClient::complete(const PromptRequest& request) {
  if (request.parts.empty()) {
    throw Error(Errc::InvalidArgument, "prompt request has no parts");
  }
  const std::string key = cache_key(request);
  switch (mode_) {
    case ClientMode::Live:
      return call_live(request, key);
    case ClientMode::Replay: {
      auto stored = store_->load(key);
      if (!stored) throw Error(Errc::ReplayMiss, "no transcript for " + key);
      stored->provider = ProviderKind::Replay;
      return *stored;
    }
    case ClientMode::Record: {
      // One live call per key even with concurrent callers.
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !in_flight_.contains(key); });
        if (auto stored = store_->load(key)) {
          stored->provider = ProviderKind::Replay;
          return *stored;
        }
        in_flight_.insert(key);
      }
      try {
        Transcript t = call_live(request, key);
        store_->save(t);
        {
          std::lock_guard lock(mu_);
          in_flight_.erase(key);
        }
        cv_.notify_all();
        return t;
      } catch (...) {
        {
          std::lock_guard lock(mu_);
          in_flight_.erase(key);
        }
        cv_.notify_all();
        throw;
      }
    }
  }
  throw Error(Errc::InvalidArgument, "unknown client mode");
}

std::string to_string(ClientMode mode) {
  switch (mode) {
    case ClientMode::Live: return "live";
    case ClientMode::Record: return "record";
    case ClientMode::Replay: return "replay";
  }
  return "unknown";
}

ClientMode parse_client_mode(std::string_view text) {
  if (text == "live") return ClientMode::Live;
  if (text == "record") return ClientMode::Record;
  if (text == "replay") return ClientMode::Replay;
  throw Error(Errc::InvalidArgument, "provider mode must be live, record or replay");
}

}  // namespace caption
