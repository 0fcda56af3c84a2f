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

#include "caption/config.hpp"

#include <cstdlib>

#include "caption/error.hpp"
#include "json_util.hpp"

#ifndef CAPTION_PROMPTS_DIR
#define CAPTION_PROMPTS_DIR "prompts"
#endif

namespace caption {

namespace fs = std::filesystem;

std::optional<std::string> process_env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

fs::path bundled_prompts_dir() { return fs::path(CAPTION_PROMPTS_DIR); }

namespace {

std::uint64_t get_u64(const json& obj, const char* key, std::uint64_t fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0)) {
    throw Error(Errc::SchemaViolation, where + ": \"" + key + "\" must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

}  // namespace

Config config_from_json(const json& doc, const fs::path& base_dir) {
  const std::string where = "config";
  if (!doc.is_object()) throw Error(Errc::SchemaViolation, where + ": expected an object");
  Config c;
  if (auto p = doc.find("provider"); p != doc.end()) {
    c.provider.url = detail::opt_string(*p, "url", where).value_or(c.provider.url);
    c.provider.api_key = detail::opt_string(*p, "api_key", where).value_or(c.provider.api_key);
    c.provider.timeout_ms = detail::opt_int(*p, "timeout_ms", where).value_or(c.provider.timeout_ms);
    c.provider.max_attempts =
        static_cast<int>(detail::opt_int(*p, "max_attempts", where).value_or(c.provider.max_attempts));
    c.provider.initial_backoff_ms = detail::opt_int(*p, "initial_backoff_ms", where).value_or(c.provider.initial_backoff_ms);
    c.generation.model_id = detail::opt_string(*p, "model_id", where).value_or(c.generation.model_id);
  }
  if (auto h = doc.find("highlight"); h != doc.end()) {
    if (auto color = h->find("color"); color != h->end()) {
      if (!color->is_array() || color->size() != 4) {
        throw Error(Errc::SchemaViolation, where + ": highlight.color must be [r, g, b, a]");
      }
      const auto ch = [&](std::size_t i) { return static_cast<std::uint8_t>((*color)[i].get<int>()); };
      c.generation.highlight.color = Rgba{ch(0), ch(1), ch(2), ch(3)};
    }
    c.generation.highlight.stroke_px =
        static_cast<int>(detail::opt_int(*h, "stroke_px", where).value_or(c.generation.highlight.stroke_px));
    c.generation.highlight.inflate_px =
        static_cast<int>(detail::opt_int(*h, "inflate_px", where).value_or(c.generation.highlight.inflate_px));
    c.generation.highlight_in_prompt = detail::get_bool(*h, "in_prompt", c.generation.highlight_in_prompt, where);
    if (c.generation.highlight.stroke_px < 1) {
      throw Error(Errc::SchemaViolation, where + ": highlight.stroke_px must be >= 1");
    }
  }
  if (auto s = doc.find("seeds"); s != doc.end()) {
    c.sample_seed = get_u64(*s, "sample", c.sample_seed, where);
    c.assign_seed = get_u64(*s, "assign", c.assign_seed, where);
    c.session_seed = get_u64(*s, "session", c.session_seed, where);
  }
  c.explore_timeout_ms = detail::opt_int(doc, "timeout_ms", where).value_or(c.explore_timeout_ms);
  c.generation.max_image_dim =
      static_cast<int>(detail::opt_int(doc, "max_image_dim", where).value_or(c.generation.max_image_dim));
  c.parallelism = static_cast<std::size_t>(detail::opt_int(doc, "parallelism", where).value_or(4));
  if (c.parallelism == 0) c.parallelism = 1;
  if (auto t = detail::opt_string(doc, "caption_technique", where)) c.caption_technique = parse_technique(*t);
  if (auto d = detail::opt_string(doc, "transcripts_dir", where)) c.transcripts_dir = base_dir / *d;
  if (auto d = detail::opt_string(doc, "prompts_dir", where)) c.prompts_dir = base_dir / *d;
  return c;
}

void apply_env(Config& config, const EnvLookup& env) {
  if (auto v = env("CAPTION_PROVIDER_URL")) config.provider.url = *v;
  if (auto v = env("CAPTION_API_KEY")) config.provider.api_key = *v;
  if (auto v = env("CAPTION_MODEL_ID")) config.generation.model_id = *v;
}

Config load_config(const std::optional<fs::path>& path, const EnvLookup& env) {
  Config c;
  if (path) {
    c = config_from_json(detail::parse_json_text(read_file_text(*path), path->string()), path->parent_path());
  }
  apply_env(c, env);
  return c;
}

}  // namespace caption
