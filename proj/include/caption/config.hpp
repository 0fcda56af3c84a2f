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
#include <functional>
#include <optional>
#include <string>

#include "caption/crawl.hpp"
#include "caption/labelgen.hpp"
#include "caption/llm.hpp"

namespace caption {

/// Harness settings. Read from a JSON file; CAPTION_PROVIDER_URL, CAPTION_API_KEY
/// and CAPTION_MODEL_ID override the provider section.
struct Config {
  ProviderSettings provider;
  GenerationConfig generation;
  EligibilityPolicy eligibility;
  std::int64_t explore_timeout_ms = 2000;
  std::uint64_t sample_seed = 0;
  std::uint64_t assign_seed = 0;
  std::uint64_t session_seed = 0;
  std::size_t parallelism = 4;
  Technique caption_technique = Technique::CaptionS3;
  /// Empty means <workspace>/transcripts.
  std::filesystem::path transcripts_dir;
  /// Empty means the bundled prompts/ directory.
  std::filesystem::path prompts_dir;
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

std::optional<std::string> process_env(const char* name);

Config config_from_json(const json& doc, const std::filesystem::path& base_dir);
/// Defaults when `path` is empty. Throws Error{MissingFile | SchemaViolation}.
Config load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env = process_env);
void apply_env(Config& config, const EnvLookup& env);

/// Prompts directory baked in at build time.
std::filesystem::path bundled_prompts_dir();

}  // namespace caption
