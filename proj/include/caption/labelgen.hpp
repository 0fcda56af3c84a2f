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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caption/crawl.hpp"
#include "caption/imaging.hpp"
#include "caption/llm.hpp"

namespace caption {

/// Prompting strategies. The first three add destination-screen context.
enum class Strategy { DestShot, DestDesc, DestDescAndShot, Baseline };

/// Label producers, in canonical comparison order.
enum class Technique { CaptionS1, CaptionS2, CaptionS3, Baseline, Human };

inline constexpr Strategy kAllStrategies[] = {Strategy::DestShot, Strategy::DestDesc, Strategy::DestDescAndShot,
                                              Strategy::Baseline};
inline constexpr Technique kAllTechniques[] = {Technique::CaptionS1, Technique::CaptionS2, Technique::CaptionS3,
                                               Technique::Baseline, Technique::Human};

Technique technique_for(Strategy strategy) noexcept;
bool needs_description(Strategy strategy) noexcept;

/// "s1" | "s2" | "s3" | "baseline".
std::string to_string(Strategy strategy);
Strategy parse_strategy(std::string_view text);
/// "caption_s1" | "caption_s2" | "caption_s3" | "baseline" | "human".
std::string to_string(Technique technique);
Technique parse_technique(std::string_view text);

struct LabelCandidate {
  std::string sample_id;
  Technique technique = Technique::CaptionS3;
  std::string text;
  /// Cache keys of every completion behind this label, in call order. Empty for Human.
  std::vector<std::string> transcript_refs;

  friend bool operator==(const LabelCandidate&, const LabelCandidate&) = default;
};

json to_json(const LabelCandidate& candidate);
LabelCandidate candidate_from_json(const json& doc);

struct ScreenDescription {
  std::string screen_id;
  std::string text;  // at most kMaxDescriptionChars code points
};

inline constexpr std::size_t kMaxDescriptionChars = 600;
inline constexpr std::size_t kMaxLabelChars = 60;

/// Prompt text loaded from prompts/. Each file is split into "## <name>" sections;
/// {CLASS}, {RESOURCE_ID}, {BOUNDS}, {TEXT} and {DESCRIPTION} are substituted per request.
struct PromptTemplates {
  std::string label_system;
  std::string label_element;
  std::string label_description;
  std::string baseline_system;
  std::string baseline_element;
  std::string describe_system;
  std::string describe_request;

  /// Reads label_system.txt, baseline_system.txt, describe_destination.txt.
  static PromptTemplates load(const std::filesystem::path& dir);
};

std::map<std::string, std::string> parse_sections(std::string_view text);
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

struct GenerationConfig {
  std::string model_id = "gemini-2.5-flash";
  double temperature = 0.0;
  int label_max_tokens = 64;
  int describe_max_tokens = 256;
  HighlightStyle highlight;
  bool highlight_in_prompt = true;
  int max_image_dim = kDefaultPromptMaxDim;
};

struct PromptAssets {
  Bytes origin_png;       // highlighted (when enabled) and downscaled
  Bytes destination_png;  // downscaled
};

PromptAssets prepare_assets(const ButtonSample& sample, const GenerationConfig& config);

/// Normalizes a raw model reply into a content label.
/// Throws Error{EmptyLabel | TooLong | RedundantWord}.
std::string postprocess_label(std::string_view raw);

/// Builds prompts and drives an LlmClient for one sample at a time. Thread-safe
/// as long as the client is.
class LabelGenerator {
 public:
  LabelGenerator(PromptTemplates templates, GenerationConfig config, LlmClient& client);

  const GenerationConfig& config() const noexcept { return config_; }
  const PromptTemplates& templates() const noexcept { return templates_; }

  PromptRequest describe_request(const ButtonSample& sample, const PromptAssets& assets) const;

  /// Throws Error{EmptyResponse} plus anything LlmClient::complete raises.
  ScreenDescription describe_destination(const ButtonSample& sample, std::string* transcript_ref = nullptr) const;

  /// Throws Error{MissingDescription | UnexpectedDescription}.
  PromptRequest build_prompt(const ButtonSample& sample, Strategy strategy,
                             const std::optional<ScreenDescription>& description,
                             const PromptAssets& assets) const;

  LabelCandidate generate_label(const ButtonSample& sample, Strategy strategy) const;

 private:
  std::map<std::string, std::string> element_vars(const ButtonSample& sample) const;
  ScreenDescription describe_with_assets(const ButtonSample& sample, const PromptAssets& assets,
                                         std::string* transcript_ref) const;

  PromptTemplates templates_;
  GenerationConfig config_;
  LlmClient& client_;
};

}  // namespace caption
