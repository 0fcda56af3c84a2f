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

#include "caption/labelgen.hpp"

#include <array>
#include <cctype>

#include "caption/error.hpp"
#include "json_util.hpp"

namespace caption {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return !is_continuation(static_cast<unsigned char>(c)); }));
}

std::string utf8_truncate(std::string_view s, std::size_t max_chars) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_continuation(static_cast<unsigned char>(s[i]))) {
      if (chars == max_chars) return std::string(s.substr(0, i));
      ++chars;
    }
  }
  return std::string(s);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

constexpr std::array<std::string_view, 10> kWrappers{"\"", "'", "`", "*", "_", "#",
                                                     "“", "”", "‘", "’"};

std::string_view strip_wrappers(std::string_view s) {
  for (bool changed = true; changed;) {
    changed = false;
    const std::string_view before = s;
    s = trim(s);
    for (std::string_view w : kWrappers) {
      while (s.starts_with(w)) s.remove_prefix(w.size());
      while (s.ends_with(w)) s.remove_suffix(w.size());
    }
    if (s.starts_with("- ")) s.remove_prefix(2);
    while (s.ends_with('.')) s.remove_suffix(1);
    changed = s != before;
  }
  return s;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

bool contains_word(std::string_view s, std::string_view word) {
  std::string token;
  const auto matches = [&] { return token == word; };
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      if (matches()) return true;
      token.clear();
    }
  }
  return matches();
}

std::string required_section(const std::map<std::string, std::string>& sections, const std::string& name,
                             const std::filesystem::path& file) {
  auto it = sections.find(name);
  if (it == sections.end()) {
    throw Error(Errc::SchemaViolation, file.string() + ": missing \"## " + name + "\" section");
  }
  return it->second;
}

}  // namespace

Technique technique_for(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::DestShot: return Technique::CaptionS1;
    case Strategy::DestDesc: return Technique::CaptionS2;
    case Strategy::DestDescAndShot: return Technique::CaptionS3;
    case Strategy::Baseline: return Technique::Baseline;
  }
  return Technique::Baseline;
}

bool needs_description(Strategy strategy) noexcept {
  return strategy == Strategy::DestDesc || strategy == Strategy::DestDescAndShot;
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::DestShot: return "s1";
    case Strategy::DestDesc: return "s2";
    case Strategy::DestDescAndShot: return "s3";
    case Strategy::Baseline: return "baseline";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view text) {
  for (Strategy s : kAllStrategies) {
    if (text == to_string(s)) return s;
  }
  throw Error(Errc::InvalidArgument, "strategy must be s1, s2, s3 or baseline");
}

std::string to_string(Technique technique) {
  switch (technique) {
    case Technique::CaptionS1: return "caption_s1";
    case Technique::CaptionS2: return "caption_s2";
    case Technique::CaptionS3: return "caption_s3";
    case Technique::Baseline: return "baseline";
    case Technique::Human: return "human";
  }
  return "unknown";
}

Technique parse_technique(std::string_view text) {
  for (Technique t : kAllTechniques) {
    if (text == to_string(t)) return t;
  }
  throw Error(Errc::SchemaViolation, "unknown technique \"" + std::string(text) + "\"");
}

json to_json(const LabelCandidate& candidate) {
  return json{{"sample_id", candidate.sample_id},
              {"technique", to_string(candidate.technique)},
              {"text", candidate.text},
              {"transcript_refs", candidate.transcript_refs}};
}

LabelCandidate candidate_from_json(const json& doc) {
  const std::string where = "candidate";
  LabelCandidate c;
  c.sample_id = detail::get_string(doc, "sample_id", where);
  c.technique = parse_technique(detail::get_string(doc, "technique", where));
  c.text = detail::get_string(doc, "text", where);
  if (auto it = doc.find("transcript_refs"); it != doc.end()) {
    c.transcript_refs = it->get<std::vector<std::string>>();
  }
  if (c.text.empty()) throw Error(Errc::SchemaViolation, where + ": empty label text");
  if (c.technique == Technique::Human && !c.transcript_refs.empty()) {
    throw Error(Errc::SchemaViolation, where + ": human labels carry no transcripts");
  }
  return c;
}

std::map<std::string, std::string> parse_sections(std::string_view text) {
  std::map<std::string, std::string> out;
  std::string current;
  std::string body;
  bool open = false;
  const auto flush = [&] {
    if (open) out[current] = std::string(trim(body));
    body.clear();
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    if (line.starts_with("## ")) {
      flush();
      current = std::string(trim(line.substr(3)));
      open = true;
    } else if (open) {
      body.append(line);
      body.push_back('\n');
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  flush();
  return out;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        auto it = vars.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  const auto label_file = dir / "label_system.txt";
  const auto baseline_file = dir / "baseline_system.txt";
  const auto describe_file = dir / "describe_destination.txt";
  const auto label = parse_sections(read_file_text(label_file));
  const auto baseline = parse_sections(read_file_text(baseline_file));
  const auto describe = parse_sections(read_file_text(describe_file));
  PromptTemplates t;
  t.label_system = required_section(label, "system", label_file);
  t.label_element = required_section(label, "element", label_file);
  t.label_description = required_section(label, "description", label_file);
  t.baseline_system = required_section(baseline, "system", baseline_file);
  t.baseline_element = required_section(baseline, "element", baseline_file);
  t.describe_system = required_section(describe, "system", describe_file);
  t.describe_request = required_section(describe, "request", describe_file);
  return t;
}

PromptAssets prepare_assets(const ButtonSample& sample, const GenerationConfig& config) {
  PromptAssets assets;
  Image origin = decode_png(sample.origin.png());
  if (config.highlight_in_prompt) origin = highlight_element(origin, sample.element.bounds, config.highlight);
  assets.origin_png = encode_png(downscale_max(origin, config.max_image_dim));
  const Image destination = decode_png(sample.destination.png());
  if (std::max(destination.width(), destination.height()) <= config.max_image_dim) {
    assets.destination_png = sample.destination.png();
  } else {
    assets.destination_png = encode_png(downscale_max(destination, config.max_image_dim));
  }
  return assets;
}

std::string postprocess_label(std::string_view raw) {
  std::string label = collapse_whitespace(strip_wrappers(raw));
  if (label.empty()) {
    throw Error(Errc::EmptyLabel, "label is empty after normalization");
  }
  if (contains_word(label, "button")) {
    throw Error(Errc::RedundantWord, "\"" + label + "\" names the role; screen readers announce it already");
  }
  if (utf8_length(label) > kMaxLabelChars) {
    throw Error(Errc::TooLong, "label exceeds " + std::to_string(kMaxLabelChars) + " characters");
  }
  label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
  return label;
}

// LabelGenerator --------------------------------------------------------------------

LabelGenerator::LabelGenerator(PromptTemplates templates, GenerationConfig config, LlmClient& client)
    : templates_(std::move(templates)), config_(std::move(config)), client_(client) {}

std::map<std::string, std::string> LabelGenerator::element_vars(const ButtonSample& sample) const {
  const UiNode& e = sample.element;
  return {{"CLASS", e.class_name},
          {"RESOURCE_ID", e.resource_id ? *e.resource_id : "(none)"},
          {"BOUNDS", to_string(e.bounds)},
          {"TEXT", has_text(e.text) ? *e.text : "(none)"}};
}

PromptRequest LabelGenerator::describe_request(const ButtonSample& sample, const PromptAssets& assets) const {
  PromptRequest r;
  r.model_id = config_.model_id;
  r.system_text = render_template(templates_.describe_system, element_vars(sample));
  r.temperature = config_.temperature;
  r.max_output_tokens = config_.describe_max_tokens;
  r.parts.emplace_back(TextPart{render_template(templates_.describe_request, element_vars(sample))});
  r.parts.emplace_back(ImagePart{assets.destination_png});
  return r;
}

ScreenDescription LabelGenerator::describe_destination(const ButtonSample& sample, std::string* transcript_ref) const {
  return describe_with_assets(sample, prepare_assets(sample, config_), transcript_ref);
}

ScreenDescription LabelGenerator::describe_with_assets(const ButtonSample& sample, const PromptAssets& assets,
                                                       std::string* transcript_ref) const {
  const Transcript t = client_.complete(describe_request(sample, assets));
  if (transcript_ref != nullptr) *transcript_ref = t.cache_key;
  std::string text(trim(utf8_truncate(trim(t.response_text), kMaxDescriptionChars)));
  if (text.empty()) {
    throw Error(Errc::EmptyResponse, "empty description for screen \"" + sample.destination.id + "\"");
  }
  return ScreenDescription{sample.destination.id, std::move(text)};
}

PromptRequest LabelGenerator::build_prompt(const ButtonSample& sample, Strategy strategy,
                                           const std::optional<ScreenDescription>& description,
                                           const PromptAssets& assets) const {
  if (needs_description(strategy) && !description) {
    throw Error(Errc::MissingDescription, "strategy " + to_string(strategy) + " needs a destination description");
  }
  if (!needs_description(strategy) && description) {
    throw Error(Errc::UnexpectedDescription, "strategy " + to_string(strategy) + " takes no description");
  }
  auto vars = element_vars(sample);
  if (description) vars["DESCRIPTION"] = description->text;
  const bool baseline = strategy == Strategy::Baseline;

  PromptRequest r;
  r.model_id = config_.model_id;
  r.system_text = render_template(baseline ? templates_.baseline_system : templates_.label_system, vars);
  r.temperature = config_.temperature;
  r.max_output_tokens = config_.label_max_tokens;
  r.parts.emplace_back(ImagePart{assets.origin_png});
  r.parts.emplace_back(TextPart{render_template(baseline ? templates_.baseline_element : templates_.label_element, vars)});
  switch (strategy) {
    case Strategy::DestShot:
      r.parts.emplace_back(ImagePart{assets.destination_png});
      break;
    case Strategy::DestDesc:
      r.parts.emplace_back(TextPart{render_template(templates_.label_description, vars)});
      break;
    case Strategy::DestDescAndShot:
      r.parts.emplace_back(TextPart{render_template(templates_.label_description, vars)});
      r.parts.emplace_back(ImagePart{assets.destination_png});
      break;
    case Strategy::Baseline:
      break;
  }
  return r;
}

LabelCandidate LabelGenerator::generate_label(const ButtonSample& sample, Strategy strategy) const {
  LabelCandidate c;
  c.sample_id = sample.sample_id;
  c.technique = technique_for(strategy);
  const PromptAssets assets = prepare_assets(sample, config_);
  std::optional<ScreenDescription> description;
  if (needs_description(strategy)) {
    std::string ref;
    description = describe_with_assets(sample, assets, &ref);
    c.transcript_refs.push_back(std::move(ref));
  }
  const Transcript t = client_.complete(build_prompt(sample, strategy, description, assets));
  c.transcript_refs.push_back(t.cache_key);
  c.text = postprocess_label(t.response_text);
  return c;
}

}  // namespace caption
