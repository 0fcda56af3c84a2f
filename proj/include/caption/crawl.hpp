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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caption/digest.hpp"
#include "caption/geometry.hpp"
#include "json.hpp"

namespace caption {

using json = nlohmann::json;

struct UiNode {
  std::string node_id;
  Rect bounds;
  std::string class_name;
  std::optional<std::string> resource_id;
  std::optional<std::string> text;
  std::optional<std::string> content_desc;
  bool clickable = false;
  bool visible = true;
  std::vector<UiNode> children;

  friend bool operator==(const UiNode&, const UiNode&) = default;
};

struct Screen {
  std::string id;
  /// Path as written in the manifest (relative to the manifest directory, or absolute).
  std::string screenshot;
  /// `screenshot` resolved against the manifest directory.
  std::filesystem::path screenshot_path;
  int width_px = 0;
  int height_px = 0;
  UiNode root;
  std::optional<std::string> activity;
  /// Raw PNG file contents, loaded and verified at parse time. Shared between copies.
  std::shared_ptr<const Bytes> screenshot_png;

  const Bytes& png() const;

  friend bool operator==(const Screen& a, const Screen& b);
};

enum class Gesture { Tap };

struct InteractionTrace {
  std::string origin_screen_id;
  std::string element_node_id;
  std::string destination_screen_id;
  Gesture gesture = Gesture::Tap;
  std::optional<std::int64_t> dwell_ms;

  friend bool operator==(const InteractionTrace&, const InteractionTrace&) = default;
};

/// Immutable after parse_dataset; safe to share across readers.
struct Dataset {
  std::string id;
  std::string source_name;
  std::map<std::string, Screen, std::less<>> screens;
  std::vector<InteractionTrace> traces;

  const Screen* find_screen(std::string_view id) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ButtonSample {
  std::string sample_id;
  std::string dataset_id;
  Screen origin;
  UiNode element;
  Screen destination;
  std::optional<std::string> developer_label;
};

struct EligibilityPolicy {
  /// Suffix-matched against UiNode::class_name.
  std::vector<std::string> image_class_suffixes{"ImageButton", "ImageView", "AppCompatImageButton",
                                                "AppCompatImageView"};
  double min_frac = 0.0001;
  double max_frac = 0.30;
};

// Manifest I/O ---------------------------------------------------------------

/// Parses and fully validates a dataset manifest; screenshots are resolved
/// relative to the manifest's directory and must decode to the declared size.
/// Throws Error{MissingFile | SchemaViolation | DanglingReference}.
Dataset parse_dataset(const std::filesystem::path& manifest_path);
Dataset parse_dataset_json(const json& doc, const std::filesystem::path& base_dir);

Screen parse_screen(const json& doc, const std::filesystem::path& base_dir);
UiNode parse_node(const json& doc);

json to_json(const UiNode& node);
json to_json(const Screen& screen);
json to_manifest_json(const Dataset& dataset);

// Queries ----------------------------------------------------------------------

const UiNode* find_node(const UiNode& root, std::string_view node_id);
inline const UiNode* find_node(const Screen& screen, std::string_view node_id) {
  return find_node(screen.root, node_id);
}

/// Missing and empty (or whitespace-only) strings both count as unlabeled.
bool has_text(const std::optional<std::string>& value);

bool is_eligible(const Screen& screen, const UiNode& node, const EligibilityPolicy& policy = {});

/// Eligible image buttons in depth-first document order.
std::vector<const UiNode*> eligible_image_buttons(const Screen& screen, const EligibilityPolicy& policy = {});

std::string sample_id_for(std::string_view dataset_id, const InteractionTrace& trace);

/// Throws Error{DanglingReference | IneligibleElement | SelfTransition}.
ButtonSample resolve_sample(const Dataset& dataset, const InteractionTrace& trace,
                            const EligibilityPolicy& policy = {});

}  // namespace caption
