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

#include "caption/crawl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "caption/error.hpp"
#include "caption/imaging.hpp"
#include "json_util.hpp"

namespace caption {

namespace fs = std::filesystem;
using detail::get_array;
using detail::get_bool;
using detail::get_int;
using detail::get_string;
using detail::opt_int;
using detail::opt_string;
using detail::require;

const Bytes& Screen::png() const {
  static const Bytes kEmpty;
  return screenshot_png ? *screenshot_png : kEmpty;
}

bool operator==(const Screen& a, const Screen& b) {
  return a.id == b.id && a.screenshot == b.screenshot && a.screenshot_path == b.screenshot_path &&
         a.width_px == b.width_px && a.height_px == b.height_px && a.root == b.root && a.activity == b.activity &&
         a.png() == b.png();
}

const Screen* Dataset::find_screen(std::string_view screen_id) const {
  auto it = screens.find(screen_id);
  return it == screens.end() ? nullptr : &it->second;
}

namespace {

int to_int(std::int64_t v, const std::string& where) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(Errc::SchemaViolation, where + ": integer out of range");
  }
  return static_cast<int>(v);
}

UiNode parse_node_at(const json& doc, const std::string& where) {
  UiNode node;
  node.node_id = get_string(doc, "node_id", where);
  const std::string here = where + "/" + node.node_id;
  const json& b = require(doc, "bounds", here);
  if (!b.is_array() || b.size() != 4 || !std::all_of(b.begin(), b.end(), [](const json& v) {
        return v.is_number_integer();
      })) {
    throw Error(Errc::SchemaViolation, here + ": bounds must be [left, top, right, bottom] integers");
  }
  node.bounds = Rect{to_int(b[0].get<std::int64_t>(), here), to_int(b[1].get<std::int64_t>(), here),
                     to_int(b[2].get<std::int64_t>(), here), to_int(b[3].get<std::int64_t>(), here)};
  if (node.bounds.left >= node.bounds.right || node.bounds.top >= node.bounds.bottom) {
    throw Error(Errc::SchemaViolation, here + ": degenerate bounds " + to_string(node.bounds));
  }
  node.class_name = get_string(doc, "class_name", here);
  node.resource_id = opt_string(doc, "resource_id", here);
  node.text = opt_string(doc, "text", here);
  node.content_desc = opt_string(doc, "content_desc", here);
  node.clickable = get_bool(doc, "clickable", false, here);
  node.visible = get_bool(doc, "visible", true, here);
  if (auto it = doc.find("children"); it != doc.end()) {
    if (!it->is_array()) {
      throw Error(Errc::SchemaViolation, here + ": children must be an array");
    }
    node.children.reserve(it->size());
    for (const json& child : *it) {
      node.children.push_back(parse_node_at(child, here));
    }
  }
  return node;
}

void collect_ids(const UiNode& node, std::set<std::string>& seen, const std::string& where) {
  if (!seen.insert(node.node_id).second) {
    throw Error(Errc::SchemaViolation, where + ": duplicate node_id \"" + node.node_id + "\"");
  }
  for (const UiNode& child : node.children) collect_ids(child, seen, where);
}

void put_optional(json& out, const char* key, const std::optional<std::string>& v) {
  if (v) out[key] = *v;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

void collect_eligible(const Screen& screen, const UiNode& node, const EligibilityPolicy& policy,
                      std::vector<const UiNode*>& out) {
  if (is_eligible(screen, node, policy)) out.push_back(&node);
  for (const UiNode& child : node.children) collect_eligible(screen, child, policy, out);
}

}  // namespace

UiNode parse_node(const json& doc) { return parse_node_at(doc, "node"); }

Screen parse_screen(const json& doc, const fs::path& base_dir) {
  Screen s;
  s.id = get_string(doc, "id", "screen");
  const std::string where = "screen " + s.id;
  s.screenshot = get_string(doc, "screenshot", where);
  s.screenshot_path = base_dir / s.screenshot;
  s.width_px = to_int(get_int(doc, "width_px", where), where);
  s.height_px = to_int(get_int(doc, "height_px", where), where);
  if (s.width_px <= 0 || s.height_px <= 0) {
    throw Error(Errc::SchemaViolation, where + ": width_px and height_px must be positive");
  }
  s.activity = opt_string(doc, "activity", where);
  s.root = parse_node_at(require(doc, "root", where), where);
  std::set<std::string> ids;
  collect_ids(s.root, ids, where);
  if (!Rect{0, 0, s.width_px, s.height_px}.contains(s.root.bounds)) {
    throw Error(Errc::SchemaViolation, where + ": root bounds exceed the screen");
  }

  if (!fs::exists(s.screenshot_path)) {
    throw Error(Errc::MissingFile, where + ": screenshot " + s.screenshot_path.string() + " not found");
  }
  auto png = std::make_shared<const Bytes>(read_file_bytes(s.screenshot_path));
  const Image img = decode_png(*png);
  if (img.width() != s.width_px || img.height() != s.height_px) {
    throw Error(Errc::SchemaViolation, where + ": screenshot is " + std::to_string(img.width()) + "x" +
                                           std::to_string(img.height()) + ", manifest says " +
                                           std::to_string(s.width_px) + "x" + std::to_string(s.height_px));
  }
  s.screenshot_png = std::move(png);
  return s;
}

Dataset parse_dataset_json(const json& doc, const fs::path& base_dir) {
  Dataset ds;
  ds.id = get_string(doc, "id", "manifest");
  const std::string where = "dataset " + ds.id;
  ds.source_name = get_string(doc, "source_name", where);
  for (const json& sj : get_array(doc, "screens", where)) {
    Screen screen = parse_screen(sj, base_dir);
    const std::string sid = screen.id;
    if (!ds.screens.emplace(sid, std::move(screen)).second) {
      throw Error(Errc::SchemaViolation, where + ": duplicate screen id \"" + sid + "\"");
    }
  }
  std::size_t index = 0;
  for (const json& tj : get_array(doc, "traces", where)) {
    const std::string at = where + " trace " + std::to_string(index++);
    InteractionTrace t;
    t.origin_screen_id = get_string(tj, "origin", at);
    t.element_node_id = get_string(tj, "element", at);
    t.destination_screen_id = get_string(tj, "destination", at);
    if (get_string(tj, "gesture", at) != "tap") {
      throw Error(Errc::SchemaViolation, at + ": only \"tap\" gestures are supported");
    }
    t.dwell_ms = opt_int(tj, "dwell_ms", at);
    if (t.dwell_ms && *t.dwell_ms < 0) {
      throw Error(Errc::SchemaViolation, at + ": dwell_ms must be non-negative");
    }
    const Screen* origin = ds.find_screen(t.origin_screen_id);
    if (origin == nullptr) {
      throw Error(Errc::DanglingReference, at + ": unknown origin screen \"" + t.origin_screen_id + "\"");
    }
    if (ds.find_screen(t.destination_screen_id) == nullptr) {
      throw Error(Errc::DanglingReference,
                  at + ": unknown destination screen \"" + t.destination_screen_id + "\"");
    }
    if (find_node(*origin, t.element_node_id) == nullptr) {
      throw Error(Errc::DanglingReference, at + ": node \"" + t.element_node_id + "\" not on screen \"" +
                                               t.origin_screen_id + "\"");
    }
    ds.traces.push_back(std::move(t));
  }
  return ds;
}

Dataset parse_dataset(const fs::path& manifest_path) {
  const std::string text = read_file_text(manifest_path);
  const json doc = detail::parse_json_text(text, manifest_path.string());
  return parse_dataset_json(doc, manifest_path.parent_path());
}

json to_json(const UiNode& node) {
  json out;
  out["node_id"] = node.node_id;
  out["bounds"] = {node.bounds.left, node.bounds.top, node.bounds.right, node.bounds.bottom};
  out["class_name"] = node.class_name;
  put_optional(out, "resource_id", node.resource_id);
  put_optional(out, "text", node.text);
  put_optional(out, "content_desc", node.content_desc);
  out["clickable"] = node.clickable;
  out["visible"] = node.visible;
  json children = json::array();
  for (const UiNode& child : node.children) children.push_back(to_json(child));
  out["children"] = std::move(children);
  return out;
}

json to_json(const Screen& screen) {
  json out;
  out["id"] = screen.id;
  out["screenshot"] = screen.screenshot;
  out["width_px"] = screen.width_px;
  out["height_px"] = screen.height_px;
  put_optional(out, "activity", screen.activity);
  out["root"] = to_json(screen.root);
  return out;
}

json to_manifest_json(const Dataset& dataset) {
  json out;
  out["id"] = dataset.id;
  out["source_name"] = dataset.source_name;
  json screens = json::array();
  for (const auto& [id, screen] : dataset.screens) screens.push_back(to_json(screen));
  out["screens"] = std::move(screens);
  json traces = json::array();
  for (const InteractionTrace& t : dataset.traces) {
    json tj{{"origin", t.origin_screen_id},
            {"element", t.element_node_id},
            {"destination", t.destination_screen_id},
            {"gesture", "tap"}};
    if (t.dwell_ms) tj["dwell_ms"] = *t.dwell_ms;
    traces.push_back(std::move(tj));
  }
  out["traces"] = std::move(traces);
  return out;
}

const UiNode* find_node(const UiNode& root, std::string_view node_id) {
  if (root.node_id == node_id) return &root;
  for (const UiNode& child : root.children) {
    if (const UiNode* hit = find_node(child, node_id)) return hit;
  }
  return nullptr;
}

bool has_text(const std::optional<std::string>& value) {
  return value && std::any_of(value->begin(), value->end(), [](unsigned char c) { return !std::isspace(c); });
}

bool is_eligible(const Screen& screen, const UiNode& node, const EligibilityPolicy& policy) {
  if (!node.clickable || !node.visible) return false;
  const bool image_class = std::any_of(policy.image_class_suffixes.begin(), policy.image_class_suffixes.end(),
                                       [&](const std::string& sfx) { return ends_with(node.class_name, sfx); });
  if (!image_class && has_text(node.text)) return false;
  const double screen_area = static_cast<double>(screen.width_px) * static_cast<double>(screen.height_px);
  const double frac =
      static_cast<double>(clamp_to(node.bounds, screen.width_px, screen.height_px).area()) / screen_area;
  return frac >= policy.min_frac && frac <= policy.max_frac;
}

std::vector<const UiNode*> eligible_image_buttons(const Screen& screen, const EligibilityPolicy& policy) {
  std::vector<const UiNode*> out;
  collect_eligible(screen, screen.root, policy, out);
  return out;
}

std::string sample_id_for(std::string_view dataset_id, const InteractionTrace& trace) {
  std::string id(dataset_id);
  id += ':';
  id += trace.origin_screen_id;
  id += ':';
  id += trace.element_node_id;
  id += ':';
  id += trace.destination_screen_id;
  return id;
}

ButtonSample resolve_sample(const Dataset& dataset, const InteractionTrace& trace,
                            const EligibilityPolicy& policy) {
  const Screen* origin = dataset.find_screen(trace.origin_screen_id);
  const Screen* destination = dataset.find_screen(trace.destination_screen_id);
  if (origin == nullptr || destination == nullptr) {
    throw Error(Errc::DanglingReference, "trace references an unknown screen");
  }
  const UiNode* element = find_node(*origin, trace.element_node_id);
  if (element == nullptr) {
    throw Error(Errc::DanglingReference, "node \"" + trace.element_node_id + "\" not on screen \"" +
                                             trace.origin_screen_id + "\"");
  }
  if (trace.destination_screen_id == trace.origin_screen_id) {
    throw Error(Errc::SelfTransition, "trace on \"" + trace.element_node_id + "\" returns to its origin");
  }
  if (!is_eligible(*origin, *element, policy)) {
    throw Error(Errc::IneligibleElement, "node \"" + trace.element_node_id + "\" is not an image button");
  }
  ButtonSample sample;
  sample.sample_id = sample_id_for(dataset.id, trace);
  sample.dataset_id = dataset.id;
  sample.origin = *origin;
  sample.element = *element;
  sample.destination = *destination;
  if (has_text(element->content_desc)) sample.developer_label = element->content_desc;
  return sample;
}

}  // namespace caption
