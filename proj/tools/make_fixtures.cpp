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

// make_fixtures: regenerates the synthetic corpus under tests/fixtures.
//
// Screens are drawn procedurally; model replies come from a scripted provider
// and are captured through the record client, so the checked-in transcript store
// is exactly what replay mode will ask for.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "caption/config.hpp"
#include "caption/error.hpp"
#include "caption/imaging.hpp"
#include "caption/rng.hpp"
#include "caption/workspace.hpp"

namespace fs = std::filesystem;
using namespace caption;

namespace {

constexpr int kW = 360;
constexpr int kH = 640;

// Drawing ---------------------------------------------------------------------------------

void fill(Image& img, Rect r, Rgba c) {
  r = intersect(r, img.bounds());
  for (int y = r.top; y < r.bottom; ++y)
    for (int x = r.left; x < r.right; ++x) img.set(x, y, c);
}

void disc(Image& img, int cx, int cy, int radius, Rgba c) {
  for (int y = cy - radius; y <= cy + radius; ++y)
    for (int x = cx - radius; x <= cx + radius; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius && x >= 0 && y >= 0 && x < img.width() && y < img.height()) img.set(x, y, c);
}

void line(Image& img, int x0, int y0, int x1, int y1, int half, Rgba c) {
  const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  for (int i = 0; i <= steps; ++i) {
    const int x = x0 + (x1 - x0) * i / std::max(steps, 1);
    const int y = y0 + (y1 - y0) * i / std::max(steps, 1);
    fill(img, Rect{x - half, y - half, x + half + 1, y + half + 1}, c);
  }
}

constexpr Rgba kInk{40, 40, 48, 255};
constexpr Rgba kPaper{250, 250, 250, 255};

// One glyph per icon kind, drawn inside `r`.
void icon(Image& img, const std::string& kind, Rect r) {
  const int cx = (r.left + r.right) / 2;
  const int cy = (r.top + r.bottom) / 2;
  const int s = r.width() / 2 - 4;
  if (kind == "swatch") {
    fill(img, Rect{r.left + 6, r.top + 6, cx, cy}, Rgba{220, 60, 60, 255});
    fill(img, Rect{cx, r.top + 6, r.right - 6, cy}, Rgba{60, 160, 70, 255});
    fill(img, Rect{r.left + 6, cy, cx, r.bottom - 6}, Rgba{60, 90, 210, 255});
    fill(img, Rect{cx, cy, r.right - 6, r.bottom - 6}, Rgba{240, 200, 40, 255});
  } else if (kind == "pencil") {
    line(img, r.left + 8, r.bottom - 8, r.right - 10, r.top + 10, 3, Rgba{230, 160, 30, 255});
    fill(img, Rect{r.left + 5, r.bottom - 11, r.left + 11, r.bottom - 5}, kInk);
  } else if (kind == "speaker") {
    fill(img, Rect{r.left + 8, cy - 6, r.left + 16, cy + 6}, kInk);
    for (int i = 0; i < 12; ++i) fill(img, Rect{r.left + 16 + i, cy - 6 - i, r.left + 17 + i, cy + 7 + i}, kInk);
    line(img, r.right - 12, cy - 10, r.right - 8, cy, 1, kInk);
    line(img, r.right - 8, cy, r.right - 12, cy + 10, 1, kInk);
  } else if (kind == "avatar") {
    disc(img, cx, cy - 6, s / 3, kInk);
    disc(img, cx, cy + s, s * 2 / 3, kInk);
    fill(img, Rect{r.left, r.bottom, r.right, r.bottom + 16}, kPaper);
  } else if (kind == "bell") {
    disc(img, cx, cy - 2, s / 2, Rgba{200, 150, 20, 255});
    fill(img, Rect{cx - s / 2 - 3, cy, cx + s / 2 + 4, cy + 8}, Rgba{200, 150, 20, 255});
    disc(img, cx, cy + 11, 3, kInk);
  } else if (kind == "brush") {
    line(img, r.right - 8, r.top + 8, cx, cy, 2, Rgba{120, 80, 40, 255});
    disc(img, cx - 4, cy + 4, 7, Rgba{150, 40, 160, 255});
  } else if (kind == "share") {
    disc(img, r.left + 12, cy, 5, kInk);
    disc(img, r.right - 12, r.top + 12, 5, kInk);
    disc(img, r.right - 12, r.bottom - 12, 5, kInk);
    line(img, r.left + 12, cy, r.right - 12, r.top + 12, 1, kInk);
    line(img, r.left + 12, cy, r.right - 12, r.bottom - 12, 1, kInk);
  } else if (kind == "crop") {
    line(img, r.left + 12, r.top + 6, r.left + 12, r.bottom - 12, 2, kInk);
    line(img, r.left + 12, r.bottom - 12, r.right - 6, r.bottom - 12, 2, kInk);
    line(img, r.left + 6, r.top + 12, r.right - 12, r.top + 12, 2, kInk);
    line(img, r.right - 12, r.top + 12, r.right - 12, r.bottom - 6, 2, kInk);
  } else if (kind == "search") {
    disc(img, cx - 4, cy - 4, 10, kInk);
    disc(img, cx - 4, cy - 4, 6, kPaper);
    line(img, cx + 4, cy + 4, r.right - 8, r.bottom - 8, 2, kInk);
  } else if (kind == "queue") {
    for (int i = 0; i < 3; ++i) fill(img, Rect{r.left + 8, r.top + 10 + 9 * i, r.right - 8, r.top + 14 + 9 * i}, kInk);
  } else if (kind == "layers") {
    for (int i = 0; i < 3; ++i) {
      fill(img, Rect{r.left + 8 + 3 * i, r.top + 8 + 8 * i, r.right - 14 + 3 * i, r.top + 20 + 8 * i},
           Rgba{static_cast<std::uint8_t>(60 + 60 * i), 120, 200, 255});
    }
  } else if (kind == "qr") {
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x)
        if ((x * 7 + y * 3 + x * y) % 3 != 0)
          fill(img, Rect{r.left + 7 + 5 * x, r.top + 7 + 5 * y, r.left + 12 + 5 * x, r.top + 12 + 5 * y}, kInk);
  } else if (kind == "menu") {
    for (int i = 0; i < 3; ++i) fill(img, Rect{r.left + 8, r.top + 12 + 9 * i, r.right - 8, r.top + 16 + 9 * i}, kInk);
    fill(img, Rect{r.left + 8, r.top + 12, r.left + 14, r.top + 34}, Rgba{240, 240, 240, 255});
  } else if (kind == "sliders") {
    for (int i = 0; i < 3; ++i) {
      const int x = r.left + 11 + 11 * i;
      line(img, x, r.top + 8, x, r.bottom - 8, 1, kInk);
      fill(img, Rect{x - 4, r.top + 10 + 8 * i, x + 5, r.top + 16 + 8 * i}, Rgba{220, 60, 60, 255});
    }
  } else {
    disc(img, cx, cy, s, kInk);
  }
}

// Screen building ------------------------------------------------------------------------------

struct Widget {
  std::string node_id;
  std::string class_name;
  Rect bounds;
  std::optional<std::string> resource_id;
  std::optional<std::string> text;
  bool clickable = false;
  std::string glyph;  // icon kind; empty draws a plain block
};

struct ScreenSpec {
  std::string id;
  std::string activity;
  Rgba background;
  Rgba accent;
  std::vector<Widget> widgets;
};

UiNode node_for(const Widget& w) {
  UiNode n;
  n.node_id = w.node_id;
  n.bounds = w.bounds;
  n.class_name = w.class_name;
  n.resource_id = w.resource_id;
  n.text = w.text;
  n.clickable = w.clickable;
  return n;
}

json write_screen(const ScreenSpec& spec, const fs::path& dir, const std::string& rel_dir, int w = kW, int h = kH) {
  Image img(w, h, spec.background);
  fill(img, Rect{0, 0, w, h / 10}, spec.accent);
  for (const Widget& wd : spec.widgets) {
    if (wd.glyph.empty()) {
      fill(img, wd.bounds, wd.text ? Rgba{255, 255, 255, 255} : Rgba{210, 214, 220, 255});
      if (wd.text) {
        // A row of dashes stands in for rendered text.
        for (int x = wd.bounds.left + 6; x + 8 < wd.bounds.right - 6; x += 12) {
          fill(img, Rect{x, (wd.bounds.top + wd.bounds.bottom) / 2 - 2, x + 8, (wd.bounds.top + wd.bounds.bottom) / 2 + 2},
               kInk);
        }
      }
    } else {
      fill(img, wd.bounds, kPaper);
      icon(img, wd.glyph, wd.bounds);
    }
  }
  save_png(dir / rel_dir / (spec.id + ".png"), img);

  UiNode root;
  root.node_id = "root";
  root.bounds = Rect{0, 0, w, h};
  root.class_name = "android.widget.FrameLayout";
  for (const Widget& wd : spec.widgets) root.children.push_back(node_for(wd));
  Screen s;
  s.id = spec.id;
  s.screenshot = rel_dir + "/" + spec.id + ".png";
  s.width_px = w;
  s.height_px = h;
  s.root = std::move(root);
  s.activity = spec.activity;
  return to_json(s);
}

Widget title(const std::string& text) {
  return {"title", "android.widget.TextView", Rect{16, 16, 240, 48}, "toolbar_title", text, false, ""};
}

Widget image_button(const std::string& id, const std::string& glyph, Rect bounds,
                    const std::string& cls = "android.widget.ImageButton") {
  return {id, cls, bounds, glyph, std::nullopt, true, glyph};
}

Widget block(const std::string& id, Rect bounds, std::optional<std::string> text = std::nullopt) {
  return {id, "android.widget.TextView", bounds, std::nullopt, std::move(text), false, ""};
}

// Corpus content --------------------------------------------------------------------------------

struct ButtonFixture {
  std::string origin;
  std::string node_id;
  std::string destination;
  // Raw model replies, before postprocessing.
  std::string s1, s2, s3, baseline;
  std::optional<std::string> human;
};

// Destination screen descriptions the scripted provider returns, keyed by screen id.
const std::map<std::string, std::string> kDescriptions = {
    {"color_picker", "A color picker for the app theme with a hue grid, a brightness slider and a preview swatch."},
    {"code_entry", "A form for typing a pairing code by hand, with a numeric field and a confirm control."},
    {"amplifier", "An amplifier panel with a gain slider and a boost toggle for the current audio output."},
    {"account", "Account settings listing profile details, sign-in options and privacy controls."},
    {"notifications", "A list of recent notifications with controls to mark them read."},
    {"canvas", "A drawing canvas over the photo with brush sizes and a color strip."},
    {"share_sheet", "A share sheet listing apps and contacts to send the photo to."},
    {"crop", "A crop editor with a resizable frame and aspect ratio presets."},
    {"search", "A search screen with a query field and recent searches."},
    {"queue", "The playback queue listing upcoming tracks that can be reordered."},
    {"layers", "A layers panel listing drawing layers with visibility toggles."},
    {"scanner", "A camera viewfinder that scans a QR code to pair a device."},
    {"drawer", "A navigation drawer with links to the main sections of the app."},
    {"equalizer", "An equalizer with frequency band sliders and presets."},
};

const std::vector<ButtonFixture> kButtons = {
    {"editor", "btn_color", "color_picker", "Pick a color", "\"Customize theme.\"", "Customize theme", "Select color",
     "Change theme color"},
    {"pairing", "btn_manual", "code_entry", "Edit code", "Enter code manually", "**Enter code manually**", "Edit",
     "Type code"},
    {"player", "btn_amp", "amplifier", "Adjust volume", "Adjust amplifier", "Adjust amplifier", "Toggle sound",
     "Volume boost"},
    {"home", "btn_profile", "account", "Open profile", "View account settings", "Open account settings",
     "Manage account", "Account"},
    {"home", "btn_bell", "notifications", "View notifications", "Open notifications", "View notifications",
     "Toggle alerts", std::nullopt},
    {"photo", "btn_draw", "canvas", "Draw on photo", "Open drawing tools", "Draw on image", "Edit photo",
     "Draw on image"},
    {"photo", "btn_share", "share_sheet", "Share photo", "Share photo", "Share photo.", "Share", "Share"},
    {"photo", "btn_crop", "crop", "Crop photo", "Crop photo", "Crop and resize photo", "Crop", std::nullopt},
    {"home", "btn_search", "search", "Search", "Open search", "Search", "Search", "Search"},
    {"player", "btn_queue", "queue", "Show playlist", "View play queue", "View play queue", "Open list",
     std::nullopt},
    {"editor", "btn_layers", "layers", "Show layers", "Open layers panel", "Manage layers", "Stack", std::nullopt},
    {"pairing", "btn_scan", "scanner", "Scan QR code", "Scan pairing code", "Scan pairing code", "Scan",
     "Scan code"},
    {"home", "btn_menu", "drawer", "Open menu", "Open navigation menu", "Open navigation menu", "Menu",
     std::nullopt},
    {"player", "btn_eq", "equalizer", "Adjust sound", "Open equalizer", "Open equalizer", "Settings",
     std::nullopt},
};

std::vector<ScreenSpec> origin_screens() {
  return {
      {"editor", "com.example.sketch/.EditorActivity", Rgba{244, 240, 232, 255}, Rgba{90, 70, 160, 255},
       {title("Sketch"), image_button("btn_color", "swatch", Rect{300, 12, 344, 56}),
        image_button("btn_layers", "layers", Rect{248, 12, 292, 56}), block("canvas_area", Rect{16, 80, 344, 560}),
        // Tapping the canvas keeps the user on the editor.
        {"canvas_tap", "android.widget.ImageView", Rect{40, 100, 80, 140}, std::nullopt, std::nullopt, true, "dot"}}},
      {"pairing", "com.example.hub/.PairActivity", Rgba{236, 244, 248, 255}, Rgba{20, 120, 160, 255},
       {title("Pair device"), block("hint", Rect{16, 80, 344, 120}, "Scan the code on your device"),
        image_button("btn_scan", "qr", Rect{132, 200, 228, 296}),
        image_button("btn_manual", "pencil", Rect{296, 560, 344, 608})}},
      {"player", "com.example.tunes/.PlayerActivity", Rgba{30, 30, 36, 255}, Rgba{200, 60, 90, 255},
       {title("Now playing"), block("album_art", Rect{40, 90, 320, 370}),
        image_button("btn_amp", "speaker", Rect{24, 540, 72, 588}),
        image_button("btn_queue", "queue", Rect{288, 540, 336, 588}),
        image_button("btn_eq", "sliders", Rect{156, 540, 204, 588}, "androidx.appcompat.widget.AppCompatImageButton")}},
      {"home", "com.example.news/.HomeActivity", Rgba{255, 255, 255, 255}, Rgba{30, 90, 200, 255},
       {{"txt_title", "android.widget.TextView", Rect{64, 16, 240, 48}, "home_title", "Home", true, ""},
        image_button("btn_menu", "menu", Rect{8, 12, 56, 60}),
        image_button("btn_profile", "avatar", Rect{296, 12, 344, 60}, "android.widget.ImageView"),
        image_button("btn_bell", "bell", Rect{248, 12, 292, 56}),
        image_button("btn_search", "search", Rect{200, 12, 244, 56}), block("story_1", Rect{16, 90, 344, 250}, "Story"),
        block("story_2", Rect{16, 270, 344, 430}, "Story")}},
      {"photo", "com.example.gallery/.PhotoActivity", Rgba{12, 12, 12, 255}, Rgba{12, 12, 12, 255},
       // A full-bleed clickable photo: too large to count as a button.
       {{"img_full", "android.widget.ImageView", Rect{0, 0, 360, 608}, "photo_view", std::nullopt, true, ""},
        image_button("btn_draw", "brush", Rect{24, 586, 72, 634}, "androidx.appcompat.widget.AppCompatImageButton"),
        image_button("btn_share", "share", Rect{156, 586, 204, 634}),
        image_button("btn_crop", "crop", Rect{288, 586, 336, 634})}},
  };
}

std::vector<ScreenSpec> destination_screens() {
  std::vector<ScreenSpec> out;
  int i = 0;
  for (const auto& [id, text] : kDescriptions) {
    const auto shade = static_cast<std::uint8_t>(120 + 9 * i);
    ScreenSpec s{id, "com.example/." + id, Rgba{248, 248, static_cast<std::uint8_t>(240 - 4 * i), 255},
                 Rgba{shade, static_cast<std::uint8_t>(200 - 7 * i), 90, 255}, {title(id)}};
    for (int row = 0; row < 2 + i % 4; ++row) {
      s.widgets.push_back(block("row_" + std::to_string(row), Rect{16, 90 + 70 * row, 344, 140 + 70 * row},
                                "Item " + std::to_string(row)));
    }
    s.widgets.push_back({"nav_back", "android.widget.ImageButton", Rect{8, 12, 52, 56}, "back", std::nullopt, true,
                         "dot"});
    out.push_back(std::move(s));
    ++i;
  }
  return out;
}

// Scripted provider ------------------------------------------------------------------------

std::string pixel_key(std::span<const std::uint8_t> png) {
  return sha256_hex(decode_png(png).pixels());
}

class ScriptedProvider final : public LlmProvider {
 public:
  ScriptedProvider(const PromptTemplates& templates, const fs::path& corpus) : templates_(templates) {
    for (const auto& [id, text] : kDescriptions) {
      descriptions_[pixel_key(read_file_bytes(corpus / "screens" / (id + ".png")))] = text;
    }
    for (const ButtonFixture& b : kButtons) by_node_[b.node_id] = &b;
  }

  std::string generate(const PromptRequest& request) override {
    if (request.system_text == templates_.describe_system) {
      for (const PromptPart& p : request.parts) {
        if (const auto* img = std::get_if<ImagePart>(&p)) return descriptions_.at(pixel_key(img->png));
      }
    }
    const ButtonFixture* b = nullptr;
    bool described = false;
    for (const PromptPart& p : request.parts) {
      const auto* t = std::get_if<TextPart>(&p);
      if (t == nullptr) continue;
      if (t->text.find("Description of the screen") != std::string::npos) described = true;
      const auto at = t->text.find("resource id: ");
      if (at == std::string::npos) continue;
      const std::string rid = t->text.substr(at + 13, t->text.find('\n', at) - at - 13);
      for (const ButtonFixture& f : kButtons) {
        if (resource_of(f) == rid) b = &f;
      }
    }
    if (b == nullptr) throw Error(Errc::ProviderError, "scripted provider: unrecognised prompt");
    if (request.system_text == templates_.baseline_system) return b->baseline;
    const bool shot = count_images(request) == 2;
    if (described && shot) return b->s3;
    return described ? b->s2 : b->s1;
  }

  static std::string resource_of(const ButtonFixture& b) {
    for (const ScreenSpec& s : origin_screens()) {
      for (const Widget& w : s.widgets) {
        if (s.id == b.origin && w.node_id == b.node_id) return w.resource_id.value_or("(none)");
      }
    }
    return "(none)";
  }

 private:
  const PromptTemplates& templates_;
  std::map<std::string, std::string> descriptions_;
  std::map<std::string, const ButtonFixture*> by_node_;
};

// Simulated app ---------------------------------------------------------------------------

void write_sim_app(const fs::path& dir) {
  fs::create_directories(dir / "screens");
  struct EdgeSpec {
    int from;
    const char* node;
    int to;
    int delay_ms;
  };
  // Delays straddle the default 2000 ms timeout on both sides.
  const std::vector<EdgeSpec> edges = {
      {0, "nav_a", 1, 0},     {0, "nav_b", 2, 300},   {1, "nav_a", 3, 1200},  {1, "nav_b", 0, 2000},
      {2, "nav_a", 4, 2001},  {2, "nav_b", 5, 850},   {3, "nav_a", 6, 3000},  {4, "nav_a", 7, 1999},
      {5, "nav_a", 8, 50},    {6, "nav_a", 9, 2500},  {7, "nav_a", 0, 1000},  {8, "nav_a", 9, 2000},
      {9, "nav_a", 0, 5000},  {9, "nav_b", 3, 10},
  };
  json screens = json::array();
  for (int i = 0; i < 10; ++i) {
    ScreenSpec s{"s" + std::to_string(i), "com.example.sim/.Screen" + std::to_string(i),
                 Rgba{static_cast<std::uint8_t>(200 + 5 * i), 230, static_cast<std::uint8_t>(250 - 10 * i), 255},
                 Rgba{static_cast<std::uint8_t>(25 * i), 80, 160, 255},
                 {image_button("nav_a", "dot", Rect{10, 130, 40, 160}), image_button("nav_b", "dot", Rect{50, 130, 80, 160}),
                  image_button("idle", "dot", Rect{10, 40, 40 + 4 * i, 70})}};
    screens.push_back(write_screen(s, dir, "screens", 90, 170));
  }
  json edge_rows = json::array();
  for (const EdgeSpec& e : edges) {
    edge_rows.push_back({{"screen", "s" + std::to_string(e.from)},
                         {"node", e.node},
                         {"destination", "s" + std::to_string(e.to)},
                         {"delay_ms", e.delay_ms}});
  }
  const json graph{{"start", "s0"}, {"screens", std::move(screens)}, {"edges", std::move(edge_rows)}};
  write_file_atomic(dir / "graph.json", graph.dump(2) + "\n");
}

// Ratings ----------------------------------------------------------------------------------

int technique_rank(Technique t) {
  switch (t) {
    case Technique::Baseline: return 0;
    case Technique::CaptionS1: return 1;
    case Technique::CaptionS2: return 2;
    case Technique::CaptionS3: return 3;
    case Technique::Human: return 3;
  }
  return 0;
}

std::string scripted_choice(const PairwiseComparison& c, const Assignment& a) {
  Xoshiro256StarStar rng(std::stoull(sha256_hex(c.comparison_id + "/" + a.rater_id).substr(0, 16), nullptr, 16));
  CanonicalChoice canonical;
  const std::uint64_t roll = rng.below(100);
  if (c.candidate_a.text == c.candidate_b.text) {
    canonical = roll < 90 ? CanonicalChoice::Both : CanonicalChoice::Neither;
  } else if (roll < 6) {
    canonical = CanonicalChoice::Neither;
  } else if (roll < 26) {
    canonical = CanonicalChoice::Both;
  } else {
    const int edge = technique_rank(c.candidate_a.technique) - technique_rank(c.candidate_b.technique);
    const std::uint64_t favour_a = static_cast<std::uint64_t>(50 + 15 * edge);
    canonical = rng.below(100) < favour_a ? CanonicalChoice::PreferA : CanonicalChoice::PreferB;
  }
  switch (canonical) {
    case CanonicalChoice::PreferA: return a.presentation_swapped ? "second" : "first";
    case CanonicalChoice::PreferB: return a.presentation_swapped ? "first" : "second";
    case CanonicalChoice::Both: return "both";
    case CanonicalChoice::Neither: return "neither";
  }
  return "both";
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("tests/fixtures");
  const fs::path corpus = root / "corpus";
  try {
    fs::remove_all(corpus);
    fs::create_directories(corpus / "screens");

    json screens = json::array();
    for (const ScreenSpec& s : origin_screens()) screens.push_back(write_screen(s, corpus, "screens"));
    for (const ScreenSpec& s : destination_screens()) screens.push_back(write_screen(s, corpus, "screens"));

    json traces = json::array();
    for (std::size_t i = 0; i < kButtons.size(); ++i) {
      const ButtonFixture& b = kButtons[i];
      traces.push_back({{"origin", b.origin},
                        {"element", b.node_id},
                        {"destination", b.destination},
                        {"gesture", "tap"},
                        {"dwell_ms", 2000}});
      if (i == 3) {
        // Ineligible traffic interleaved with the real buttons.
        traces.push_back({{"origin", "home"}, {"element", "txt_title"}, {"destination", "account"}, {"gesture", "tap"}});
        traces.push_back({{"origin", "photo"}, {"element", "img_full"}, {"destination", "crop"}, {"gesture", "tap"}});
        traces.push_back({{"origin", "editor"}, {"element", "canvas_tap"}, {"destination", "editor"}, {"gesture", "tap"}});
      }
    }
    // A repeated trace resolves to the same sample and must not be sampled twice.
    traces.push_back(traces[0]);

    const json manifest{{"id", "fixture-apps"},
                        {"source_name", "synthetic crawl"},
                        {"screens", std::move(screens)},
                        {"traces", std::move(traces)}};
    write_file_atomic(corpus / "manifest.json", manifest.dump(2) + "\n");

    std::string human;
    for (const ButtonFixture& b : kButtons) {
      if (b.human) {
        human += json{{"sample_id", "fixture-apps:" + b.origin + ":" + b.node_id + ":" + b.destination},
                      {"text", *b.human}}
                     .dump() +
                 "\n";
      }
    }
    write_file_atomic(corpus / "human_labels.jsonl", human);
    write_file_atomic(corpus / "raters.txt", "# one rater id per line\nrater-01\nrater-02\nrater-03\nrater-04\n");
    const json config_doc{{"seeds", {{"sample", 7}, {"assign", 11}, {"session", 13}}},
                          {"timeout_ms", 2000},
                          {"parallelism", 4},
                          {"transcripts_dir", "transcripts"}};
    write_file_atomic(corpus / "config.json", config_doc.dump(2) + "\n");

    // Record transcripts by running the pipeline once against the scripted provider.
    const Config config = load_config(corpus / "config.json", [](const char*) { return std::nullopt; });
    const fs::path scratch = fs::temp_directory_path() / "caption-make-fixtures";
    fs::remove_all(scratch);
    Workspace ws(scratch, config);
    const fs::path manifest_path = corpus / "manifest.json";
    ws.ingest(std::span(&manifest_path, 1));
    ws.sample("fixture-apps", kButtons.size(), config.sample_seed);
    const PromptTemplates templates = PromptTemplates::load(ws.prompts_dir());
    ScriptedProvider provider(templates, corpus);
    const auto report = ws.run_generation(kAllStrategies, ClientMode::Record, &provider);
    if (report.failures() != 0) {
      std::cerr << to_json(report).dump(2) << "\n";
      return 1;
    }
    ws.import_human(corpus / "human_labels.jsonl");
    for (Family f : kAllFamilies) ws.build_pairs(f);
    ws.assign(read_raters(corpus / "raters.txt"), config.assign_seed);

    std::string ratings;
    std::size_t n = 0;
    for (const Assignment& a : ws.store().assignments()) {
      const auto c = ws.store().comparison(a.comparison_id);
      char stamp[64];
      std::snprintf(stamp, sizeof stamp, "2026-03-02T%02zu:%02zu:%02zuZ", 9 + n / 3600, n / 60 % 60, n % 60);
      ratings += json{{"rater_id", a.rater_id},
                      {"comparison_id", a.comparison_id},
                      {"choice", scripted_choice(*c, a)},
                      {"submitted_at", stamp}}
                     .dump() +
                 "\n";
      ++n;
    }
    write_file_atomic(corpus / "ratings.jsonl", ratings);
    fs::remove_all(scratch);

    write_sim_app(root / "simapp");
    std::cout << "wrote " << kButtons.size() << " buttons, " << report.successes() << " candidates, " << n
              << " scripted ratings\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
