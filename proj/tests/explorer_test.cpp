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

#include "caption/explorer.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "test_util.hpp"

namespace caption {
namespace {

using testing::make_node;
using testing::make_screen;

SimApp two_screen_app(std::int64_t delay_ms) {
  std::map<std::string, Screen, std::less<>> screens;
  screens.emplace("a", make_screen("a", 40, 40, {make_node("go", Rect{0, 0, 10, 10}), make_node("stay", Rect{10, 0, 20, 10})},
                                   Rgba{10, 10, 10, 255}));
  screens.emplace("b", make_screen("b", 40, 40, {make_node("back", Rect{0, 0, 10, 10})}, Rgba{90, 10, 10, 255}));
  std::map<SimEdgeKey, SimEdge> edges{{{"a", "go"}, {"b", delay_ms}}};
  return SimApp(std::move(screens), std::move(edges), "a");
}

TEST(SimApp, StartsAtStartWithClockZero) {
  SimApp app = two_screen_app(500);
  EXPECT_EQ(app.current_screen_id(), "a");
  EXPECT_EQ(app.clock_ms(), 0);
  EXPECT_EQ(content_hash(app.observe()), content_hash(app.observe()));
}

TEST(SimApp, ValidatesGraph) {
  std::map<std::string, Screen, std::less<>> none;
  EXPECT_CAPTION_ERROR(SimApp(none, {}, "a"), Errc::SchemaViolation);
  std::map<std::string, Screen, std::less<>> one;
  one.emplace("a", make_screen("a", 20, 20, {make_node("go", Rect{0, 0, 5, 5})}));
  EXPECT_CAPTION_ERROR(SimApp(one, {{{"a", "go"}, {"zz", 0}}}, "a"), Errc::DanglingReference);
  EXPECT_CAPTION_ERROR(SimApp(one, {{{"a", "nope"}, {"a", 0}}}, "a"), Errc::DanglingReference);
  EXPECT_CAPTION_ERROR(SimApp(one, {}, "zz"), Errc::DanglingReference);
}

TEST(ExploreTap, ArrivesWithinTimeout) {
  SimApp app = two_screen_app(500);
  const TransitionRecord r = explore_tap(app, "go", 2000);
  EXPECT_TRUE(r.changed);
  EXPECT_EQ(r.origin.id, "a");
  EXPECT_EQ(r.destination.id, "b");
  EXPECT_EQ(app.clock_ms(), 2000);  // advanced exactly the timeout
}

TEST(ExploreTap, NoEdgeMeansNoChange) {
  SimApp app = two_screen_app(500);
  const TransitionRecord r = explore_tap(app, "stay", 2000);
  EXPECT_FALSE(r.changed);
  EXPECT_EQ(content_hash(r.destination), content_hash(r.origin));
}

TEST(ExploreTap, CaptureBeforeSlowArrival) {
  SimApp app = two_screen_app(3000);
  const TransitionRecord r = explore_tap(app, "go", 2000);
  EXPECT_FALSE(r.changed);
  EXPECT_EQ(r.destination.id, "a");
  // Stepping the clock by hand: the screen arrives at t = 3000, not before.
  app.advance(999);
  EXPECT_EQ(app.current_screen_id(), "a");
  app.advance(1);
  EXPECT_EQ(app.current_screen_id(), "b");
}

TEST(ExploreTap, Errors) {
  SimApp app = two_screen_app(0);
  EXPECT_CAPTION_ERROR(explore_tap(app, "back"), Errc::UnknownNode);
  EXPECT_CAPTION_ERROR(app.advance(-1), Errc::DriverFailure);
}

class FlakyDriver final : public DeviceDriver {
 public:
  Screen observe() override { return make_screen("x", 10, 10, {make_node("n", Rect{0, 0, 5, 5})}); }
  void tap(std::string_view) override { throw std::runtime_error("adb went away"); }
  void advance(std::int64_t) override {}
};

TEST(ExploreTap, DriverExceptionsBecomeDriverFailure) {
  FlakyDriver d;
  EXPECT_CAPTION_ERROR(explore_tap(d, "n"), Errc::DriverFailure);
}

TEST(ExploreTap, TimeoutMonotonicity) {
  for (std::int64_t delay : {0, 1, 250, 1999, 2000, 2001, 7000}) {
    SimApp app = two_screen_app(delay);
    std::vector<std::int64_t> timeouts;
    for (std::int64_t t = 0; t <= 8000; t += 37) timeouts.push_back(t);
    for (std::int64_t t : {delay - 1, delay, delay + 1}) {
      if (t >= 0) timeouts.push_back(t);
    }
    std::sort(timeouts.begin(), timeouts.end());
    bool seen_change = false;
    for (std::int64_t timeout : timeouts) {
      app.reset();
      const bool changed = explore_tap(app, "go", timeout).changed;
      EXPECT_EQ(changed, timeout >= delay) << "delay " << delay << " timeout " << timeout;
      EXPECT_FALSE(seen_change && !changed);
      seen_change = seen_change || changed;
    }
  }
}

TEST(TransitionChanged, HashCoversPixelsAndHierarchy) {
  const Screen a = make_screen("a", 20, 20, {make_node("n", Rect{0, 0, 5, 5})});
  EXPECT_FALSE(transition_changed(a, a));

  Screen one_pixel = a;
  Image img = decode_png(a.png());
  img.set(3, 3, Rgba{1, 2, 3, 255});
  one_pixel.screenshot_png = std::make_shared<const Bytes>(encode_png(img));
  EXPECT_TRUE(transition_changed(a, one_pixel));

  Screen other_tree = a;
  other_tree.root.children[0].node_id = "m";
  EXPECT_TRUE(transition_changed(a, other_tree));
}

TEST(ExploreTap, NeverMutatesGraph) {
  SimApp app = two_screen_app(10);
  const auto screens = app.screens();
  const auto edges = app.edges();
  explore_tap(app, "go");
  explore_tap(app, "back");
  EXPECT_EQ(app.screens(), screens);
  EXPECT_EQ(app.edges(), edges);
}

TEST(FixtureSimApp, LoadsTenScreens) {
  const SimApp app = load_sim_app(testing::kFixtures / "simapp" / "graph.json");
  EXPECT_EQ(app.screens().size(), 10u);
  EXPECT_EQ(app.current_screen_id(), "s0");
  EXPECT_GE(app.edges().size(), 10u);
}

TEST(FixtureSimApp, LoadErrors) {
  testing::TempDir dir;
  json g = json::parse(read_file_text(testing::kFixtures / "simapp" / "graph.json"));
  for (json& s : g["screens"]) {
    s["screenshot"] = (testing::kFixtures / "simapp" / s["screenshot"].get<std::string>()).string();
  }
  json bad = g;
  bad["edges"][0]["destination"] = "nowhere";
  write_file_atomic(dir / "bad.json", bad.dump());
  EXPECT_CAPTION_ERROR(load_sim_app(dir / "bad.json"), Errc::DanglingReference);
  bad = g;
  bad["screens"] = json::array();
  write_file_atomic(dir / "empty.json", bad.dump());
  EXPECT_CAPTION_ERROR(load_sim_app(dir / "empty.json"), Errc::SchemaViolation);
}

TEST(FixtureSimApp, SequenceIsDeterministic) {
  const auto run = [] {
    SimApp app = load_sim_app(testing::kFixtures / "simapp" / "graph.json");
    std::string log;
    for (const char* node : {"nav_a", "nav_b", "nav_a", "idle", "nav_b", "nav_a", "nav_a", "nav_a"}) {
      log += to_json(explore_tap(app, node)).dump() + "\n";
    }
    return log;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace caption
