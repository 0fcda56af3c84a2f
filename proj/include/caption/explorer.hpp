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
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "caption/crawl.hpp"

namespace caption {

inline constexpr std::int64_t kDefaultTimeoutMs = 2000;

/// A device the explorer can drive. One exploration session owns a driver at a time.
/// observe() with no interaction in between must return content-identical screens.
class DeviceDriver {
 public:
  virtual ~DeviceDriver() = default;
  virtual Screen observe() = 0;
  virtual void tap(std::string_view node_id) = 0;
  /// Simulated clock step or wall-clock wait.
  virtual void advance(std::int64_t ms) = 0;
};

struct SimEdge {
  std::string destination;
  std::int64_t delay_ms = 0;

  friend bool operator==(const SimEdge&, const SimEdge&) = default;
};

using SimEdgeKey = std::pair<std::string, std::string>;  // (screen id, node id)

/// Deterministic screen-graph app on a virtual clock. A tap on a node with an
/// outgoing edge schedules arrival at its destination delay_ms later; taps on
/// other nodes are acknowledged and change nothing.
class SimApp final : public DeviceDriver {
 public:
  /// Throws Error{SchemaViolation | DanglingReference}.
  SimApp(std::map<std::string, Screen, std::less<>> screens, std::map<SimEdgeKey, SimEdge> edges,
         std::string start);

  Screen observe() override;
  void tap(std::string_view node_id) override;
  void advance(std::int64_t ms) override;

  const std::map<std::string, Screen, std::less<>>& screens() const noexcept { return screens_; }
  const std::map<SimEdgeKey, SimEdge>& edges() const noexcept { return edges_; }
  const std::string& start() const noexcept { return start_; }
  const std::string& current_screen_id() const noexcept { return current_; }
  std::int64_t clock_ms() const noexcept { return clock_ms_; }

  /// Back to the start screen at clock 0.
  void reset();

 private:
  struct Pending {
    std::string destination;
    std::int64_t arrives_at_ms;
  };

  std::map<std::string, Screen, std::less<>> screens_;
  std::map<SimEdgeKey, SimEdge> edges_;
  std::string start_;
  std::string current_;
  std::int64_t clock_ms_ = 0;
  std::optional<Pending> pending_;
};

/// Reads a SimApp graph: {"start", "screens": [...], "edges": [{"screen","node","destination","delay_ms"}]}.
SimApp load_sim_app(const std::filesystem::path& graph_path);

/// Hex SHA-256 over the screenshot bytes followed by the canonical (sorted-key,
/// compact) JSON of the view hierarchy.
std::string content_hash(const Screen& screen);

bool transition_changed(const Screen& a, const Screen& b);

struct TransitionRecord {
  Screen origin;
  std::string element_node_id;
  Screen destination;
  std::int64_t timeout_ms = kDefaultTimeoutMs;
  bool changed = false;
};

json to_json(const TransitionRecord& record);

/// Tap, wait exactly timeout_ms, observe once.
/// Throws Error{UnknownNode | DriverFailure}.
TransitionRecord explore_tap(DeviceDriver& driver, std::string_view node_id,
                             std::int64_t timeout_ms = kDefaultTimeoutMs);

}  // namespace caption
