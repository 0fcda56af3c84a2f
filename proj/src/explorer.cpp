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

#include "caption/error.hpp"
#include "json_util.hpp"

namespace caption {

SimApp::SimApp(std::map<std::string, Screen, std::less<>> screens, std::map<SimEdgeKey, SimEdge> edges,
               std::string start)
    : screens_(std::move(screens)), edges_(std::move(edges)), start_(std::move(start)), current_(start_) {
  if (screens_.empty()) {
    throw Error(Errc::SchemaViolation, "sim app has no screens");
  }
  if (!screens_.contains(start_)) {
    throw Error(Errc::DanglingReference, "start screen \"" + start_ + "\" is not defined");
  }
  for (const auto& [key, edge] : edges_) {
    auto from = screens_.find(key.first);
    if (from == screens_.end()) {
      throw Error(Errc::DanglingReference, "edge from unknown screen \"" + key.first + "\"");
    }
    if (find_node(from->second, key.second) == nullptr) {
      throw Error(Errc::DanglingReference, "edge on unknown node \"" + key.second + "\"");
    }
    if (!screens_.contains(edge.destination)) {
      throw Error(Errc::DanglingReference, "edge to unknown screen \"" + edge.destination + "\"");
    }
    if (edge.delay_ms < 0) {
      throw Error(Errc::SchemaViolation, "edge delay_ms must be non-negative");
    }
  }
}

Screen SimApp::observe() { return screens_.find(current_)->second; }

void SimApp::tap(std::string_view node_id) {
  const Screen& here = screens_.find(current_)->second;
  if (find_node(here, node_id) == nullptr) {
    throw Error(Errc::UnknownNode, "node \"" + std::string(node_id) + "\" not on screen \"" + current_ + "\"");
  }
  auto it = edges_.find(SimEdgeKey{current_, std::string(node_id)});
  if (it == edges_.end()) return;
  pending_ = Pending{it->second.destination, clock_ms_ + it->second.delay_ms};
}

void SimApp::advance(std::int64_t ms) {
  if (ms < 0) {
    throw Error(Errc::DriverFailure, "cannot advance the clock backwards");
  }
  clock_ms_ += ms;
  if (pending_ && clock_ms_ >= pending_->arrives_at_ms) {
    current_ = pending_->destination;
    pending_.reset();
  }
}

void SimApp::reset() {
  current_ = start_;
  clock_ms_ = 0;
  pending_.reset();
}

SimApp load_sim_app(const std::filesystem::path& graph_path) {
  const json doc = detail::parse_json_text(read_file_text(graph_path), graph_path.string());
  const std::string where = "sim graph " + graph_path.filename().string();
  const std::string start = detail::get_string(doc, "start", where);
  std::map<std::string, Screen, std::less<>> screens;
  for (const json& sj : detail::get_array(doc, "screens", where)) {
    Screen s = parse_screen(sj, graph_path.parent_path());
    const std::string sid = s.id;
    if (!screens.emplace(sid, std::move(s)).second) {
      throw Error(Errc::SchemaViolation, where + ": duplicate screen id \"" + sid + "\"");
    }
  }
  std::map<SimEdgeKey, SimEdge> edges;
  for (const json& ej : detail::get_array(doc, "edges", where)) {
    SimEdgeKey key{detail::get_string(ej, "screen", where), detail::get_string(ej, "node", where)};
    SimEdge edge{detail::get_string(ej, "destination", where), detail::get_int(ej, "delay_ms", where)};
    if (!edges.emplace(key, edge).second) {
      throw Error(Errc::SchemaViolation, where + ": duplicate edge on " + key.first + "/" + key.second);
    }
  }
  return SimApp(std::move(screens), std::move(edges), start);
}

std::string content_hash(const Screen& screen) {
  Sha256 h;
  h.update(std::span<const std::uint8_t>(screen.png()));
  h.update(to_json(screen.root).dump());
  return h.hex_digest();
}

bool transition_changed(const Screen& a, const Screen& b) { return content_hash(a) != content_hash(b); }

json to_json(const TransitionRecord& record) {
  return json{{"origin", record.origin.id},
              {"origin_hash", content_hash(record.origin)},
              {"element", record.element_node_id},
              {"destination", record.destination.id},
              {"destination_hash", content_hash(record.destination)},
              {"timeout_ms", record.timeout_ms},
              {"changed", record.changed}};
}

TransitionRecord explore_tap(DeviceDriver& driver, std::string_view node_id, std::int64_t timeout_ms) {
  if (timeout_ms < 0) {
    throw Error(Errc::InvalidArgument, "timeout_ms must be non-negative");
  }
  // Driver-level exceptions other than our own codes surface as DriverFailure.
  const auto guarded = [](auto&& fn) {
    try {
      return fn();
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(Errc::DriverFailure, e.what());
    }
  };
  TransitionRecord record;
  record.origin = guarded([&] { return driver.observe(); });
  if (find_node(record.origin, node_id) == nullptr) {
    throw Error(Errc::UnknownNode,
                "node \"" + std::string(node_id) + "\" not on screen \"" + record.origin.id + "\"");
  }
  record.element_node_id = std::string(node_id);
  record.timeout_ms = timeout_ms;
  guarded([&] { driver.tap(node_id); return 0; });
  guarded([&] { driver.advance(timeout_ms); return 0; });
  record.destination = guarded([&] { return driver.observe(); });
  record.changed = transition_changed(record.origin, record.destination);
  return record;
}

}  // namespace caption
