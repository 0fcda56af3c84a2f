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

// Schema helpers shared by the JSON readers. All failures are SchemaViolation.

#include <cstdint>
#include <optional>
#include <string>

#include "caption/error.hpp"
#include "json.hpp"

namespace caption::detail {

using json = nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) {
    throw Error(Errc::SchemaViolation, where + ": expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(Errc::SchemaViolation, where + ": missing \"" + key + "\"");
  }
  return *it;
}

inline std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw Error(Errc::SchemaViolation, where + ": \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

inline std::optional<std::string> opt_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(Errc::SchemaViolation, where + ": \"" + key + "\" must be a string");
  }
  return it->get<std::string>();
}

inline std::int64_t get_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw Error(Errc::SchemaViolation, where + ": \"" + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

inline std::optional<std::int64_t> opt_int(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    throw Error(Errc::SchemaViolation, where + ": \"" + key + "\" must be an integer");
  }
  return it->get<std::int64_t>();
}

inline bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    throw Error(Errc::SchemaViolation, where + ": \"" + key + "\" must be a boolean");
  }
  return it->get<bool>();
}

inline const json& get_array(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) {
    throw Error(Errc::SchemaViolation, where + ": \"" + key + "\" must be an array");
  }
  return v;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaViolation, where + ": " + e.what());
  }
}

}  // namespace caption::detail
