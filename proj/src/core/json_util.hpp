// Copyright 2026 The Cloud Broker Authors
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

// Field accessors shared by the JSON readers. Every failure surfaces as a
// ValidationError naming the field.

#include <cstdint>
#include <set>
#include <string>

#include "json.hpp"

#include "cloudbroker/common.hpp"

namespace cloudbroker::detail {

using nlohmann::json;

[[noreturn]] inline void invalid(const std::string& field, const std::string& why) {
  throw BrokerError(ErrorCode::Validation, field, "ValidationError(" + field + "): " + why);
}

inline const json& require(const json& obj, const char* key, const std::string& ctx = {}) {
  if (!obj.is_object()) {
    invalid(ctx.empty() ? key : ctx, "expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    invalid(ctx.empty() ? key : ctx + "." + key, "missing");
  }
  return *it;
}

inline std::string get_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) {
    invalid(key, "expected a string");
  }
  return v.get<std::string>();
}

/// Accepts a decimal string (the canonical form) or a plain JSON number.
inline double decimal_value(const json& v, const std::string& field) {
  if (v.is_string()) {
    return parse_decimal(v.get_ref<const std::string&>(), field);
  }
  if (v.is_number()) {
    return v.get<double>();
  }
  invalid(field, "expected a decimal string");
}

inline double get_decimal(const json& obj, const char* key) {
  return decimal_value(require(obj, key), key);
}

inline std::int64_t get_integer(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_number_integer()) {
    invalid(key, "expected an integer");
  }
  return v.get<std::int64_t>();
}

inline std::set<std::string> get_string_set(const json& obj, const char* key) {
  std::set<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) {
    return out;
  }
  if (!it->is_array()) {
    invalid(key, "expected an array of strings");
  }
  for (const auto& e : *it) {
    if (!e.is_string()) {
      invalid(key, "expected an array of strings");
    }
    out.insert(e.get<std::string>());
  }
  return out;
}

inline json string_array(const std::set<std::string>& values) {
  json arr = json::array();
  for (const auto& v : values) {
    arr.push_back(v);
  }
  return arr;
}

}  // namespace cloudbroker::detail
