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

#include "cloudbroker/common.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <mutex>

namespace cloudbroker {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::DuplicateSelector: return "DuplicateSelector";
    case ErrorCode::MissingLifecycle: return "MissingLifecycle";
    case ErrorCode::InvalidOptionArgs: return "InvalidOptionArgs";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::UnboundComponent: return "UnboundComponent";
    case ErrorCode::DuplicateProduct: return "DuplicateProduct";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::UnknownProduct: return "UnknownProduct";
    case ErrorCode::MissingFxRate: return "MissingFxRate";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::NoFeasibleProduct: return "NoFeasibleProduct";
    case ErrorCode::AppMismatch: return "AppMismatch";
    case ErrorCode::MissingAdapter: return "MissingAdapter";
    case ErrorCode::AlreadyDeployed: return "AlreadyDeployed";
    case ErrorCode::NotDeployed: return "NotDeployed";
    case ErrorCode::InjectedFailure: return "InjectedFailure";
    case ErrorCode::ScenarioParse: return "ScenarioParseError";
    case ErrorCode::InitialPlanInfeasible: return "InitialPlanInfeasible";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& detail) {
  std::string out{to_string(code)};
  if (!detail.empty()) {
    out += "(" + detail + ")";
  }
  return out;
}

}  // namespace

BrokerError::BrokerError(ErrorCode code, std::string detail, const std::string& message)
    : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

BrokerError::BrokerError(ErrorCode code, std::string detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(std::move(detail)) {}

SyntaxError::SyntaxError(int line, int column, std::string expected)
    : BrokerError(ErrorCode::Syntax, expected,
                  "SyntaxError at " + std::to_string(line) + ":" + std::to_string(column) +
                      ": expected " + expected),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

ManifestLineError::ManifestLineError(ErrorCode code, int line, std::string what)
    : BrokerError(code, what,
                  std::string(to_string(code)) + " at line " + std::to_string(line) + ": " + what),
      line_(line) {}

NoFeasibleProduct::NoFeasibleProduct(std::string component, std::string option)
    : BrokerError(ErrorCode::NoFeasibleProduct, component,
                  "NoFeasibleProduct: no product satisfies component '" + component +
                      "' under option '" + option + "'"),
      component_(std::move(component)),
      option_(std::move(option)) {}

std::string format_decimal(double value) {
  if (value == 0.0) {
    return "0";  // folds -0
  }
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    throw BrokerError(ErrorCode::Validation, "decimal");
  }
  return {buf.data(), end};
}

double parse_decimal(std::string_view text, std::string_view field) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') {
    ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw BrokerError(ErrorCode::Validation, std::string(field),
                      "ValidationError(" + std::string(field) + "): '" + std::string(text) +
                          "' is not a finite decimal");
  }
  return value;
}

namespace {

std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& warning_handler() {
  static WarningHandler h;
  return h;
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(warning_mutex());
  warning_handler() = std::move(handler);
}

void warn(std::string_view message) {
  std::lock_guard lock(warning_mutex());
  if (warning_handler()) {
    warning_handler()(message);
  }
}

}  // namespace cloudbroker
