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

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cloudbroker {

/// Simulated-clock instant, in seconds since the simulation epoch.
using SimInstant = std::int64_t;

enum class ErrorCode {
  Syntax,
  DuplicateSelector,
  MissingLifecycle,
  InvalidOptionArgs,
  UnknownComponent,
  UnboundComponent,
  DuplicateProduct,
  Validation,
  UnknownProduct,
  MissingFxRate,
  NoCandidates,
  NoFeasibleProduct,
  AppMismatch,
  MissingAdapter,
  AlreadyDeployed,
  NotDeployed,
  InjectedFailure,
  ScenarioParse,
  InitialPlanInfeasible,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the broker core. `detail()` holds the
/// offending identifier (product id, component, field name) when there is one.
class BrokerError : public std::runtime_error {
 public:
  BrokerError(ErrorCode code, std::string detail, const std::string& message);
  BrokerError(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

class SyntaxError : public BrokerError {
 public:
  SyntaxError(int line, int column, std::string expected);

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  int line_;
  int column_;
  std::string expected_;
};

/// Raised by parse_manifest for DuplicateSelector and InvalidOptionArgs.
class ManifestLineError : public BrokerError {
 public:
  ManifestLineError(ErrorCode code, int line, std::string what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class NoFeasibleProduct : public BrokerError {
 public:
  NoFeasibleProduct(std::string component, std::string option);
  const std::string& component() const noexcept { return component_; }
  const std::string& option() const noexcept { return option_; }

 private:
  std::string component_;
  std::string option_;
};

// Decimal values travel as strings in every JSON document so that files stay
// free of binary-float drift. Formatting uses the shortest representation
// that parses back to the same double.
std::string format_decimal(double value);
double parse_decimal(std::string_view text, std::string_view field);

/// Receives non-fatal diagnostics (unpriced workload metrics and the like).
/// The default handler discards them.
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace cloudbroker
