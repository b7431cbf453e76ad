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
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cloudbroker/common.hpp"

namespace cloudbroker {

struct PriceChanged {
  std::string productId;
  std::string metric;  // a rate metric id, or "fixedFeePerMonth"
  double oldValue = 0.0;
  double newValue = 0.0;
  bool operator==(const PriceChanged&) const = default;
};

struct SlaChanged {
  std::string productId;
  std::string field;  // availabilityPct | responseTimeMsP95 | securityAttrs
  std::string oldValue;
  std::string newValue;
  bool operator==(const SlaChanged&) const = default;
};

struct ProductWithdrawn {
  std::string productId;
  bool operator==(const ProductWithdrawn&) const = default;
};

struct TechnologyChanged {
  std::string productId;
  std::set<std::string> addedTags;
  std::set<std::string> removedTags;
  bool operator==(const TechnologyChanged&) const = default;
};

struct MonitorSample {
  std::string productId;
  std::string componentName;  // ComponentId::key()
  std::string metric;
  double value = 0.0;
  SimInstant timestamp = 0;
  bool operator==(const MonitorSample&) const = default;
};

struct MetricSamples {
  std::vector<MonitorSample> samples;
  bool operator==(const MetricSamples&) const = default;
};

struct QosViolation {
  std::string productId;
  std::string componentName;
  std::string metric;
  double observed = 0.0;
  double bound = 0.0;
  bool operator==(const QosViolation&) const = default;
};

/// Operator-issued re-plan (the only way a passive broker changes its plan).
struct ReplanRequested {
  bool operator==(const ReplanRequested&) const = default;
};

using EventPayload = std::variant<PriceChanged, SlaChanged, ProductWithdrawn, TechnologyChanged,
                                  MetricSamples, QosViolation, ReplanRequested>;

struct GovernanceEvent {
  EventPayload payload;
  SimInstant timestamp = 0;
  std::uint64_t seq = 0;  // assigned by the broker when the event is logged
};

std::string_view event_type(const EventPayload& payload);
nlohmann::json to_json(const EventPayload& payload);

/// Product the event is about, or empty for monitoring/command events.
std::string subject_product(const EventPayload& payload);

}  // namespace cloudbroker
