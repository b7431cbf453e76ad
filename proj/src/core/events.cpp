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

#include "cloudbroker/events.hpp"

#include "json_util.hpp"

namespace cloudbroker {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view event_type(const EventPayload& payload) {
  return std::visit(overloaded{
                        [](const PriceChanged&) { return "PriceChanged"; },
                        [](const SlaChanged&) { return "SlaChanged"; },
                        [](const ProductWithdrawn&) { return "ProductWithdrawn"; },
                        [](const TechnologyChanged&) { return "TechnologyChanged"; },
                        [](const MetricSamples&) { return "MetricSamples"; },
                        [](const QosViolation&) { return "QosViolation"; },
                        [](const ReplanRequested&) { return "ReplanRequested"; },
                    },
                    payload);
}

std::string subject_product(const EventPayload& payload) {
  return std::visit(overloaded{
                        [](const PriceChanged& e) { return e.productId; },
                        [](const SlaChanged& e) { return e.productId; },
                        [](const ProductWithdrawn& e) { return e.productId; },
                        [](const TechnologyChanged& e) { return e.productId; },
                        [](const MetricSamples&) { return std::string(); },
                        [](const QosViolation& e) { return e.productId; },
                        [](const ReplanRequested&) { return std::string(); },
                    },
                    payload);
}

nlohmann::json to_json(const EventPayload& payload) {
  using nlohmann::json;
  json body = std::visit(
      overloaded{
          [](const PriceChanged& e) {
            return json{{"productId", e.productId},
                        {"metric", e.metric},
                        {"old", format_decimal(e.oldValue)},
                        {"new", format_decimal(e.newValue)}};
          },
          [](const SlaChanged& e) {
            return json{{"productId", e.productId},
                        {"field", e.field},
                        {"old", e.oldValue},
                        {"new", e.newValue}};
          },
          [](const ProductWithdrawn& e) { return json{{"productId", e.productId}}; },
          [](const TechnologyChanged& e) {
            return json{{"productId", e.productId},
                        {"addedTags", detail::string_array(e.addedTags)},
                        {"removedTags", detail::string_array(e.removedTags)}};
          },
          [](const MetricSamples& e) {
            json samples = json::array();
            for (const auto& s : e.samples) {
              samples.push_back({{"productId", s.productId},
                                 {"componentName", s.componentName},
                                 {"metric", s.metric},
                                 {"value", format_decimal(s.value)},
                                 {"ts", s.timestamp}});
            }
            return json{{"samples", std::move(samples)}};
          },
          [](const QosViolation& e) {
            return json{{"productId", e.productId},
                        {"componentName", e.componentName},
                        {"metric", e.metric},
                        {"observed", format_decimal(e.observed)},
                        {"bound", format_decimal(e.bound)}};
          },
          [](const ReplanRequested&) { return json::object(); },
      },
      payload);
  body["type"] = std::string(event_type(payload));
  return body;
}

}  // namespace cloudbroker
