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

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cloudbroker/common.hpp"

namespace cloudbroker {

enum class ComponentKind { DataSource, DomainClasses, Controllers, Views, Services };

std::string_view to_string(ComponentKind kind);
std::optional<ComponentKind> component_kind_from_string(std::string_view text);

enum class CloudType { Iaas, Paas, Saas };

std::string_view to_string(CloudType type);
std::optional<CloudType> cloud_type_from_string(std::string_view text);

enum class Lifecycle { Active, Passive };

std::string_view to_string(Lifecycle lifecycle);

/// Identity of an application component. Names are only unique within a
/// kind (a Grails app routinely has a `Pet` domain class and a `Pet`
/// controller), so every map and log keys components by (kind, name). The
/// string form is `kind/name`.
struct ComponentId {
  ComponentKind kind = ComponentKind::DataSource;
  std::string name;

  std::string key() const;
  static ComponentId parse(std::string_view key);

  auto operator<=>(const ComponentId&) const = default;
  bool operator==(const ComponentId&) const = default;
};

struct Component {
  std::string name;
  ComponentKind kind = ComponentKind::DataSource;
  std::set<std::string> requiredTech;
  std::optional<std::string> environment;

  ComponentId id() const { return {kind, name}; }
  bool operator==(const Component&) const = default;
};

struct ApplicationModel {
  std::string appId;
  std::vector<Component> components;

  const Component* find(const ComponentId& id) const;
  /// Throws ValidationError on duplicate names within a kind or an empty
  /// requiredTech set.
  void validate() const;
};

ApplicationModel application_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ApplicationModel& app);

struct Economy {
  bool operator==(const Economy&) const = default;
};
struct BestEffort {
  bool operator==(const BestEffort&) const = default;
};
struct PrivateCloud {
  std::string endpoint;
  CloudType cloudType = CloudType::Paas;
  std::string providerId;
  bool operator==(const PrivateCloud&) const = default;
};

using DeploymentOption = std::variant<Economy, BestEffort, PrivateCloud>;

enum class OptionCategory { Economy, BestEffort, PrivateCloud };

OptionCategory category_of(const DeploymentOption& option);
std::string_view to_string(OptionCategory category);
std::optional<OptionCategory> option_category_from_string(std::string_view text);
std::string describe(const DeploymentOption& option);

struct ComponentSelector {
  ComponentKind kind = ComponentKind::DataSource;
  std::vector<std::string> names;  // empty selects every component of `kind`
  std::optional<std::string> environment;

  bool operator==(const ComponentSelector&) const = default;
};

struct ComponentBinding {
  ComponentSelector selector;
  DeploymentOption option;
  int sourceLine = 0;

  // sourceLine is diagnostic only; binding order carries the precedence.
  bool operator==(const ComponentBinding& other) const {
    return selector == other.selector && option == other.option;
  }
};

struct DeploymentManifest {
  Lifecycle lifecycle = Lifecycle::Passive;
  std::vector<ComponentBinding> bindings;

  bool operator==(const DeploymentManifest&) const = default;
};

/// Parses the broker DSL:
///
///     manifest      := "broker" "{" lifecycle stmt* "}"
///     lifecycle     := "governance.lifecycle" "=" ("active" | "passive")
///     stmt          := KIND "{" binding+ "}"
///     binding       := selector option
///     selector      := "all" | "[" STRING ("," STRING)* "]"
///                    | "environments" "[" STRING "]" "." IDENT
///     option        := "economy" | "bestEffort"
///                    | "privateCloud" "(" STRING "," cloudType "," STRING ")"
///
/// `#` starts a line comment. `environments[...]` is accepted on dataSource
/// blocks only; `environments["x"].all` selects every data source of that
/// environment.
DeploymentManifest parse_manifest(std::string_view text);

/// Emits canonical DSL text; parse_manifest(serialize_manifest(m)) == m for
/// every manifest accepted by validate_manifest.
std::string serialize_manifest(const DeploymentManifest& manifest);

/// Checks the invariants the parser enforces, for manifests built in code.
void validate_manifest(const DeploymentManifest& manifest);

bool is_valid_absolute_url(std::string_view text);

using BindingResolution = std::map<ComponentId, DeploymentOption>;

/// Maps every component of `app` to exactly one option. A named selector
/// beats an environment-qualified kind-wide one, which beats a plain
/// kind-wide one; equal specificity falls back to binding order.
BindingResolution resolve_bindings(const DeploymentManifest& manifest, const ApplicationModel& app);

}  // namespace cloudbroker
