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
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cloudbroker/catalog.hpp"
#include "cloudbroker/decision.hpp"
#include "cloudbroker/manifest.hpp"
#include "cloudbroker/runtime.hpp"

namespace cloudbroker {

/// xorshift64* (Vigna 2014, multiplier 0x2545F4914F6CDD1D). The 64-bit seed
/// is expanded through one splitmix64 step so that small seeds and 0 are fine.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);
  std::uint64_t next();
  /// Top 53 bits scaled into [0, 1).
  double uniform();

  static std::uint64_t splitmix64(std::uint64_t& state);

 private:
  std::uint64_t state_;
};

struct MetricGenerator {
  std::string metric{kLatencyMetric};
  double base = 0.0;
  double jitterPct = 0.0;

  /// base * (1 + jitterPct/100 * (2u - 1)), u = rng.uniform().
  double sample(Xorshift64Star& rng) const;
};

class SimClock {
 public:
  explicit SimClock(std::int64_t tickSeconds = 60);

  std::int64_t current_tick() const { return tick_; }
  std::int64_t tick_seconds() const { return tickSeconds_; }
  SimInstant now() const { return tick_ * tickSeconds_; }
  /// Throws ValidationError when `tick` lies in the past.
  void advance_to(std::int64_t tick);

 private:
  std::int64_t tick_ = 0;
  std::int64_t tickSeconds_;
};

/// In-memory provider for one product. Deploys and delayed undeploys land
/// `deployLatencyTicks` after the call, when advance_to() reaches them.
class SimProvider : public ProviderAdapter {
 public:
  SimProvider(std::string productId, std::int64_t deployLatencyTicks, MetricGenerator generator);

  DeploymentRef deploy(const std::string& componentName, const ConfigParams& params) override;
  void undeploy(const std::string& componentName, std::int64_t notBeforeTick = 0) override;

  void advance_to(std::int64_t tick);
  void fail_next_deploys(std::int64_t count) { failNextDeploys_ += count; }

  const std::string& product_id() const { return productId_; }
  std::int64_t deploy_latency_ticks() const { return deployLatencyTicks_; }
  std::int64_t pending_failures() const { return failNextDeploys_; }
  std::int64_t injected_failures() const { return injectedFailures_; }
  const std::set<std::string>& deployed() const { return deployed_; }
  const MetricGenerator& generator() const { return generator_; }
  const std::map<std::string, ConfigParams>& config() const { return config_; }
  bool in_flight() const { return !pendingDeploy_.empty() || !pendingUndeploy_.empty(); }
  /// Latest tick at which something in flight lands, if anything is.
  std::optional<std::int64_t> settles_at() const;

 private:
  std::string productId_;
  std::int64_t deployLatencyTicks_;
  MetricGenerator generator_;
  std::int64_t tick_ = 0;
  std::int64_t failNextDeploys_ = 0;
  std::int64_t injectedFailures_ = 0;
  std::set<std::string> deployed_;
  std::map<std::string, std::int64_t> pendingDeploy_;
  std::map<std::string, std::int64_t> pendingUndeploy_;
  std::map<std::string, ConfigParams> config_;
};

// ---------------------------------------------------------------------------
// Scenarios

struct CatalogUpdateAction {
  std::string productId;
  ProductPatch patch;
};

struct InjectSamplesAction {
  std::optional<std::string> component;  // ComponentId key; all assigned components when absent
  std::string metric{kLatencyMetric};
  std::int64_t count = 1;
  std::optional<double> base;  // overrides the provider's generator
  std::optional<double> jitterPct;
};

struct FailDeployAction {
  std::string productId;
  std::int64_t count = 1;
};

struct ReplanCommandAction {};

using ScenarioAction =
    std::variant<CatalogUpdateAction, InjectSamplesAction, FailDeployAction, ReplanCommandAction>;

struct TimelineEntry {
  std::int64_t tick = 0;
  ScenarioAction action;
};

struct ProviderOverride {
  std::optional<std::int64_t> deployLatencyTicks;
  std::optional<double> base;
  std::optional<double> jitterPct;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::int64_t ticks = 0;
  std::int64_t tickSeconds = 60;
  std::vector<TimelineEntry> timeline;
  /// Keyed by productId; "*" applies to every product without its own entry.
  std::map<std::string, ProviderOverride> providers;
  /// Input file paths by role (manifest, app, workload, policy, catalog),
  /// already resolved against the scenario file's directory.
  std::map<std::string, std::filesystem::path> inputs;
};

/// Throws ScenarioParse. Relative input paths resolve against `baseDir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& baseDir = {});

/// Everything run_scenario consumes, loaded from a scenario file and the
/// input files it names.
struct ScenarioBundle {
  Scenario scenario;
  DeploymentManifest manifest;
  ApplicationModel app;
  GovernancePolicy policy;
  WorkloadProfile workload;
  Catalog catalog;
};

/// Inputs the scenario file does not name are taken from `fallbacks`
/// (same role keys). Throws Io for unreadable files, ScenarioParse for a
/// malformed scenario, and the owning module's errors for malformed inputs.
ScenarioBundle load_scenario_bundle(
    const std::filesystem::path& scenarioFile,
    const std::map<std::string, std::filesystem::path>& fallbacks = {});

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> ticks;
};

struct ProviderState {
  std::set<std::string> deployed;
  std::int64_t injectedFailures = 0;
  std::int64_t pendingFailures = 0;
};

struct ScenarioResult {
  std::vector<LogRecord> log;
  DeploymentPlan finalPlan;
  Catalog finalCatalog;
  std::map<std::string, ProviderState> providers;
  std::size_t redeployments = 0;
  std::int64_t injectedFailures = 0;    // InjectedFailure raised by providers
  std::int64_t failuresScheduled = 0;   // sum of failDeploy counts
  std::int64_t endTick = 0;             // including the settle phase
  double monthlyCost = 0.0;             // of the final plan under the final catalog
};

/// Runs the timeline tick by tick, then keeps the clock moving until no
/// reconciliation is pending and nothing is in flight. Pure in its
/// arguments. Throws InitialPlanInfeasible, ScenarioParse.
ScenarioResult run_scenario(const Scenario& scenario, const DeploymentManifest& manifest,
                            const ApplicationModel& app, const GovernancePolicy& policy,
                            const WorkloadProfile& workload, const Catalog& initialCatalog,
                            const RunOverrides& overrides = {});

ScenarioResult run_scenario(const ScenarioBundle& bundle, const RunOverrides& overrides = {});

}  // namespace cloudbroker
