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
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cloudbroker/catalog.hpp"
#include "cloudbroker/decision.hpp"
#include "cloudbroker/events.hpp"
#include "cloudbroker/manifest.hpp"

namespace cloudbroker {

struct DeploymentRef {
  std::string productId;
  std::string componentName;
  std::int64_t readyTick = 0;  // tick at which the deployment becomes visible
};

/// Enforcement-side view of one cloud product.
class ProviderAdapter {
 public:
  virtual ~ProviderAdapter() = default;

  /// Throws AlreadyDeployed, or InjectedFailure for a simulated provider error.
  virtual DeploymentRef deploy(const std::string& componentName, const ConfigParams& params) = 0;
  /// Removal takes effect no earlier than `notBeforeTick`. Throws NotDeployed.
  virtual void undeploy(const std::string& componentName, std::int64_t notBeforeTick = 0) = 0;
};

using AdapterMap = std::map<std::string, ProviderAdapter*>;

// ---------------------------------------------------------------------------
// Monitor point

/// Nearest-rank percentile of `values` (unsorted); `fraction` in (0, 1].
double nearest_rank_percentile(std::vector<double> values, double fraction);

struct CorrelationRecord {
  std::string componentName;
  std::string productId;
  std::string metric;
  std::optional<double> sloBound;
  double observedAggregate = 0.0;  // p95 over the window
  bool violated = false;
  std::deque<double> window;
};

class Monitor {
 public:
  static constexpr std::size_t kWindow = 100;

  /// Updates the per-(component, metric) windows and returns one
  /// QosViolation per latency window whose p95 exceeds its SLO bound.
  /// Throws UnknownComponent for samples of components without an SLO.
  std::vector<QosViolation> ingest(const MetricSamples& batch,
                                   const std::map<std::string, double>& slos);

  const CorrelationRecord* correlation(const std::string& componentName,
                                       std::string_view metric = kLatencyMetric) const;

 private:
  std::map<std::pair<std::string, std::string>, CorrelationRecord> records_;
};

// ---------------------------------------------------------------------------
// Enforcement point

enum class ActionKind { Deploy, Undeploy, Noop };
enum class Outcome { Ok, Failed };

struct ExecutedAction {
  std::string componentName;
  ActionKind action = ActionKind::Noop;
  std::string productId;
  Outcome outcome = Outcome::Ok;
  std::string error;
};

struct ExecutionReport {
  std::uint64_t planRevision = 0;
  std::vector<ExecutedAction> actions;
  bool rolledBack = false;
};

nlohmann::json to_json(const ExecutionReport& report);

/// Make-before-break: every target is deployed before any source is
/// released. A failed deploy undeploys the targets already placed, in
/// reverse order, and leaves every source untouched (rolledBack = true).
/// Throws MissingAdapter before touching anything.
ExecutionReport enforce(const PlanDiff& diff, const DeploymentPlan& newPlan,
                        const AdapterMap& adapters);

// ---------------------------------------------------------------------------
// Event log

struct LogRecord {
  std::uint64_t seq = 0;
  SimInstant ts = 0;
  std::string kind;  // event | decision | plan | enforce | alert
  nlohmann::json payload;

  /// `{"kind":..,"payload":..,"seq":..,"ts":..}` with sorted keys.
  std::string to_line() const;
};

LogRecord log_record_from_line(std::string_view line);
std::string render_log(const std::vector<LogRecord>& records);

/// Folds a log into the plan that was active at its end: a `plan` record
/// becomes active when the next `enforce` record for its revision did not
/// roll back. Throws ValidationError when seq is not strictly increasing.
std::optional<DeploymentPlan> replay_final_plan(const std::vector<LogRecord>& records);

// ---------------------------------------------------------------------------
// Governance loop

/// Owns the reference data and the active plan for one application, and
/// runs the monitor -> decision -> enforcement pipeline one event at a time.
///
/// Threshold and hysteresis gate redeploys while events keep arriving. Once
/// no decision input changed for a full hysteresis window, a reconcile timer
/// brings the plan back to decide() on the current catalog; the same timer
/// retries after a rolled-back enforcement.
class Broker {
 public:
  Broker(DeploymentManifest manifest, ApplicationModel app, GovernancePolicy policy,
         WorkloadProfile workload, Catalog catalog);

  void set_adapters(AdapterMap adapters) { adapters_ = std::move(adapters); }

  /// Initial decide + enforce. Throws NoFeasibleProduct, or
  /// InitialPlanInfeasible when the first enforcement rolls back.
  std::vector<LogRecord> initialize(SimInstant now);

  /// governance_step: logs the event, applies it to the monitor/catalog and,
  /// when warranted, re-decides and enforces.
  std::vector<LogRecord> step(GovernanceEvent event);

  /// Applies a catalog patch and steps every event it implies.
  std::vector<LogRecord> apply_catalog_update(const std::string& productId,
                                              const ProductPatch& patch, SimInstant now);

  /// Producers on any thread may enqueue; drain() consumes in FIFO order.
  void enqueue(GovernanceEvent event);
  std::vector<LogRecord> drain();

  std::optional<SimInstant> reconcile_due() const { return reconcileDue_; }
  /// Re-evaluates against a fresh decision if the reconcile timer expired.
  std::vector<LogRecord> on_tick(SimInstant now);

  const DeploymentPlan& plan() const { return plan_; }
  const Catalog& catalog() const { return catalog_; }
  const Monitor& monitor() const { return monitor_; }
  const DeploymentManifest& manifest() const { return manifest_; }
  const ApplicationModel& app() const { return app_; }
  const GovernancePolicy& policy() const { return policy_; }
  const WorkloadProfile& workload() const { return workload_; }
  const std::vector<LogRecord>& log() const { return log_; }
  DecisionInputs inputs() const { return {manifest_, app_, policy_, workload_}; }
  /// Plan changes after the initial deployment.
  std::size_t redeployments() const { return redeployments_; }
  SimInstant last_redeploy_at() const { return lastRedeployAt_; }

  /// SLO per assigned component, from the product's responseTimeMsP95.
  std::map<std::string, double> slos() const;

 private:
  LogRecord& append(SimInstant ts, std::string kind, nlohmann::json payload);
  void redeploy(DeploymentPlan proposal, SimInstant now, const std::string& why);
  void schedule_reconcile(SimInstant at);
  void emit(std::vector<LogRecord>& out, std::size_t from) const;

  DeploymentManifest manifest_;
  ApplicationModel app_;
  GovernancePolicy policy_;
  WorkloadProfile workload_;
  Catalog catalog_;
  Monitor monitor_;
  AdapterMap adapters_;
  DeploymentPlan plan_;
  std::uint64_t issuedRevision_ = 0;  // a rolled-back revision number is never reused
  SimInstant lastRedeployAt_ = 0;
  std::optional<SimInstant> reconcileDue_;
  std::size_t redeployments_ = 0;
  std::uint64_t nextSeq_ = 1;
  std::vector<LogRecord> log_;

  std::mutex queueMutex_;
  std::deque<GovernanceEvent> queue_;
};

}  // namespace cloudbroker
