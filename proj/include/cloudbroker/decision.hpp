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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cloudbroker/catalog.hpp"
#include "cloudbroker/events.hpp"
#include "cloudbroker/manifest.hpp"

namespace cloudbroker {

struct QosThresholds {
  double minReliability = 0.0;
  double minSecurity = 0.0;
  double minPerf = 0.0;
  bool operator==(const QosThresholds&) const = default;
};

struct GovernancePolicy {
  double wCost = 0.5;
  double wPerf = 0.5;
  std::map<OptionCategory, QosThresholds> minQos;
  double redeployCostDeltaPct = 5.0;
  SimInstant hysteresisWindow = 3600;  // seconds
  bool excludeUnmeasuredFromBestEffort = true;

  QosThresholds thresholds(OptionCategory category) const;
  void validate() const;
};

GovernancePolicy policy_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const GovernancePolicy& policy);

using ConfigParams = std::map<std::string, std::string>;

struct Assignment {
  ComponentId component;
  std::string productId;
  ConfigParams configParams;
  bool operator==(const Assignment&) const = default;
};

struct DeploymentPlan {
  std::string planId;
  std::string appId;
  std::uint64_t revision = 0;
  std::vector<Assignment> assignments;
  SimInstant createdAt = 0;

  const Assignment* find(const ComponentId& component) const;
};

nlohmann::json to_json(const DeploymentPlan& plan);
DeploymentPlan plan_from_json(const nlohmann::json& doc);

/// Component -> product (and config) equality, ignoring id/revision/time.
bool same_assignments(const DeploymentPlan& a, const DeploymentPlan& b);

struct Move {
  ComponentId component;
  std::string fromProductId;  // empty: not deployed before
  std::string toProductId;    // empty: removed from the plan
  bool operator==(const Move&) const = default;
};

struct PlanDiff {
  std::vector<Move> moves;
  std::vector<ComponentId> unchanged;
};

nlohmann::json to_json(const PlanDiff& diff);

/// Everything decide() needs besides the catalog snapshot.
struct DecisionInputs {
  const DeploymentManifest& manifest;
  const ApplicationModel& app;
  const GovernancePolicy& policy;
  const WorkloadProfile& workload;
};

bool feasible(const Component& component, const DeploymentOption& option,
              const CloudProduct& product);

bool passes(const NormalizedOffer& offer, const QosThresholds& thresholds);

/// Drops offers below minQos[economy]; cheapest first, then perfScore desc,
/// then productId. Throws NoCandidates when nothing survives.
std::vector<NormalizedOffer> rank_economy(std::vector<NormalizedOffer> candidates,
                                          const GovernancePolicy& policy);

struct ScoredOffer {
  NormalizedOffer offer;
  double score = 0.0;
};

/// score = wCost * (1 - costNorm) + wPerf * perfScore, with costNorm the
/// min-max normalized cost over the surviving candidates (0 when they all
/// cost the same). Highest score first, then cheaper, then productId.
std::vector<ScoredOffer> rank_best_effort(std::vector<NormalizedOffer> candidates,
                                          const GovernancePolicy& policy);

/// All-or-nothing: throws NoFeasibleProduct naming the first component that
/// cannot be placed.
DeploymentPlan decide(const DecisionInputs& inputs, const Catalog& catalog,
                      std::uint64_t previousRevision = 0, SimInstant createdAt = 0);

/// Throws AppMismatch when the plans belong to different applications.
PlanDiff diff(const DeploymentPlan& before, const DeploymentPlan& after);

/// Sum of the assigned products' monthly cost under the current catalog.
double plan_monthly_cost(const DeploymentPlan& plan, const Catalog& catalog,
                         const WorkloadProfile& workload);

/// True when an assignment's product no longer hosts its component.
bool plan_still_feasible(const DeploymentPlan& plan, const DecisionInputs& inputs,
                         const Catalog& catalog);

struct RedeployVerdict {
  bool redeploy = false;
  bool forced = false;
  bool deferred = false;  // a trigger fired but the hysteresis window suppressed it
  bool alert = false;     // re-decision failed; the current plan stays
  std::string justification;
  double currentCost = 0.0;
  std::optional<double> proposedCost;
  std::optional<DeploymentPlan> proposal;
};

RedeployVerdict should_redeploy(const GovernanceEvent& event, const DeploymentPlan& current,
                                const DecisionInputs& inputs, const Catalog& catalog,
                                Lifecycle lifecycle, SimInstant lastRedeployAt, SimInstant now);

// ---------------------------------------------------------------------------
// Explanations

struct CandidateRow {
  NormalizedOffer offer;
  std::optional<double> score;  // ranking score; absent for ineligible rows
  bool eligible = true;
  std::string note;  // why the row was excluded, if it was
};

struct Explanation {
  ComponentId component;
  OptionCategory category = OptionCategory::Economy;
  std::string option;
  std::string assignedProductId;
  std::string winnerProductId;
  std::string reason;
  std::vector<CandidateRow> rows;
};

/// Ranked candidate table for one component under the current catalog.
Explanation explain(const DecisionInputs& inputs, const Catalog& catalog,
                    const DeploymentPlan& plan, const ComponentId& component);

nlohmann::json to_json(const Explanation& explanation);

}  // namespace cloudbroker
