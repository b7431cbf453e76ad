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

#include "cloudbroker/decision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json_util.hpp"

namespace cloudbroker {

using detail::invalid;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Policy

QosThresholds GovernancePolicy::thresholds(OptionCategory category) const {
  auto it = minQos.find(category);
  return it == minQos.end() ? QosThresholds{} : it->second;
}

void GovernancePolicy::validate() const {
  auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!unit(wCost)) invalid("wCost", "must lie in [0, 1]");
  if (!unit(wPerf)) invalid("wPerf", "must lie in [0, 1]");
  if (std::abs(wCost + wPerf - 1.0) > 1e-12) invalid("wCost", "wCost + wPerf must equal 1");
  for (const auto& [cat, t] : minQos) {
    if (!unit(t.minReliability) || !unit(t.minSecurity) || !unit(t.minPerf)) {
      invalid("minQos." + std::string(to_string(cat)), "thresholds must lie in [0, 1]");
    }
  }
  if (!std::isfinite(redeployCostDeltaPct) || redeployCostDeltaPct <= 0.0) {
    invalid("redeployCostDeltaPct", "must be > 0");
  }
  if (hysteresisWindow < 0) invalid("hysteresisWindow", "must be >= 0");
}

GovernancePolicy policy_from_json(const json& doc) {
  if (!doc.is_object()) invalid("policy", "expected an object");
  GovernancePolicy p;
  if (doc.contains("wCost")) p.wCost = detail::get_decimal(doc, "wCost");
  if (doc.contains("wPerf")) p.wPerf = detail::get_decimal(doc, "wPerf");
  if (auto it = doc.find("minQos"); it != doc.end()) {
    if (!it->is_object()) invalid("minQos", "expected an object");
    for (const auto& [name, t] : it->items()) {
      auto cat = option_category_from_string(name);
      if (!cat) invalid("minQos." + name, "unknown option category");
      QosThresholds q;
      if (t.contains("minReliability")) q.minReliability = detail::get_decimal(t, "minReliability");
      if (t.contains("minSecurity")) q.minSecurity = detail::get_decimal(t, "minSecurity");
      if (t.contains("minPerf")) q.minPerf = detail::get_decimal(t, "minPerf");
      p.minQos[*cat] = q;
    }
  }
  if (doc.contains("redeployCostDeltaPct")) {
    p.redeployCostDeltaPct = detail::get_decimal(doc, "redeployCostDeltaPct");
  }
  if (doc.contains("hysteresisWindow")) p.hysteresisWindow = detail::get_integer(doc, "hysteresisWindow");
  if (auto it = doc.find("excludeUnmeasuredFromBestEffort"); it != doc.end()) {
    if (!it->is_boolean()) invalid("excludeUnmeasuredFromBestEffort", "expected a boolean");
    p.excludeUnmeasuredFromBestEffort = it->get<bool>();
  }
  p.validate();
  return p;
}

json to_json(const GovernancePolicy& p) {
  json minQos = json::object();
  for (const auto& [cat, t] : p.minQos) {
    minQos[std::string(to_string(cat))] = {{"minReliability", format_decimal(t.minReliability)},
                                           {"minSecurity", format_decimal(t.minSecurity)},
                                           {"minPerf", format_decimal(t.minPerf)}};
  }
  return {{"wCost", format_decimal(p.wCost)},
          {"wPerf", format_decimal(p.wPerf)},
          {"minQos", std::move(minQos)},
          {"redeployCostDeltaPct", format_decimal(p.redeployCostDeltaPct)},
          {"hysteresisWindow", p.hysteresisWindow},
          {"excludeUnmeasuredFromBestEffort", p.excludeUnmeasuredFromBestEffort}};
}

// ---------------------------------------------------------------------------
// Plans

const Assignment* DeploymentPlan::find(const ComponentId& component) const {
  for (const auto& a : assignments) {
    if (a.component == component) return &a;
  }
  return nullptr;
}

json to_json(const DeploymentPlan& plan) {
  json assignments = json::array();
  for (const auto& a : plan.assignments) {
    assignments.push_back({{"componentName", a.component.key()},
                           {"productId", a.productId},
                           {"configParams", a.configParams}});
  }
  return {{"planId", plan.planId},
          {"appId", plan.appId},
          {"revision", plan.revision},
          {"assignments", std::move(assignments)},
          {"createdAt", plan.createdAt}};
}

DeploymentPlan plan_from_json(const json& doc) {
  DeploymentPlan plan;
  plan.planId = detail::get_string(doc, "planId");
  plan.appId = detail::get_string(doc, "appId");
  auto rev = detail::get_integer(doc, "revision");
  if (rev < 0) invalid("revision", "must be >= 0");
  plan.revision = static_cast<std::uint64_t>(rev);
  plan.createdAt = detail::get_integer(doc, "createdAt");
  const json& list = detail::require(doc, "assignments");
  if (!list.is_array()) invalid("assignments", "expected an array");
  for (const auto& a : list) {
    Assignment as;
    try {
      as.component = ComponentId::parse(detail::get_string(a, "componentName"));
    } catch (const BrokerError&) {
      invalid("assignments.componentName", "expected kind/name");
    }
    as.productId = detail::get_string(a, "productId");
    if (auto it = a.find("configParams"); it != a.end()) {
      if (!it->is_object()) invalid("assignments.configParams", "expected an object");
      for (const auto& [k, v] : it->items()) {
        if (!v.is_string()) invalid("assignments.configParams", "values must be strings");
        as.configParams[k] = v.get<std::string>();
      }
    }
    plan.assignments.push_back(std::move(as));
  }
  return plan;
}

bool same_assignments(const DeploymentPlan& a, const DeploymentPlan& b) {
  return a.appId == b.appId && a.assignments == b.assignments;
}

json to_json(const PlanDiff& d) {
  json moves = json::array();
  for (const auto& m : d.moves) {
    moves.push_back({{"componentName", m.component.key()},
                     {"fromProductId", m.fromProductId},
                     {"toProductId", m.toProductId}});
  }
  json unchanged = json::array();
  for (const auto& c : d.unchanged) unchanged.push_back(c.key());
  return {{"moves", std::move(moves)}, {"unchanged", std::move(unchanged)}};
}

PlanDiff diff(const DeploymentPlan& before, const DeploymentPlan& after) {
  if (before.appId != after.appId) {
    throw BrokerError(ErrorCode::AppMismatch, before.appId + " vs " + after.appId);
  }
  PlanDiff out;
  for (const auto& a : after.assignments) {
    const Assignment* old = before.find(a.component);
    if (old && old->productId == a.productId) {
      out.unchanged.push_back(a.component);
    } else {
      out.moves.push_back({a.component, old ? old->productId : std::string(), a.productId});
    }
  }
  for (const auto& b : before.assignments) {
    if (!after.find(b.component)) {
      out.moves.push_back({b.component, b.productId, std::string()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feasibility and ranking

bool feasible(const Component& component, const DeploymentOption& option,
              const CloudProduct& product) {
  if (!product.active()) return false;
  if (!std::includes(product.techTags.begin(), product.techTags.end(),
                     component.requiredTech.begin(), component.requiredTech.end())) {
    return false;
  }
  if (const auto* pc = std::get_if<PrivateCloud>(&option)) {
    return product.endpoint == pc->endpoint && product.cloudType == pc->cloudType &&
           product.providerId == pc->providerId;
  }
  return true;
}

bool passes(const NormalizedOffer& offer, const QosThresholds& t) {
  return offer.reliabilityScore >= t.minReliability && offer.securityScore >= t.minSecurity &&
         offer.perfScore >= t.minPerf;
}

namespace {

bool economy_before(const NormalizedOffer& a, const NormalizedOffer& b) {
  if (a.monthlyCost != b.monthlyCost) return a.monthlyCost < b.monthlyCost;
  if (a.perfScore != b.perfScore) return a.perfScore > b.perfScore;
  return a.productId < b.productId;
}

bool best_effort_before(const ScoredOffer& a, const ScoredOffer& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.offer.monthlyCost != b.offer.monthlyCost) return a.offer.monthlyCost < b.offer.monthlyCost;
  return a.offer.productId < b.offer.productId;
}

std::vector<ScoredOffer> score_best_effort(const std::vector<NormalizedOffer>& survivors,
                                           const GovernancePolicy& policy) {
  std::vector<ScoredOffer> out;
  if (survivors.empty()) return out;
  auto [lo, hi] = std::minmax_element(
      survivors.begin(), survivors.end(),
      [](const NormalizedOffer& a, const NormalizedOffer& b) { return a.monthlyCost < b.monthlyCost; });
  const double minCost = lo->monthlyCost;
  const double span = hi->monthlyCost - minCost;
  for (const auto& o : survivors) {
    double costNorm = span > 0.0 ? (o.monthlyCost - minCost) / span : 0.0;
    out.push_back({o, policy.wCost * (1.0 - costNorm) + policy.wPerf * o.perfScore});
  }
  return out;
}

bool best_effort_eligible(const NormalizedOffer& o, const GovernancePolicy& policy) {
  if (policy.excludeUnmeasuredFromBestEffort && !o.measured) return false;
  return passes(o, policy.thresholds(OptionCategory::BestEffort));
}

}  // namespace

std::vector<NormalizedOffer> rank_economy(std::vector<NormalizedOffer> candidates,
                                          const GovernancePolicy& policy) {
  const auto t = policy.thresholds(OptionCategory::Economy);
  std::erase_if(candidates, [&](const NormalizedOffer& o) { return !passes(o, t); });
  if (candidates.empty()) {
    throw BrokerError(ErrorCode::NoCandidates, "economy");
  }
  std::sort(candidates.begin(), candidates.end(), economy_before);
  return candidates;
}

std::vector<ScoredOffer> rank_best_effort(std::vector<NormalizedOffer> candidates,
                                          const GovernancePolicy& policy) {
  std::erase_if(candidates,
                [&](const NormalizedOffer& o) { return !best_effort_eligible(o, policy); });
  if (candidates.empty()) {
    throw BrokerError(ErrorCode::NoCandidates, "bestEffort");
  }
  auto scored = score_best_effort(candidates, policy);
  std::sort(scored.begin(), scored.end(), best_effort_before);
  return scored;
}

// ---------------------------------------------------------------------------
// decide

namespace {

class OfferCache {
 public:
  OfferCache(const Catalog& catalog, const WorkloadProfile& workload)
      : catalog_(catalog), workload_(workload) {}

  const NormalizedOffer& get(const CloudProduct& p) {
    auto it = cache_.find(p.productId);
    if (it == cache_.end()) {
      it = cache_.emplace(p.productId, catalog_.normalize_offer(p, workload_)).first;
    }
    return it->second;
  }

 private:
  const Catalog& catalog_;
  const WorkloadProfile& workload_;
  std::map<std::string, NormalizedOffer> cache_;
};

std::vector<const CloudProduct*> feasible_products(const Catalog& catalog, const Component& c,
                                                   const DeploymentOption& option) {
  auto all = catalog.candidates();
  std::erase_if(all, [&](const CloudProduct* p) { return !feasible(c, option, *p); });
  return all;
}

std::string choose_product(const Component& c, const DeploymentOption& option,
                           const Catalog& catalog, const GovernancePolicy& policy,
                           OfferCache& offers) {
  auto products = feasible_products(catalog, c, option);
  const auto category = category_of(option);
  if (products.empty()) {
    throw NoFeasibleProduct(c.id().key(), describe(option));
  }
  if (category == OptionCategory::PrivateCloud) {
    // Several registrations of one endpoint triple pin to the lowest id.
    auto it = std::min_element(products.begin(), products.end(),
                               [](const CloudProduct* a, const CloudProduct* b) {
                                 return a->productId < b->productId;
                               });
    return (*it)->productId;
  }
  std::vector<NormalizedOffer> candidates;
  candidates.reserve(products.size());
  for (const auto* p : products) candidates.push_back(offers.get(*p));
  try {
    if (category == OptionCategory::Economy) {
      return rank_economy(std::move(candidates), policy).front().productId;
    }
    return rank_best_effort(std::move(candidates), policy).front().offer.productId;
  } catch (const BrokerError& e) {
    if (e.code() != ErrorCode::NoCandidates) throw;
    throw NoFeasibleProduct(c.id().key(), describe(option));
  }
}

}  // namespace

DeploymentPlan decide(const DecisionInputs& inputs, const Catalog& catalog,
                      std::uint64_t previousRevision, SimInstant createdAt) {
  inputs.policy.validate();
  const auto resolution = resolve_bindings(inputs.manifest, inputs.app);
  OfferCache offers(catalog, inputs.workload);

  DeploymentPlan plan;
  plan.appId = inputs.app.appId;
  plan.revision = previousRevision + 1;
  plan.planId = inputs.app.appId + "-r" + std::to_string(plan.revision);
  plan.createdAt = createdAt;
  for (const auto& c : inputs.app.components) {
    const auto& option = resolution.at(c.id());
    std::string pid = choose_product(c, option, catalog, inputs.policy, offers);
    const CloudProduct& p = catalog.get(pid);
    ConfigParams params{{"cloudType", std::string(to_string(p.cloudType))},
                        {"providerId", p.providerId},
                        {"option", std::string(to_string(category_of(option)))}};
    if (p.endpoint) params["endpoint"] = *p.endpoint;
    if (c.environment) params["environment"] = *c.environment;
    plan.assignments.push_back({c.id(), std::move(pid), std::move(params)});
  }
  return plan;
}

double plan_monthly_cost(const DeploymentPlan& plan, const Catalog& catalog,
                         const WorkloadProfile& workload) {
  double total = 0.0;
  for (const auto& a : plan.assignments) {
    total += catalog.estimate_monthly_cost(catalog.get(a.productId).pricing, workload);
  }
  return total;
}

bool plan_still_feasible(const DeploymentPlan& plan, const DecisionInputs& inputs,
                         const Catalog& catalog) {
  const auto resolution = resolve_bindings(inputs.manifest, inputs.app);
  for (const auto& a : plan.assignments) {
    const auto* p = catalog.find(a.productId);
    const auto* c = inputs.app.find(a.component);
    if (!p || !c || !feasible(*c, resolution.at(a.component), *p)) return false;
  }
  return true;
}

namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

}  // namespace

RedeployVerdict should_redeploy(const GovernanceEvent& event, const DeploymentPlan& current,
                                const DecisionInputs& inputs, const Catalog& catalog,
                                Lifecycle lifecycle, SimInstant lastRedeployAt, SimInstant now) {
  RedeployVerdict v;
  if (lifecycle == Lifecycle::Passive) {
    v.justification = "passive lifecycle: event recorded only";
    return v;
  }
  if (std::holds_alternative<MetricSamples>(event.payload)) {
    v.justification = "monitoring batch: no decision input changed";
    return v;
  }

  v.currentCost = plan_monthly_cost(current, catalog, inputs.workload);
  std::string trigger;
  bool breach = false;

  if (std::holds_alternative<ReplanRequested>(event.payload)) {
    v.forced = true;
    trigger = "explicit re-plan command";
  } else if (std::holds_alternative<ProductWithdrawn>(event.payload) ||
             std::holds_alternative<TechnologyChanged>(event.payload)) {
    const std::string pid = subject_product(event.payload);
    const auto resolution = resolve_bindings(inputs.manifest, inputs.app);
    for (const auto& a : current.assignments) {
      if (a.productId != pid) continue;
      const auto* c = inputs.app.find(a.component);
      const auto* p = catalog.find(pid);
      if (!c || !p || !feasible(*c, resolution.at(a.component), *p)) {
        v.forced = true;
        trigger = "assigned product " + pid + " can no longer host " + a.component.key();
        break;
      }
    }
  } else if (const auto* q = std::get_if<QosViolation>(&event.payload)) {
    const auto resolution = resolve_bindings(inputs.manifest, inputs.app);
    ComponentId cid = ComponentId::parse(q->componentName);
    const Assignment* a = current.find(cid);
    auto opt = resolution.find(cid);
    if (a && a->productId == q->productId && opt != resolution.end()) {
      auto cat = category_of(opt->second);
      if (cat != OptionCategory::PrivateCloud) {
        auto offer = catalog.normalize_offer(catalog.get(a->productId), inputs.workload);
        if (!passes(offer, inputs.policy.thresholds(cat))) {
          breach = true;
          trigger = "QoS of " + a->productId + " for " + cid.key() + " breaches minQos[" +
                    std::string(to_string(cat)) + "]";
        }
      }
    }
  }

  try {
    v.proposal = decide(inputs, catalog, current.revision, now);
  } catch (const NoFeasibleProduct& e) {
    v.alert = true;
    v.justification = "re-decision infeasible: " + std::string(e.what());
    v.proposal.reset();
    return v;
  }
  v.proposedCost = plan_monthly_cost(*v.proposal, catalog, inputs.workload);

  if (same_assignments(*v.proposal, current)) {
    v.justification = "current plan already matches a fresh decision";
    v.proposal.reset();
    return v;
  }

  const double improvement =
      v.currentCost > 0.0 ? (v.currentCost - *v.proposedCost) / v.currentCost * 100.0 : 0.0;
  const bool costTrigger = improvement > inputs.policy.redeployCostDeltaPct;
  if (costTrigger && trigger.empty()) {
    trigger = "total monthly cost improves by " + pct(improvement) + " (> " +
              pct(inputs.policy.redeployCostDeltaPct) + ")";
  }
  if (!v.forced && !breach && !costTrigger) {
    v.justification = "cost improvement " + pct(improvement) + " does not exceed " +
                      pct(inputs.policy.redeployCostDeltaPct);
    v.proposal.reset();
    return v;
  }
  if (!v.forced && now - lastRedeployAt < inputs.policy.hysteresisWindow) {
    v.deferred = true;
    v.justification = trigger + "; suppressed by hysteresis (" +
                      std::to_string(now - lastRedeployAt) + "s since last redeploy, window " +
                      std::to_string(inputs.policy.hysteresisWindow) + "s)";
    v.proposal.reset();
    return v;
  }
  v.redeploy = true;
  v.justification = trigger;
  return v;
}

// ---------------------------------------------------------------------------
// explain

Explanation explain(const DecisionInputs& inputs, const Catalog& catalog,
                    const DeploymentPlan& plan, const ComponentId& component) {
  const Component* c = inputs.app.find(component);
  if (!c) {
    throw BrokerError(ErrorCode::UnknownComponent, component.key());
  }
  const auto resolution = resolve_bindings(inputs.manifest, inputs.app);
  const auto& option = resolution.at(component);

  Explanation ex;
  ex.component = component;
  ex.category = category_of(option);
  ex.option = describe(option);
  if (const auto* a = plan.find(component)) ex.assignedProductId = a->productId;

  auto products = feasible_products(catalog, *c, option);
  std::vector<NormalizedOffer> offers;
  for (const auto* p : products) offers.push_back(catalog.normalize_offer(*p, inputs.workload));

  if (ex.category == OptionCategory::PrivateCloud) {
    std::sort(offers.begin(), offers.end(),
              [](const auto& a, const auto& b) { return a.productId < b.productId; });
    for (const auto& o : offers) ex.rows.push_back({o, std::nullopt, true, ""});
    if (!offers.empty()) ex.winnerProductId = offers.front().productId;
    ex.reason = "privateCloud pin";
    return ex;
  }

  if (ex.category == OptionCategory::Economy) {
    const auto t = inputs.policy.thresholds(OptionCategory::Economy);
    std::vector<NormalizedOffer> eligible;
    for (const auto& o : offers)
      if (passes(o, t)) eligible.push_back(o);
    auto scored = score_best_effort(eligible, GovernancePolicy{1.0, 0.0, {}, 5.0, 0, false});
    std::map<std::string, double> scoreOf;
    for (const auto& s : scored) scoreOf[s.offer.productId] = s.score;
    std::sort(offers.begin(), offers.end(), economy_before);
    for (const auto& o : offers) {
      bool ok = passes(o, t);
      ex.rows.push_back({o, ok ? std::optional(scoreOf[o.productId]) : std::nullopt, ok,
                         ok ? "" : "below minQos[economy]"});
    }
    auto first = std::find_if(ex.rows.begin(), ex.rows.end(), [](auto& r) { return r.eligible; });
    if (first == ex.rows.end()) {
      ex.reason = "no candidate passes minQos[economy]";
      return ex;
    }
    ex.winnerProductId = first->offer.productId;
    auto second = std::find_if(first + 1, ex.rows.end(), [](auto& r) { return r.eligible; });
    if (second == ex.rows.end()) {
      ex.reason = "only eligible candidate";
    } else if (second->offer.monthlyCost != first->offer.monthlyCost) {
      ex.reason = "lowest monthlyCost (" + format_decimal(first->offer.monthlyCost) + " vs " +
                  format_decimal(second->offer.monthlyCost) + " for " +
                  second->offer.productId + ")";
    } else if (second->offer.perfScore != first->offer.perfScore) {
      ex.reason = "tied on monthlyCost with " + second->offer.productId +
                  "; higher perfScore wins";
    } else {
      ex.reason = "tied on monthlyCost and perfScore with " + second->offer.productId +
                  "; lower productId wins";
    }
    return ex;
  }

  // bestEffort
  std::vector<NormalizedOffer> eligible;
  std::vector<NormalizedOffer> excluded;
  for (const auto& o : offers) {
    (best_effort_eligible(o, inputs.policy) ? eligible : excluded).push_back(o);
  }
  auto scored = score_best_effort(eligible, inputs.policy);
  std::sort(scored.begin(), scored.end(), best_effort_before);
  for (const auto& s : scored) ex.rows.push_back({s.offer, s.score, true, ""});
  std::sort(excluded.begin(), excluded.end(), economy_before);
  for (const auto& o : excluded) {
    std::string note = (inputs.policy.excludeUnmeasuredFromBestEffort && !o.measured)
                           ? "unmeasured (no latency data)"
                           : "below minQos[bestEffort]";
    ex.rows.push_back({o, std::nullopt, false, note});
  }
  if (scored.empty()) {
    ex.reason = "no candidate is eligible for bestEffort";
    return ex;
  }
  ex.winnerProductId = scored.front().offer.productId;
  if (scored.size() == 1) {
    ex.reason = "only eligible candidate";
  } else if (scored[0].score != scored[1].score) {
    ex.reason = "highest composite score (" + format_decimal(scored[0].score) + " vs " +
                format_decimal(scored[1].score) + " for " + scored[1].offer.productId + ")";
  } else if (scored[0].offer.monthlyCost != scored[1].offer.monthlyCost) {
    ex.reason = "tied on score with " + scored[1].offer.productId + "; cheaper wins";
  } else {
    ex.reason = "tied on score and monthlyCost with " + scored[1].offer.productId +
                "; lower productId wins";
  }
  return ex;
}

json to_json(const Explanation& ex) {
  json rows = json::array();
  int rank = 0;
  for (const auto& r : ex.rows) {
    json row = to_json(r.offer);
    row["eligible"] = r.eligible;
    row["rank"] = r.eligible ? json(++rank) : json(nullptr);
    row["score"] = r.score ? json(format_decimal(*r.score)) : json(nullptr);
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  return {{"componentName", ex.component.key()},
          {"option", ex.option},
          {"category", std::string(to_string(ex.category))},
          {"assignedProductId", ex.assignedProductId},
          {"winnerProductId", ex.winnerProductId},
          {"reason", ex.reason},
          {"candidates", std::move(rows)}};
}

}  // namespace cloudbroker
