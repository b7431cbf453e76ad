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

#include "cloudbroker/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json_util.hpp"

namespace cloudbroker {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Monitor

double nearest_rank_percentile(std::vector<double> values, double fraction) {
  if (values.empty()) {
    throw BrokerError(ErrorCode::Validation, "window", "ValidationError(window): empty window");
  }
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

std::vector<QosViolation> Monitor::ingest(const MetricSamples& batch,
                                          const std::map<std::string, double>& slos) {
  for (const auto& s : batch.samples) {
    if (!slos.count(s.componentName)) {
      throw BrokerError(ErrorCode::UnknownComponent, s.componentName);
    }
  }
  std::set<std::pair<std::string, std::string>> touched;
  for (const auto& s : batch.samples) {
    auto key = std::make_pair(s.componentName, s.metric);
    auto& rec = records_[key];
    if (rec.productId != s.productId) {
      // The component moved; samples from the previous host no longer apply.
      rec.window.clear();
      rec.productId = s.productId;
    }
    rec.componentName = s.componentName;
    rec.metric = s.metric;
    rec.window.push_back(s.value);
    while (rec.window.size() > kWindow) rec.window.pop_front();
    touched.insert(key);
  }

  std::vector<QosViolation> out;
  for (const auto& key : touched) {
    auto& rec = records_[key];
    rec.observedAggregate =
        nearest_rank_percentile({rec.window.begin(), rec.window.end()}, 0.95);
    if (rec.metric != kLatencyMetric) continue;
    rec.sloBound = slos.at(rec.componentName);
    rec.violated = rec.observedAggregate > *rec.sloBound;
    if (rec.violated) {
      out.push_back({rec.productId, rec.componentName, rec.metric, rec.observedAggregate,
                     *rec.sloBound});
    }
  }
  return out;
}

const CorrelationRecord* Monitor::correlation(const std::string& componentName,
                                              std::string_view metric) const {
  auto it = records_.find({componentName, std::string(metric)});
  return it == records_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Enforcement

namespace {

std::string_view to_string(ActionKind a) {
  switch (a) {
    case ActionKind::Deploy: return "deploy";
    case ActionKind::Undeploy: return "undeploy";
    case ActionKind::Noop: return "noop";
  }
  return "?";
}

}  // namespace

json to_json(const ExecutionReport& report) {
  json actions = json::array();
  for (const auto& a : report.actions) {
    json e{{"componentName", a.componentName},
           {"action", std::string(to_string(a.action))},
           {"productId", a.productId},
           {"outcome", a.outcome == Outcome::Ok ? "ok" : "failed"}};
    if (!a.error.empty()) e["error"] = a.error;
    actions.push_back(std::move(e));
  }
  return {{"planRevision", report.planRevision},
          {"actions", std::move(actions)},
          {"rolledBack", report.rolledBack}};
}

ExecutionReport enforce(const PlanDiff& diff, const DeploymentPlan& newPlan,
                        const AdapterMap& adapters) {
  auto adapter = [&](const std::string& pid) -> ProviderAdapter& {
    auto it = adapters.find(pid);
    if (it == adapters.end() || it->second == nullptr) {
      throw BrokerError(ErrorCode::MissingAdapter, pid);
    }
    return *it->second;
  };
  for (const auto& m : diff.moves) {
    if (!m.toProductId.empty()) adapter(m.toProductId);
    if (!m.fromProductId.empty()) adapter(m.fromProductId);
  }

  ExecutionReport report;
  report.planRevision = newPlan.revision;
  for (const auto& c : diff.unchanged) {
    const auto* a = newPlan.find(c);
    report.actions.push_back({c.key(), ActionKind::Noop, a ? a->productId : "", Outcome::Ok, ""});
  }

  std::vector<const Move*> placed;
  std::int64_t readyTick = 0;
  for (const auto& m : diff.moves) {
    if (m.toProductId.empty()) continue;
    const auto* target = newPlan.find(m.component);
    ConfigParams params = target ? target->configParams : ConfigParams{};
    const std::string name = m.component.key();
    try {
      auto ref = adapter(m.toProductId).deploy(name, params);
      readyTick = std::max(readyTick, ref.readyTick);
      report.actions.push_back({name, ActionKind::Deploy, m.toProductId, Outcome::Ok, ""});
      placed.push_back(&m);
    } catch (const BrokerError& e) {
      report.actions.push_back({name, ActionKind::Deploy, m.toProductId, Outcome::Failed, e.what()});
      for (auto it = placed.rbegin(); it != placed.rend(); ++it) {
        const std::string undo = (*it)->component.key();
        try {
          adapter((*it)->toProductId).undeploy(undo);
          report.actions.push_back({undo, ActionKind::Undeploy, (*it)->toProductId, Outcome::Ok, ""});
        } catch (const BrokerError& ue) {
          report.actions.push_back(
              {undo, ActionKind::Undeploy, (*it)->toProductId, Outcome::Failed, ue.what()});
        }
      }
      report.rolledBack = true;
      return report;
    }
  }

  for (const auto& m : diff.moves) {
    if (m.fromProductId.empty()) continue;
    const std::string name = m.component.key();
    try {
      adapter(m.fromProductId).undeploy(name, readyTick);
      report.actions.push_back({name, ActionKind::Undeploy, m.fromProductId, Outcome::Ok, ""});
    } catch (const BrokerError& e) {
      // The target already serves the component; a stale source is logged, not reverted.
      report.actions.push_back({name, ActionKind::Undeploy, m.fromProductId, Outcome::Failed, e.what()});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Log

std::string LogRecord::to_line() const {
  json j{{"seq", seq}, {"ts", ts}, {"kind", kind}, {"payload", payload}};
  return j.dump();
}

LogRecord log_record_from_line(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    detail::invalid("log", "record is not a JSON object");
  }
  LogRecord r;
  r.seq = static_cast<std::uint64_t>(detail::get_integer(j, "seq"));
  r.ts = detail::get_integer(j, "ts");
  r.kind = detail::get_string(j, "kind");
  r.payload = detail::require(j, "payload");
  return r;
}

std::string render_log(const std::vector<LogRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.to_line();
    out += '\n';
  }
  return out;
}

std::optional<DeploymentPlan> replay_final_plan(const std::vector<LogRecord>& records) {
  std::uint64_t prev = 0;
  std::optional<DeploymentPlan> pending;
  std::optional<DeploymentPlan> active;
  for (const auto& r : records) {
    if (r.seq <= prev) {
      detail::invalid("log.seq", "not strictly increasing at " + std::to_string(r.seq));
    }
    prev = r.seq;
    if (r.kind == "plan") {
      pending = plan_from_json(detail::require(r.payload, "plan"));
    } else if (r.kind == "enforce" && pending) {
      auto rev = r.payload.at("planRevision").get<std::uint64_t>();
      if (rev == pending->revision) {
        if (!r.payload.at("rolledBack").get<bool>()) active = std::move(pending);
        pending.reset();
      }
    }
  }
  return active;
}

// ---------------------------------------------------------------------------
// Broker

Broker::Broker(DeploymentManifest manifest, ApplicationModel app, GovernancePolicy policy,
               WorkloadProfile workload, Catalog catalog)
    : manifest_(std::move(manifest)),
      app_(std::move(app)),
      policy_(std::move(policy)),
      workload_(std::move(workload)),
      catalog_(std::move(catalog)) {
  app_.validate();
  validate_manifest(manifest_);
  policy_.validate();
  plan_.appId = app_.appId;
}

LogRecord& Broker::append(SimInstant ts, std::string kind, json payload) {
  log_.push_back({nextSeq_++, ts, std::move(kind), std::move(payload)});
  return log_.back();
}

void Broker::emit(std::vector<LogRecord>& out, std::size_t from) const {
  out.insert(out.end(), log_.begin() + static_cast<std::ptrdiff_t>(from), log_.end());
}

std::map<std::string, double> Broker::slos() const {
  std::map<std::string, double> out;
  for (const auto& a : plan_.assignments) {
    if (const auto* p = catalog_.find(a.productId)) {
      out[a.component.key()] = p->sla.responseTimeMsP95;
    }
  }
  return out;
}

void Broker::schedule_reconcile(SimInstant at) {
  if (manifest_.lifecycle != Lifecycle::Active) return;
  reconcileDue_ = at;
}

std::vector<LogRecord> Broker::initialize(SimInstant now) {
  const std::size_t start = log_.size();
  DeploymentPlan proposal = decide(inputs(), catalog_, plan_.revision, now);
  append(now, "decision",
         {{"redeploy", true},
          {"forced", true},
          {"justification", "initial deployment"},
          {"proposedCost", format_decimal(plan_monthly_cost(proposal, catalog_, workload_))}});
  redeploy(proposal, now, "initial deployment");
  if (plan_.revision == 0) {
    throw BrokerError(ErrorCode::InitialPlanInfeasible, "initial enforcement rolled back");
  }
  std::vector<LogRecord> out;
  emit(out, start);
  return out;
}

void Broker::redeploy(DeploymentPlan proposal, SimInstant now, const std::string& why) {
  proposal.revision = ++issuedRevision_;
  proposal.planId = app_.appId + "-r" + std::to_string(proposal.revision);
  PlanDiff d = diff(plan_, proposal);
  append(now, "plan", {{"plan", to_json(proposal)}, {"diff", to_json(d)}, {"justification", why}});
  ExecutionReport report;
  try {
    report = enforce(d, proposal, adapters_);
  } catch (const BrokerError& e) {
    append(now, "alert", {{"reason", std::string("enforcement aborted: ") + e.what()}});
    return;
  }
  append(now, "enforce", to_json(report));
  if (report.rolledBack) {
    append(now, "alert",
           {{"reason", "enforcement of revision " + std::to_string(proposal.revision) +
                           " rolled back; revision " + std::to_string(plan_.revision) +
                           " stays active"}});
    schedule_reconcile(now + policy_.hysteresisWindow);
    return;
  }
  if (plan_.revision != 0) ++redeployments_;
  plan_ = proposal;
  lastRedeployAt_ = now;
}

std::vector<LogRecord> Broker::step(GovernanceEvent event) {
  const std::size_t start = log_.size();
  const SimInstant now = event.timestamp;
  event.seq = nextSeq_;
  append(now, "event", to_json(event.payload));

  if (const auto* batch = std::get_if<MetricSamples>(&event.payload)) {
    auto violations = monitor_.ingest(*batch, slos());
    for (auto& v : violations) {
      step(GovernanceEvent{std::move(v), now, 0});
    }
    std::vector<LogRecord> out;
    emit(out, start);
    return out;
  }

  if (const auto* v = std::get_if<QosViolation>(&event.payload)) {
    catalog_.ingest_qos_report(
        {v->productId, "", std::string(kLatencyMetric), v->observed, "monitor", 1.0, now});
  }

  const bool replan = std::holds_alternative<ReplanRequested>(event.payload);
  if (manifest_.lifecycle == Lifecycle::Passive && !replan) {
    std::vector<LogRecord> out;
    emit(out, start);
    return out;
  }

  RedeployVerdict verdict =
      should_redeploy(event, plan_, inputs(), catalog_,
                      replan ? Lifecycle::Active : manifest_.lifecycle, lastRedeployAt_, now);
  json decision{{"eventSeq", event.seq},
                {"redeploy", verdict.redeploy},
                {"forced", verdict.forced},
                {"deferred", verdict.deferred},
                {"justification", verdict.justification},
                {"currentCost", format_decimal(verdict.currentCost)}};
  if (verdict.proposedCost) decision["proposedCost"] = format_decimal(*verdict.proposedCost);
  append(now, "decision", std::move(decision));

  if (verdict.alert) {
    append(now, "alert", {{"reason", verdict.justification}});
  }
  if (verdict.redeploy && verdict.proposal) {
    redeploy(*verdict.proposal, now, verdict.justification);
  }
  // Any decision input changed: reconcile once the market stays quiet for a window.
  schedule_reconcile(std::max(now, lastRedeployAt_) + policy_.hysteresisWindow);

  std::vector<LogRecord> out;
  emit(out, start);
  return out;
}

std::vector<LogRecord> Broker::apply_catalog_update(const std::string& productId,
                                                    const ProductPatch& patch, SimInstant now) {
  std::vector<LogRecord> out;
  for (auto& payload : catalog_.update_product(productId, patch)) {
    auto records = step(GovernanceEvent{std::move(payload), now, 0});
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

void Broker::enqueue(GovernanceEvent event) {
  std::lock_guard lock(queueMutex_);
  queue_.push_back(std::move(event));
}

std::vector<LogRecord> Broker::drain() {
  std::vector<LogRecord> out;
  for (;;) {
    GovernanceEvent next;
    {
      std::lock_guard lock(queueMutex_);
      if (queue_.empty()) break;
      next = std::move(queue_.front());
      queue_.pop_front();
    }
    auto records = step(std::move(next));
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

std::vector<LogRecord> Broker::on_tick(SimInstant now) {
  std::vector<LogRecord> out;
  if (!reconcileDue_ || *reconcileDue_ > now || manifest_.lifecycle != Lifecycle::Active) {
    return out;
  }
  if (now - lastRedeployAt_ < policy_.hysteresisWindow) {
    reconcileDue_ = lastRedeployAt_ + policy_.hysteresisWindow;
    return out;
  }
  reconcileDue_.reset();
  const std::size_t start = log_.size();
  json decision{{"trigger", "quiet-period reconciliation"},
                {"currentCost", format_decimal(plan_monthly_cost(plan_, catalog_, workload_))}};
  std::optional<DeploymentPlan> fresh;
  try {
    fresh = decide(inputs(), catalog_, plan_.revision, now);
  } catch (const NoFeasibleProduct& e) {
    decision["redeploy"] = false;
    decision["justification"] = std::string("re-decision infeasible: ") + e.what();
    append(now, "decision", std::move(decision));
    append(now, "alert", {{"reason", std::string("re-decision infeasible: ") + e.what()}});
    emit(out, start);
    return out;
  }
  const bool differs = !same_assignments(*fresh, plan_);
  decision["redeploy"] = differs;
  decision["proposedCost"] = format_decimal(plan_monthly_cost(*fresh, catalog_, workload_));
  decision["justification"] = differs ? "plan differs from a fresh decision after a quiet window"
                                      : "plan matches a fresh decision";
  append(now, "decision", std::move(decision));
  if (differs) {
    redeploy(*fresh, now, "quiet-period reconciliation");
  }
  emit(out, start);
  return out;
}

}  // namespace cloudbroker
