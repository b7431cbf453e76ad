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

#include "cloudbroker/simcloud.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>

#include "json_util.hpp"

namespace cloudbroker {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Generator

std::uint64_t Xorshift64Star::splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Xorshift64Star::Xorshift64Star(std::uint64_t seed) {
  std::uint64_t s = seed;
  state_ = splitmix64(s);
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;  // xorshift must not start at 0
}

std::uint64_t Xorshift64Star::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

double Xorshift64Star::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double MetricGenerator::sample(Xorshift64Star& rng) const {
  const double u = rng.uniform();
  return base * (1.0 + jitterPct / 100.0 * (2.0 * u - 1.0));
}

// ---------------------------------------------------------------------------
// Clock and provider

SimClock::SimClock(std::int64_t tickSeconds) : tickSeconds_(tickSeconds) {
  if (tickSeconds <= 0) detail::invalid("tickSeconds", "must be > 0");
}

void SimClock::advance_to(std::int64_t tick) {
  if (tick < tick_) {
    detail::invalid("tick", "clock cannot move back from " + std::to_string(tick_) + " to " +
                                std::to_string(tick));
  }
  tick_ = tick;
}

SimProvider::SimProvider(std::string productId, std::int64_t deployLatencyTicks,
                         MetricGenerator generator)
    : productId_(std::move(productId)),
      deployLatencyTicks_(deployLatencyTicks),
      generator_(std::move(generator)) {
  if (deployLatencyTicks < 0) detail::invalid("deployLatencyTicks", "must be >= 0");
}

DeploymentRef SimProvider::deploy(const std::string& componentName, const ConfigParams& params) {
  if (auto it = pendingUndeploy_.find(componentName); it != pendingUndeploy_.end()) {
    // Moving back before the old copy left: keep it.
    pendingUndeploy_.erase(it);
    config_[componentName] = params;
    return {productId_, componentName, tick_};
  }
  if (deployed_.count(componentName) || pendingDeploy_.count(componentName)) {
    throw BrokerError(ErrorCode::AlreadyDeployed, componentName + "@" + productId_);
  }
  if (failNextDeploys_ > 0) {
    --failNextDeploys_;
    ++injectedFailures_;
    throw BrokerError(ErrorCode::InjectedFailure, componentName + "@" + productId_);
  }
  const std::int64_t ready = tick_ + deployLatencyTicks_;
  config_[componentName] = params;
  if (deployLatencyTicks_ == 0) {
    deployed_.insert(componentName);
  } else {
    pendingDeploy_[componentName] = ready;
  }
  return {productId_, componentName, ready};
}

void SimProvider::undeploy(const std::string& componentName, std::int64_t notBeforeTick) {
  if (auto it = pendingDeploy_.find(componentName); it != pendingDeploy_.end()) {
    pendingDeploy_.erase(it);
    config_.erase(componentName);
    return;
  }
  if (!deployed_.count(componentName) || pendingUndeploy_.count(componentName)) {
    throw BrokerError(ErrorCode::NotDeployed, componentName + "@" + productId_);
  }
  if (notBeforeTick <= tick_) {
    deployed_.erase(componentName);
    config_.erase(componentName);
  } else {
    pendingUndeploy_[componentName] = notBeforeTick;
  }
}

void SimProvider::advance_to(std::int64_t tick) {
  tick_ = std::max(tick_, tick);
  for (auto it = pendingDeploy_.begin(); it != pendingDeploy_.end();) {
    if (it->second <= tick_) {
      deployed_.insert(it->first);
      it = pendingDeploy_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = pendingUndeploy_.begin(); it != pendingUndeploy_.end();) {
    if (it->second <= tick_) {
      deployed_.erase(it->first);
      config_.erase(it->first);
      it = pendingUndeploy_.erase(it);
    } else {
      ++it;
    }
  }
}

std::optional<std::int64_t> SimProvider::settles_at() const {
  std::optional<std::int64_t> out;
  for (const auto& [_, t] : pendingDeploy_) out = std::max(out.value_or(t), t);
  for (const auto& [_, t] : pendingUndeploy_) out = std::max(out.value_or(t), t);
  return out;
}

// ---------------------------------------------------------------------------
// Scenario parsing

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw BrokerError(ErrorCode::ScenarioParse, field, "ScenarioParseError(" + field + "): " + why);
}

// Reader errors inside a scenario document are scenario errors.
template <typename F>
auto scenario_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const BrokerError& e) {
    if (e.code() == ErrorCode::ScenarioParse) throw;
    bad(field, e.what());
  } catch (const json::exception& e) {
    bad(field, e.what());
  }
}

std::int64_t int_field(const json& obj, const char* key, const std::string& ctx,
                       std::int64_t fallback, std::int64_t minimum) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) bad(ctx + key, "expected an integer");
  auto v = it->get<std::int64_t>();
  if (v < minimum) bad(ctx + key, "must be >= " + std::to_string(minimum));
  return v;
}

std::optional<double> decimal_field(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return scenario_field(ctx + key, [&] { return detail::decimal_value(*it, key); });
}

std::string string_field(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
    bad(ctx + key, "expected a non-empty string");
  }
  return it->get<std::string>();
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    auto s = v.get<std::int64_t>();
    if (s < 0) bad("seed", "must be >= 0");
    return static_cast<std::uint64_t>(s);
  }
  if (v.is_string()) {
    const auto& text = v.get_ref<const std::string&>();
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec == std::errc{} && p == text.data() + text.size() && !text.empty()) return out;
  }
  bad("seed", "expected an unsigned 64-bit integer");
}

ScenarioAction parse_action(const json& a, const std::string& ctx) {
  if (!a.is_object()) bad(ctx, "expected an object");
  const std::string type = string_field(a, "type", ctx);
  if (type == "catalogUpdate") {
    CatalogUpdateAction out;
    out.productId = string_field(a, "productId", ctx);
    auto it = a.find("patch");
    if (it == a.end() || !it->is_object()) bad(ctx + "patch", "expected an object");
    out.patch = scenario_field(ctx + "patch", [&] { return patch_from_json(*it); });
    return out;
  }
  if (type == "injectSamples") {
    InjectSamplesAction out;
    if (a.contains("component")) {
      out.component = string_field(a, "component", ctx);
      scenario_field(ctx + "component", [&] { return ComponentId::parse(*out.component); });
    }
    if (a.contains("metric")) out.metric = string_field(a, "metric", ctx);
    out.count = int_field(a, "count", ctx, 1, 1);
    out.base = decimal_field(a, "base", ctx);
    out.jitterPct = decimal_field(a, "jitterPct", ctx);
    if (out.base && *out.base < 0) bad(ctx + "base", "must be >= 0");
    if (out.jitterPct && (*out.jitterPct < 0 || *out.jitterPct > 100)) {
      bad(ctx + "jitterPct", "must lie in [0, 100]");
    }
    return out;
  }
  if (type == "failDeploy") {
    FailDeployAction out;
    out.productId = string_field(a, "productId", ctx);
    out.count = int_field(a, "count", ctx, 1, 1);
    return out;
  }
  if (type == "replanCommand") {
    return ReplanCommandAction{};
  }
  bad(ctx + "type", "unknown action '" + type + "'");
}

}  // namespace

Scenario parse_scenario(const json& doc, const std::filesystem::path& baseDir) {
  if (!doc.is_object()) bad("scenario", "expected an object");
  Scenario s;
  if (auto it = doc.find("seed"); it != doc.end()) s.seed = parse_seed(*it);
  if (!doc.contains("ticks")) bad("ticks", "missing");
  s.ticks = int_field(doc, "ticks", "", 0, 0);
  s.tickSeconds = int_field(doc, "tickSeconds", "", 60, 1);

  auto tl = doc.find("timeline");
  if (tl != doc.end()) {
    if (!tl->is_array()) bad("timeline", "expected an array");
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < tl->size(); ++i) {
      const json& e = (*tl)[i];
      const std::string ctx = "timeline[" + std::to_string(i) + "].";
      if (!e.is_object()) bad(ctx, "expected an object");
      if (!e.contains("tick")) bad(ctx + "tick", "missing");
      TimelineEntry entry;
      entry.tick = int_field(e, "tick", ctx, 0, 0);
      if (entry.tick < prev) bad(ctx + "tick", "timeline is not sorted by tick");
      prev = entry.tick;
      if (!e.contains("action")) bad(ctx + "action", "missing");
      entry.action = parse_action(e.at("action"), ctx + "action.");
      s.timeline.push_back(std::move(entry));
    }
  }

  if (auto it = doc.find("providers"); it != doc.end()) {
    if (!it->is_object()) bad("providers", "expected an object");
    for (const auto& [pid, o] : it->items()) {
      const std::string ctx = "providers." + pid + ".";
      if (!o.is_object()) bad(ctx, "expected an object");
      ProviderOverride po;
      if (o.contains("deployLatencyTicks")) po.deployLatencyTicks = int_field(o, "deployLatencyTicks", ctx, 0, 0);
      po.base = decimal_field(o, "base", ctx);
      po.jitterPct = decimal_field(o, "jitterPct", ctx);
      s.providers[pid] = po;
    }
  }

  if (auto it = doc.find("inputs"); it != doc.end()) {
    if (!it->is_object()) bad("inputs", "expected an object");
    for (const auto& [role, path] : it->items()) {
      static const std::set<std::string> roles{"manifest", "app", "workload", "policy", "catalog"};
      if (!roles.count(role)) bad("inputs." + role, "unknown input");
      if (!path.is_string()) bad("inputs." + role, "expected a path");
      std::filesystem::path p = path.get<std::string>();
      s.inputs[role] = p.is_absolute() ? p : baseDir / p;
    }
  }
  return s;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BrokerError(ErrorCode::Io, path.string(), "IoError: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::filesystem::path& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) detail::invalid(path.string(), "not valid JSON");
  return doc;
}

}  // namespace

ScenarioBundle load_scenario_bundle(const std::filesystem::path& scenarioFile,
                                    const std::map<std::string, std::filesystem::path>& fallbacks) {
  json doc = json::parse(read_file(scenarioFile), nullptr, false);
  if (doc.is_discarded()) bad(scenarioFile.string(), "not valid JSON");
  ScenarioBundle b;
  b.scenario = parse_scenario(doc, scenarioFile.parent_path());
  auto path_of = [&](const std::string& role) -> std::optional<std::filesystem::path> {
    if (auto it = b.scenario.inputs.find(role); it != b.scenario.inputs.end()) return it->second;
    if (auto it = fallbacks.find(role); it != fallbacks.end()) return it->second;
    return std::nullopt;
  };
  auto required = [&](const std::string& role) {
    auto p = path_of(role);
    if (!p) bad("inputs." + role, "missing");
    return *p;
  };
  b.manifest = parse_manifest(read_file(required("manifest")));
  b.app = application_from_json(read_json(required("app")));
  b.workload = workload_from_json(read_json(required("workload")));
  b.catalog = catalog_from_json(read_json(required("catalog")));
  if (auto p = path_of("policy")) b.policy = policy_from_json(read_json(*p));
  return b;
}

// ---------------------------------------------------------------------------
// Runner

namespace {

struct Runner {
  const Scenario& s;
  const WorkloadProfile& workload;
  Xorshift64Star rng;
  SimClock clock;
  std::map<std::string, std::unique_ptr<SimProvider>> providers;
  Broker broker;
  std::int64_t scheduledFailures = 0;

  Runner(const Scenario& scenario, std::uint64_t seed, const DeploymentManifest& manifest,
         const ApplicationModel& app, const GovernancePolicy& policy,
         const WorkloadProfile& w, const Catalog& catalog)
      : s(scenario),
        workload(w),
        rng(seed),
        clock(scenario.tickSeconds),
        broker(manifest, app, policy, w, catalog) {
    AdapterMap adapters;
    for (const auto* p : catalog.list_products()) {
      ProviderOverride o;
      if (auto it = s.providers.find(p->productId); it != s.providers.end()) {
        o = it->second;
      } else if (auto all = s.providers.find("*"); all != s.providers.end()) {
        o = all->second;
      }
      MetricGenerator gen;
      gen.base = o.base.value_or(p->sla.responseTimeMsP95 * 0.5);
      gen.jitterPct = o.jitterPct.value_or(10.0);
      auto sp = std::make_unique<SimProvider>(p->productId, o.deployLatencyTicks.value_or(0), gen);
      adapters[p->productId] = sp.get();
      providers[p->productId] = std::move(sp);
    }
    broker.set_adapters(std::move(adapters));
  }

  void advance(std::int64_t tick) {
    clock.advance_to(tick);
    for (auto& [_, p] : providers) p->advance_to(tick);
  }

  void apply(const TimelineEntry& e) {
    const SimInstant now = clock.now();
    const std::string where = "timeline@" + std::to_string(e.tick);
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, CatalogUpdateAction>) {
            scenario_field(where, [&] {
              broker.apply_catalog_update(a.productId, a.patch, now);
              return 0;
            });
          } else if constexpr (std::is_same_v<T, InjectSamplesAction>) {
            MetricSamples batch;
            for (const auto& asg : broker.plan().assignments) {
              const std::string key = asg.component.key();
              if (a.component && *a.component != key) continue;
              MetricGenerator gen = providers.at(asg.productId)->generator();
              gen.metric = a.metric;
              if (a.base) gen.base = *a.base;
              if (a.jitterPct) gen.jitterPct = *a.jitterPct;
              for (std::int64_t i = 0; i < a.count; ++i) {
                batch.samples.push_back({asg.productId, key, a.metric, gen.sample(rng), now});
              }
            }
            if (!batch.samples.empty()) broker.step({std::move(batch), now, 0});
          } else if constexpr (std::is_same_v<T, FailDeployAction>) {
            providers.at(a.productId)->fail_next_deploys(a.count);
            scheduledFailures += a.count;
          } else {
            broker.step({ReplanRequested{}, now, 0});
          }
        },
        e.action);
  }

  // Next tick with something to do after the timeline ended, if any.
  std::optional<std::int64_t> next_settle_tick() const {
    std::optional<std::int64_t> next;
    auto take = [&](std::int64_t t) {
      t = std::max(t, clock.current_tick() + 1);
      next = std::min(next.value_or(t), t);
    };
    if (auto due = broker.reconcile_due()) {
      take((*due + s.tickSeconds - 1) / s.tickSeconds);
    }
    for (const auto& [_, p] : providers) {
      if (auto t = p->settles_at()) take(*t);
    }
    return next;
  }
};

void check_references(const Scenario& s, const ApplicationModel& app, const Catalog& catalog) {
  for (std::size_t i = 0; i < s.timeline.size(); ++i) {
    const std::string ctx = "timeline[" + std::to_string(i) + "].action.";
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, CatalogUpdateAction> ||
                        std::is_same_v<T, FailDeployAction>) {
            if (!catalog.find(a.productId)) bad(ctx + "productId", "unknown product " + a.productId);
          } else if constexpr (std::is_same_v<T, InjectSamplesAction>) {
            if (a.component && !app.find(ComponentId::parse(*a.component))) {
              bad(ctx + "component", "unknown component " + *a.component);
            }
          }
        },
        s.timeline[i].action);
  }
  for (const auto& [pid, _] : s.providers) {
    if (pid != "*" && !catalog.find(pid)) bad("providers." + pid, "unknown product");
  }
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario, const DeploymentManifest& manifest,
                            const ApplicationModel& app, const GovernancePolicy& policy,
                            const WorkloadProfile& workload, const Catalog& initialCatalog,
                            const RunOverrides& overrides) {
  const std::int64_t ticks = overrides.ticks.value_or(scenario.ticks);
  if (ticks < 0) bad("ticks", "must be >= 0");
  check_references(scenario, app, initialCatalog);

  Runner r(scenario, overrides.seed.value_or(scenario.seed), manifest, app, policy, workload,
           initialCatalog);
  try {
    r.broker.initialize(r.clock.now());
  } catch (const NoFeasibleProduct& e) {
    throw BrokerError(ErrorCode::InitialPlanInfeasible, e.component(),
                      std::string("InitialPlanInfeasible: ") + e.what());
  }

  std::size_t next = 0;
  for (std::int64_t t = 0; t <= ticks; ++t) {
    if (t > 0) r.advance(t);
    while (next < scenario.timeline.size() && scenario.timeline[next].tick == t) {
      r.apply(scenario.timeline[next++]);
    }
    r.broker.on_tick(r.clock.now());
  }

  // Settle: let pending reconciliations fire and in-flight moves land.
  constexpr int kMaxSettleSteps = 100000;
  for (int i = 0; i < kMaxSettleSteps; ++i) {
    auto t = r.next_settle_tick();
    if (!t) break;
    r.advance(*t);
    r.broker.on_tick(r.clock.now());
    if (i + 1 == kMaxSettleSteps) {
      detail::invalid("scenario", "did not settle after the timeline ended");
    }
  }

  ScenarioResult out;
  out.log = r.broker.log();
  out.finalPlan = r.broker.plan();
  out.finalCatalog = r.broker.catalog();
  out.redeployments = r.broker.redeployments();
  out.failuresScheduled = r.scheduledFailures;
  out.endTick = r.clock.current_tick();
  for (const auto& [pid, p] : r.providers) {
    out.providers[pid] = {p->deployed(), p->injected_failures(), p->pending_failures()};
    out.injectedFailures += p->injected_failures();
  }
  out.monthlyCost = plan_monthly_cost(out.finalPlan, out.finalCatalog, workload);
  return out;
}

ScenarioResult run_scenario(const ScenarioBundle& b, const RunOverrides& overrides) {
  return run_scenario(b.scenario, b.manifest, b.app, b.policy, b.workload, b.catalog, overrides);
}

}  // namespace cloudbroker
