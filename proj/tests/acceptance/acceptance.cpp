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

// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "test_support.hpp"

using namespace cloudbroker;
using cbtest::fixture;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Shared tallies for the feasibility auditor.
struct Audit {
  std::size_t runs = 0;
  std::size_t plans = 0;
  std::size_t assignments = 0;
  std::vector<std::string> violations;

  void add_log(const std::string& what, const std::vector<LogRecord>& log, const Catalog& initial,
               const ApplicationModel& app) {
    auto r = cbtest::audit_feasibility(log, initial, app);
    ++runs;
    plans += r.plansChecked;
    assignments += r.assignmentsChecked;
    for (auto& v : r.violations) violations.push_back(what + ": " + v);
  }
  void add_plan(const std::string& what, const DeploymentPlan& plan, const Catalog& cat,
                const ApplicationModel& app) {
    ++runs;
    ++plans;
    for (const auto& a : plan.assignments) {
      ++assignments;
      const auto* p = cat.find(a.productId);
      const auto* c = app.find(a.component);
      bool ok = p && c && p->active();
      if (ok) {
        for (const auto& t : c->requiredTech) ok = ok && p->techTags.count(t) > 0;
      }
      if (!ok) violations.push_back(what + ": " + a.component.key() + " -> " + a.productId);
    }
  }
};

Audit g_audit;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2f", v);
  return b;
}

// ---------------------------------------------------------------------------

Verdict figure3() {
  const PrivateCloud db{"http://149.156.97.139:9090", CloudType::Paas, "OpenStackImagingService"};
  const PrivateCloud sec{"http://149.156.97.139:8080", CloudType::Paas, "OpenStackImagingService"};
  using K = ComponentKind;
  const std::vector<std::pair<ComponentSelector, DeploymentOption>> expected{
      {{K::DataSource, {"prodDb"}, "production"}, db},
      {{K::DomainClasses, {}, std::nullopt}, Economy{}},
      {{K::Controllers, {"Login", "Logout", "Pet"}, std::nullopt}, BestEffort{}},
      {{K::Controllers, {}, std::nullopt}, Economy{}},
      {{K::Views, {}, std::nullopt}, Economy{}},
      {{K::Services, {"springSecurityService"}, std::nullopt}, sec},
  };
  auto m = parse_manifest(cbtest::read_text(fixture("petclinic/manifest.broker")));
  Verdict v;
  if (m.lifecycle != Lifecycle::Active) return {false, "lifecycle is not active"};
  if (m.bindings.size() != expected.size()) {
    return {false, std::to_string(m.bindings.size()) + " bindings, expected " + std::to_string(expected.size())};
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (!(m.bindings[i].selector == expected[i].first) || !(m.bindings[i].option == expected[i].second)) {
      return {false, "binding " + std::to_string(i) + " differs"};
    }
  }
  auto text = serialize_manifest(m);
  auto again = parse_manifest(text);
  if (!(again == m)) return {false, "round trip changed the manifest"};
  if (serialize_manifest(again) != text) return {false, "serialization is not a fixed point"};
  v.detail = std::to_string(m.bindings.size()) + " bindings as listed, lifecycle active, round trip stable";
  return v;
}

Verdict price_rise() {
  auto b = load_scenario_bundle(fixture("scenarios/petclinic-price-rise.json"));
  std::string first;
  ScenarioResult r;
  for (int run = 0; run < 3; ++run) {
    r = run_scenario(b);
    auto text = render_log(r.log);
    if (run == 0) first = text;
    else if (text != first) return {false, "log of run " + std::to_string(run + 1) + " differs"};
  }
  g_audit.add_log("price-rise", r.log, b.catalog, b.app);

  const auto resolution = resolve_bindings(b.manifest, b.app);
  const nlohmann::json* rev1 = nullptr;
  const nlohmann::json* rev2 = nullptr;
  bool priceChanged = false;
  for (const auto& rec : r.log) {
    if (rec.kind == "event" && rec.payload["type"] == "PriceChanged" && !rev2) priceChanged = true;
    if (rec.kind == "plan") {
      auto rev = rec.payload["plan"]["revision"].get<int>();
      if (rev == 1) rev1 = &rec.payload;
      if (rev == 2) rev2 = &rec.payload;
    }
  }
  if (!rev1 || !rev2) return {false, "plan revisions 1 and 2 not both present"};
  if (!priceChanged) return {false, "no PriceChanged event before revision 2"};
  auto product_of = [](const nlohmann::json& plan, const std::string& comp) {
    for (const auto& a : plan["plan"]["assignments"])
      if (a["componentName"] == comp) return a["productId"].get<std::string>();
    return std::string();
  };
  auto endpoint_of = [&](const std::string& pid) {
    const auto* p = b.catalog.find(pid);
    return p && p->endpoint ? *p->endpoint : std::string();
  };
  if (endpoint_of(product_of(*rev1, "dataSource/prodDb")) != "http://149.156.97.139:9090" ||
      endpoint_of(product_of(*rev1, "services/springSecurityService")) != "http://149.156.97.139:8080") {
    return {false, "revision 1 does not pin the private components"};
  }
  std::size_t moves = 0;
  for (const auto& m : (*rev2)["diff"]["moves"]) {
    auto id = ComponentId::parse(m["componentName"].get<std::string>());
    if (!std::holds_alternative<Economy>(resolution.at(id))) {
      return {false, "revision 2 moves non-economy component " + id.key()};
    }
    ++moves;
  }
  if (moves == 0) return {false, "revision 2 moves nothing"};
  return {true, "rev 1 pinned, PriceChanged, rev 2 moves " + std::to_string(moves) +
                    " economy components only, 3 identical logs"};
}

// Independent scores for threshold checks.
struct OracleScores {
  long double reliability, security, perf;
};

OracleScores oracle_scores(const CloudProduct& p, const std::vector<QosReport>& reports, double ref) {
  long double num = 0, den = 0;
  for (const auto& r : reports) {
    if (r.productId == p.productId && r.metric == "responseTimeMs") {
      num += static_cast<long double>(r.trustWeight) * r.value;
      den += r.trustWeight;
    }
  }
  long double perf = 1;
  if (den > 0) perf = std::clamp(static_cast<long double>(ref) / (num / den), 0.0L, 1.0L);
  static const std::set<std::string> recognized{"daily-backup", "encrypted-at-rest", "encrypted-in-transit",
                                                "multi-region-replication"};
  long double hits = 0;
  for (const auto& a : p.sla.securityAttrs) hits += recognized.count(a);
  return {std::clamp(static_cast<long double>(p.sla.availabilityPct) - 99.0L, 0.0L, 1.0L), hits / 4, perf};
}

struct RandomWorld {
  Catalog catalog;
  ApplicationModel app;
  WorkloadProfile workload;
  std::vector<QosReport> reports;
};

RandomWorld random_world(std::mt19937_64& rng, std::size_t components) {
  static const std::vector<std::string> tags{"jvm", "python", "mysql", "dotnet"};
  RandomWorld w;
  w.catalog.set_fx_rate("USD", std::uniform_real_distribution<double>(0.5, 1.5)(rng));
  w.catalog.set_fx_rate("GBP", std::uniform_real_distribution<double>(0.8, 1.6)(rng));
  const int n = std::uniform_int_distribution<int>(1, 50)(rng);
  for (int i = 0; i < n; ++i) {
    w.catalog.register_product(cbtest::random_product(rng, "p" + std::to_string(i), tags, {"EUR", "USD", "GBP"}));
    if (rng() % 2) {
      const int k = std::uniform_int_distribution<int>(1, 4)(rng);
      for (int j = 0; j < k; ++j) {
        QosReport r{"p" + std::to_string(i), "eu", "responseTimeMs",
                    std::uniform_real_distribution<double>(10, 300)(rng), "probe",
                    std::uniform_real_distribution<double>(0.1, 1.0)(rng), 0};
        w.catalog.ingest_qos_report(r);
        w.reports.push_back(r);
      }
    }
  }
  w.app.appId = "rand";
  for (std::size_t c = 0; c < components; ++c) {
    Component comp{"c" + std::to_string(c), ComponentKind::Views, {tags[rng() % tags.size()]}, std::nullopt};
    if (rng() % 3 == 0) comp.requiredTech.insert(tags[rng() % tags.size()]);
    w.app.components.push_back(comp);
  }
  w.workload = cbtest::random_workload(rng);
  return w;
}

DeploymentManifest all_views(DeploymentOption option) {
  DeploymentManifest m;
  m.lifecycle = Lifecycle::Active;
  m.bindings.push_back({{ComponentKind::Views, {}, std::nullopt}, std::move(option), 1});
  return m;
}

Verdict economy_oracle() {
  std::mt19937_64 rng(20120601);
  std::size_t checked = 0, infeasible = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    auto w = random_world(rng, 1 + rng() % 6);
    GovernancePolicy pol;
    auto& t = pol.minQos[OptionCategory::Economy];
    t.minReliability = std::vector<double>{0, 0, 0.5, 0.9}[rng() % 4];
    t.minSecurity = std::vector<double>{0, 0, 0.25, 0.5}[rng() % 4];
    t.minPerf = std::vector<double>{0, 0, 0.3, 0.6}[rng() % 4];
    auto manifest = all_views(Economy{});
    DecisionInputs in{manifest, w.app, pol, w.workload};

    // brute force per component
    std::vector<std::string> want;
    std::string firstInfeasible;
    for (const auto& c : w.app.components) {
      const CloudProduct* best = nullptr;
      double bestCost = 0;
      long double bestPerf = 0;
      for (const auto* p : w.catalog.list_products()) {
        if (!cbtest::oracle_feasible(c, Economy{}, *p)) continue;
        auto s = oracle_scores(*p, w.reports, w.catalog.ref_latency_ms());
        if (s.reliability < t.minReliability || s.security < t.minSecurity || s.perf < t.minPerf) continue;
        double cost = estimate_monthly_cost(p->pricing, w.workload, w.catalog.fx());
        bool better = !best || cost < bestCost || (cost == bestCost && s.perf > bestPerf) ||
                      (cost == bestCost && s.perf == bestPerf && p->productId < best->productId);
        if (better) {
          best = p;
          bestCost = cost;
          bestPerf = s.perf;
        }
      }
      if (!best && firstInfeasible.empty()) firstInfeasible = c.id().key();
      want.push_back(best ? best->productId : "");
    }
    if (!firstInfeasible.empty()) {
      try {
        decide(in, w.catalog);
        return {false, "instance " + std::to_string(inst) + ": decided although " + firstInfeasible + " has no product"};
      } catch (const NoFeasibleProduct& e) {
        if (e.component() != firstInfeasible) {
          return {false, "instance " + std::to_string(inst) + ": infeasibility reported for " + e.component()};
        }
      }
      ++infeasible;
      continue;
    }
    auto plan = decide(in, w.catalog);
    g_audit.add_plan("economy#" + std::to_string(inst), plan, w.catalog, w.app);
    for (std::size_t i = 0; i < want.size(); ++i) {
      ++checked;
      if (plan.assignments[i].productId != want[i]) {
        return {false, "instance " + std::to_string(inst) + " " + plan.assignments[i].component.key() + ": got " +
                           plan.assignments[i].productId + ", brute force " + want[i]};
      }
    }
  }
  return {true, "1000 catalogs, " + std::to_string(checked) + " assignments equal the brute-force argmin, " +
                    std::to_string(infeasible) + " infeasible instances reported correctly"};
}

Verdict best_effort_props() {
  std::mt19937_64 rng(4242);
  int headMatches = 0, invariant = 0, attempts = 0;
  while (headMatches < 100 && attempts < 1000) {
    ++attempts;
    auto w = random_world(rng, 1);
    GovernancePolicy pol;
    pol.wCost = 1.0;
    pol.wPerf = 0.0;
    pol.excludeUnmeasuredFromBestEffort = false;
    auto be = all_views(BestEffort{});
    auto eco = all_views(Economy{});
    DeploymentPlan a, b;
    try {
      a = decide({be, w.app, pol, w.workload}, w.catalog);
      b = decide({eco, w.app, pol, w.workload}, w.catalog);
    } catch (const NoFeasibleProduct&) {
      continue;  // no candidate set; draw again
    }
    g_audit.add_plan("bestEffort", a, w.catalog, w.app);
    const double ca = estimate_monthly_cost(w.catalog.get(a.assignments[0].productId).pricing, w.workload, w.catalog.fx());
    const double cb = estimate_monthly_cost(w.catalog.get(b.assignments[0].productId).pricing, w.workload, w.catalog.fx());
    if (ca != cb) {
      return {false, "wCost=1 head " + a.assignments[0].productId + " costs " + format_decimal(ca) +
                         ", economy head " + b.assignments[0].productId + " costs " + format_decimal(cb)};
    }
    ++headMatches;
  }
  if (headMatches < 100) return {false, "only " + std::to_string(headMatches) + " feasible instances drawn"};

  for (int inst = 0; inst < 100; ++inst) {
    std::vector<NormalizedOffer> offers;
    const int n = std::uniform_int_distribution<int>(1, 50)(rng);
    for (int i = 0; i < n; ++i) {
      NormalizedOffer o;
      o.productId = "p" + std::to_string(i);
      o.monthlyCost = std::uniform_real_distribution<double>(1, 500)(rng);
      o.perfScore = std::uniform_real_distribution<double>(0, 1)(rng);
      o.measured = true;
      offers.push_back(o);
    }
    GovernancePolicy pol;
    pol.wCost = std::uniform_real_distribution<double>(0, 1)(rng);
    pol.wPerf = 1.0 - pol.wCost;
    const double k = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    auto scaled = offers;
    for (auto& o : scaled) o.monthlyCost *= k;
    auto h1 = rank_best_effort(offers, pol).front().offer.productId;
    auto h2 = rank_best_effort(scaled, pol).front().offer.productId;
    if (h1 != h2) return {false, "scaling costs by " + format_decimal(k) + " moved the head from " + h1 + " to " + h2};
    ++invariant;
  }
  return {true, std::to_string(headMatches) + " wCost=1 heads match economy, " + std::to_string(invariant) +
                    " scalings keep the head"};
}

Verdict no_flap() {
  auto b = load_scenario_bundle(fixture("scenarios/noflap-oscillating.json"));
  const auto& s = b.scenario;
  if (b.policy.hysteresisWindow != 10 * s.tickSeconds) return {false, "hysteresis is not 10 ticks"};
  auto r = run_scenario(b);
  g_audit.add_log("noflap", r.log, b.catalog, b.app);
  std::vector<std::int64_t> changeTicks;
  for (const auto& rec : r.log) {
    if (rec.kind == "enforce" && rec.payload["rolledBack"] == false && rec.payload["planRevision"] != 1) {
      changeTicks.push_back(rec.ts / s.tickSeconds);
    }
  }
  for (std::int64_t start = 0; start <= s.ticks; ++start) {
    int inWindow = 0;
    for (auto t : changeTicks) inWindow += (t >= start && t < start + 10);
    if (inWindow > 1) return {false, std::to_string(inWindow) + " redeployments in ticks [" + std::to_string(start) + "," + std::to_string(start + 10) + ")"};
  }
  std::set<std::int64_t> changed(changeTicks.begin(), changeTicks.end());
  std::int64_t quiet = 0;
  for (std::int64_t t = 1; t <= s.ticks; ++t) quiet += !changed.count(t);
  if (quiet < 90) return {false, "only " + std::to_string(quiet) + " quiet ticks"};
  return {true, std::to_string(changeTicks.size()) + " redeployments, " + std::to_string(quiet) + "/" +
                    std::to_string(s.ticks) + " ticks without a plan change"};
}

Verdict rollback_totality() {
  std::mt19937_64 rng(77);
  int rolledBack = 0, runs = 0;
  while (runs < 100) {
    auto w = random_world(rng, 2 + rng() % 8);
    GovernancePolicy pol;
    pol.hysteresisWindow = 1'000'000'000;  // only the explicit re-plan moves anything
    auto manifest = all_views(Economy{});
    DeploymentPlan initial;
    try {
      initial = decide({manifest, w.app, pol, w.workload}, w.catalog);
    } catch (const NoFeasibleProduct&) {
      continue;
    }
    Catalog initialCatalog = w.catalog;
    Broker broker(manifest, w.app, pol, w.workload, w.catalog);
    std::map<std::string, std::unique_ptr<SimProvider>> providers;
    AdapterMap adapters;
    for (const auto* p : w.catalog.list_products()) {
      auto sp = std::make_unique<SimProvider>(p->productId, rng() % 4, MetricGenerator{});
      adapters[p->productId] = sp.get();
      providers[p->productId] = std::move(sp);
    }
    broker.set_adapters(adapters);
    broker.initialize(0);
    for (auto& [_, p] : providers) p->advance_to(10);

    // reprice until a fresh decision differs from the active plan
    DeploymentPlan fresh;
    bool differs = false;
    for (int tries = 0; tries < 20 && !differs; ++tries) {
      const auto* victim = broker.plan().assignments[rng() % broker.plan().assignments.size()].productId.c_str();
      ProductPatch patch;
      patch.pricing = broker.catalog().get(victim).pricing;
      patch.pricing->fixedFeePerMonth += 1000;
      broker.apply_catalog_update(victim, *patch.pricing == broker.catalog().get(victim).pricing ? ProductPatch{} : patch, 600);
      try {
        fresh = decide(broker.inputs(), broker.catalog());
      } catch (const NoFeasibleProduct&) {
        break;
      }
      differs = !same_assignments(fresh, broker.plan());
    }
    if (!differs) continue;
    ++runs;

    // fail a random move target
    auto d = diff(broker.plan(), fresh);
    std::vector<std::string> targets;
    for (const auto& m : d.moves) targets.push_back(m.toProductId);
    const std::string failing = targets[rng() % targets.size()];
    providers.at(failing)->fail_next_deploys(1);

    const auto planBefore = to_json(broker.plan());
    std::map<std::string, std::set<std::string>> deployedBefore;
    for (const auto& [id, p] : providers) deployedBefore[id] = p->deployed();

    auto log = broker.step({ReplanRequested{}, 1200, 0});
    bool sawRollback = false;
    for (const auto& rec : log) {
      if (rec.kind == "enforce" && rec.payload["rolledBack"] == true) sawRollback = true;
    }
    if (!sawRollback) return {false, "run " + std::to_string(runs) + ": injected failure did not roll back"};
    ++rolledBack;
    if (to_json(broker.plan()) != planBefore) return {false, "run " + std::to_string(runs) + ": active plan changed"};
    for (auto& [_, p] : providers) p->advance_to(100);
    for (const auto& [id, p] : providers) {
      if (p->deployed() != deployedBefore[id] || p->in_flight()) {
        return {false, "run " + std::to_string(runs) + ": provider " + id + " differs from its snapshot"};
      }
    }
    g_audit.add_log("rollback#" + std::to_string(runs), broker.log(), initialCatalog, w.app);
  }
  return {true, std::to_string(rolledBack) + "/100 fault-injected runs rolled back to the snapshot"};
}

Verdict quiescence() {
  std::size_t n = 0;
  for (const auto& path : cbtest::bundled_scenarios()) {
    auto b = load_scenario_bundle(path);
    auto r = run_scenario(b);
    g_audit.add_log(path.filename().string(), r.log, b.catalog, b.app);
    auto fresh = decide({b.manifest, b.app, b.policy, b.workload}, r.finalCatalog);
    if (!same_assignments(fresh, r.finalPlan)) {
      return {false, path.filename().string() + ": active plan differs from a fresh decision"};
    }
    ++n;
  }
  if (n == 0) return {false, "no bundled scenarios"};
  return {true, std::to_string(n) + " bundled scenarios end on a fresh decision"};
}

Verdict cost_arithmetic() {
  std::mt19937_64 rng(9);
  long double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    auto p = cbtest::random_product(rng, "p", {"jvm"}, {"EUR", "USD", "GBP"});
    auto wl = cbtest::random_workload(rng);
    FxTable fx{{"EUR", 1.0},
               {"USD", std::uniform_real_distribution<double>(0.1, 10)(rng)},
               {"GBP", std::uniform_real_distribution<double>(0.1, 10)(rng)}};
    long double want = cbtest::cost_oracle(p.pricing, wl, fx);
    long double got = estimate_monthly_cost(p.pricing, wl, fx);
    long double rel = want == 0 ? std::fabs(got) : std::fabs(got - want) / std::fabs(want);
    worst = std::max(worst, rel);
    if (rel > 1e-9L) return {false, "triple " + std::to_string(i) + ": relative error " + std::to_string((double)rel)};

    WorkloadProfile zero;
    WorkloadProfile zeros{{{"cpu", 0.0}, {"memory", 0.0}, {"storage", 0.0}, {"network", 0.0}, {"database", 0.0}}};
    const double fee = fx.at(p.pricing.currency) * p.pricing.fixedFeePerMonth;
    if (estimate_monthly_cost(p.pricing, zero, fx) != fee || estimate_monthly_cost(p.pricing, zeros, fx) != fee) {
      return {false, "zero usage does not return the converted fixed fee"};
    }
  }
  char b[64];
  std::snprintf(b, sizeof b, "%.3Le", worst);
  return {true, std::string("10000 triples, worst relative error ") + b + ", zero usage exact"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds, 0 for none
    std::function<Verdict()> run;
  };
  // 5 reads the tallies the others leave behind, so it runs last.
  std::vector<Criterion> all{
      {1, "figure 3 manifest", 1.0, figure3},
      {2, "price-rise scenario", 5.0, price_rise},
      {3, "economy optimality", 60.0, economy_oracle},
      {4, "bestEffort properties", 0, best_effort_props},
      {6, "no-flap", 0, no_flap},
      {7, "rollback totality", 0, rollback_totality},
      {8, "quiescent consistency", 0, quiescence},
      {9, "cost arithmetic", 0, cost_arithmetic},
      {5, "feasibility soundness", 0,
       [] {
         if (g_audit.assignments == 0) return Verdict{false, "nothing audited"};
         if (!g_audit.violations.empty()) {
           return Verdict{false, std::to_string(g_audit.violations.size()) + " violations, first: " +
                                     g_audit.violations.front()};
         }
         return Verdict{true, std::to_string(g_audit.runs) + " runs, " + std::to_string(g_audit.plans) + " plans, " +
                                  std::to_string(g_audit.assignments) + " assignments, 0 violations"};
       }},
  };
  std::map<int, std::string> lines;
  bool ok = true;
  for (auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (c.limit > 0 && secs >= c.limit) {
      v.pass = false;
      v.detail += "; took " + fmt(secs) + " s, limit " + fmt(c.limit) + " s";
    }
    ok = ok && v.pass;
    std::ostringstream line;
    line << "criterion " << c.id << " (" << c.name << "): " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
         << " [" << fmt(secs) << " s]";
    lines[c.id] = line.str();
  }
  for (const auto& [_, l] : lines) std::cout << l << "\n";
  return ok ? 0 : 1;
}
