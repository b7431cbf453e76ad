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

#include <cmath>
#include <random>

#include "doctest.h"
#include "test_support.hpp"

using namespace cloudbroker;
using doctest::Approx;

namespace {

CloudProduct product(std::string id, double fee = 10.0) {
  CloudProduct p;
  p.productId = std::move(id);
  p.providerId = "prov";
  p.serviceTypes = {ServiceType::Compute};
  p.regions = {"eu"};
  p.techTags = {"jvm"};
  p.pricing.fixedFeePerMonth = fee;
  return p;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const BrokerError& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Io;
}

QosReport latency(const std::string& id, double v, double trust = 1.0) {
  return {id, "eu", std::string(kLatencyMetric), v, "probe", trust, 0};
}

}  // namespace

TEST_CASE("prices convert to canonical units at registration") {
  Catalog cat;
  auto p = product("p");
  p.pricing.rates = {{"memory", "gb-hour", 0.001},
                     {"storage", "gib-month", 0.1},
                     {"network", "gib-transfer", 0.05},
                     {"database", "requests", 0.00002},
                     {"cpu", "cpu-hour", 0.02}};
  cat.register_product(p);
  const auto& rates = cat.get("p").pricing.rates;
  REQUIRE(rates.size() == 5);
  CHECK(rates[0].unit == "gb-month");
  CHECK(rates[0].pricePerUnit == Approx(0.73));
  CHECK(rates[1].unit == "gb-month");
  CHECK(rates[1].pricePerUnit == Approx(0.1 / 1.073741824));
  CHECK(rates[2].unit == "gb-transfer");
  CHECK(rates[2].pricePerUnit == Approx(0.05 / 1.073741824));
  CHECK(rates[3].unit == "k-requests");
  CHECK(rates[3].pricePerUnit == Approx(0.02));
  CHECK(rates[4].pricePerUnit == 0.02);

  auto bad = product("q");
  bad.pricing.rates = {{"memory", "furlongs", 1.0}};
  CHECK(code_of([&] { cat.register_product(bad); }) == ErrorCode::Validation);
  bad.pricing.rates = {{"bandwidth", "gb-transfer", 1.0}};
  CHECK(code_of([&] { cat.register_product(bad); }) == ErrorCode::Validation);
  CHECK(cat.size() == 1);
}

TEST_CASE("monthly cost estimate") {
  PricingPlan plan{"EUR", 10.0, {{"storage", "gb-month", 0.5}, {"cpu", "cpu-hour", 0.0}}};
  WorkloadProfile w{{{"storage", 10.0}, {"cpu", 730.0}}};
  FxTable fx{{"EUR", 1.0}, {"USD", 0.9}};
  CHECK(estimate_monthly_cost(plan, w, fx) == 15.0);
  plan.currency = "USD";
  CHECK(estimate_monthly_cost(plan, w, fx) == Approx(13.5));
  // an unpriced metric is free
  w.usage["network"] = 100.0;
  CHECK(estimate_monthly_cost(plan, w, fx) == Approx(13.5));
  plan.currency = "GBP";
  CHECK(code_of([&] { estimate_monthly_cost(plan, w, fx); }) == ErrorCode::MissingFxRate);
}

TEST_CASE("random cost estimates agree with the long-double oracle") {
  std::mt19937_64 rng(7);
  FxTable fx{{"EUR", 1.0}, {"USD", 0.9}, {"GBP", 1.17}};
  for (int i = 0; i < 2000; ++i) {
    auto p = cbtest::random_product(rng, "p", {"jvm"}, {"EUR", "USD", "GBP"});
    auto w = cbtest::random_workload(rng);
    long double want = cbtest::cost_oracle(p.pricing, w, fx);
    double got = estimate_monthly_cost(p.pricing, w, fx);
    REQUIRE(std::fabs(static_cast<long double>(got) - want) <= 1e-9L * std::max(1.0L, std::fabs(want)));
  }
}

TEST_CASE("normalized scores") {
  auto p = product("p");
  p.sla.availabilityPct = 99.5;
  p.sla.securityAttrs = {"daily-backup", "encrypted-at-rest", "made-up"};
  FxTable fx{{"EUR", 1.0}};
  auto o = normalize_offer(p, {}, fx, std::nullopt, 50.0);
  CHECK(o.monthlyCost == 10.0);
  CHECK(o.reliabilityScore == Approx(0.5));
  CHECK(o.securityScore == 0.5);
  CHECK(o.perfScore == 1.0);
  CHECK_FALSE(o.measured);
  o = normalize_offer(p, {}, fx, 100.0, 50.0);
  CHECK(o.perfScore == 0.5);
  CHECK(o.measured);
  CHECK(normalize_offer(p, {}, fx, 25.0, 50.0).perfScore == 1.0);
  p.sla.availabilityPct = 98.0;
  CHECK(normalize_offer(p, {}, fx, std::nullopt, 50.0).reliabilityScore == 0.0);
  p.sla.availabilityPct = 100.0;
  CHECK(normalize_offer(p, {}, fx, std::nullopt, 50.0).reliabilityScore == 1.0);
}

TEST_CASE("duplicate registration leaves the catalog unchanged") {
  Catalog cat;
  CHECK(cat.register_product(product("a")) == 1);
  auto before = to_json(cat);
  CHECK(code_of([&] { cat.register_product(product("a", 99.0)); }) == ErrorCode::DuplicateProduct);
  CHECK(to_json(cat) == before);
  CHECK(cat.revision() == 1);
  CHECK(cat.register_product(product("b")) == 2);
}

TEST_CASE("product validation") {
  Catalog cat;
  auto p = product("p");
  p.pricing.currency = "euro";
  CHECK(code_of([&] { cat.register_product(p); }) == ErrorCode::Validation);
  p = product("p");
  p.pricing.fixedFeePerMonth = -1;
  CHECK(code_of([&] { cat.register_product(p); }) == ErrorCode::Validation);
  p = product("p");
  p.sla.availabilityPct = 100.5;
  CHECK(code_of([&] { cat.register_product(p); }) == ErrorCode::Validation);
  p = product("p");
  p.sla.responseTimeMsP95 = 0;
  CHECK(code_of([&] { cat.register_product(p); }) == ErrorCode::Validation);
  p = product("p");
  p.endpoint = "localhost";
  CHECK(code_of([&] { cat.register_product(p); }) == ErrorCode::Validation);
  p = product("");
  CHECK(code_of([&] { cat.register_product(p); }) == ErrorCode::Validation);
  CHECK(cat.size() == 0);
}

TEST_CASE("patches emit one event per changed fact") {
  Catalog cat;
  auto p = product("p");
  p.pricing.rates = {{"cpu", "cpu-hour", 0.02}};
  cat.register_product(p);
  std::vector<CatalogChanged> seen;
  cat.subscribe([&](const CatalogChanged& c) { seen.push_back(c); });

  ProductPatch patch;
  patch.pricing = PricingPlan{"EUR", 10.0, {{"cpu", "cpu-hour", 0.03}, {"storage", "gb-month", 0.1}}};
  auto ev = cat.update_product("p", patch);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == EventPayload{PriceChanged{"p", "cpu", 0.02, 0.03}});
  CHECK(ev[1] == EventPayload{PriceChanged{"p", "storage", 0.0, 0.1}});
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].revision == 2);
  CHECK_FALSE(seen[0].registered);

  // identical patch: nothing happens
  CHECK(cat.update_product("p", patch).empty());
  CHECK(cat.revision() == 2);
  CHECK(seen.size() == 1);

  ProductPatch sla;
  sla.sla = SlaTerms{99.9, 80.0, {"daily-backup"}};
  ev = cat.update_product("p", sla);
  REQUIRE(ev.size() == 3);
  CHECK(ev[0] == EventPayload{SlaChanged{"p", "availabilityPct", "99", "99.9"}});
  CHECK(ev[1] == EventPayload{SlaChanged{"p", "responseTimeMsP95", "100", "80"}});
  CHECK(ev[2] == EventPayload{SlaChanged{"p", "securityAttrs", "", "daily-backup"}});

  ProductPatch tags;
  tags.techTags = std::set<std::string>{"python"};
  ev = cat.update_product("p", tags);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0] == EventPayload{TechnologyChanged{"p", {"python"}, {"jvm"}}});

  ProductPatch wd;
  wd.status = ProductStatus::Withdrawn;
  CHECK(cat.update_product("p", wd) == std::vector<EventPayload>{ProductWithdrawn{"p"}});
  CHECK(cat.candidates().empty());
  CHECK(cat.list_products().size() == 1);
  CHECK(cat.revision() == 5);
}

TEST_CASE("rejected patches change nothing") {
  Catalog cat;
  cat.register_product(product("p"));
  auto before = to_json(cat);
  ProductPatch cur;
  cur.pricing = PricingPlan{"USD", 10.0, {}};
  CHECK(code_of([&] { cat.update_product("p", cur); }) == ErrorCode::Validation);
  ProductPatch neg;
  neg.pricing = PricingPlan{"EUR", -3.0, {}};
  CHECK(code_of([&] { cat.update_product("p", neg); }) == ErrorCode::Validation);
  CHECK(code_of([&] { cat.update_product("ghost", neg); }) == ErrorCode::UnknownProduct);
  CHECK(to_json(cat) == before);

  ProductPatch wd;
  wd.status = ProductStatus::Withdrawn;
  cat.update_product("p", wd);
  ProductPatch back;
  back.status = ProductStatus::Active;
  CHECK(code_of([&] { cat.update_product("p", back); }) == ErrorCode::Validation);
  CHECK_FALSE(cat.get("p").active());
  CHECK(code_of([] { patch_from_json({{"productId", "x"}}); }) == ErrorCode::Validation);
}

TEST_CASE("qos aggregation is trust weighted") {
  Catalog cat;
  cat.register_product(product("p"));
  cat.ingest_qos_report(latency("p", 50.0, 1.0));
  auto agg = cat.ingest_qos_report(latency("p", 100.0, 0.5));
  CHECK(agg.mean == Approx(200.0 / 3.0));
  CHECK(agg.min == 50.0);
  CHECK(agg.max == 100.0);
  CHECK(agg.count == 2);
  CHECK(cat.normalize_offer(cat.get("p"), {}).perfScore == Approx(0.75));
  CHECK_FALSE(cat.qos_aggregate("p", "availability"));
  CHECK(code_of([&] { cat.ingest_qos_report(latency("ghost", 1.0)); }) == ErrorCode::UnknownProduct);
  CHECK(code_of([&] { cat.ingest_qos_report(latency("p", 1.0, 0.0)); }) == ErrorCode::Validation);
  CHECK(code_of([&] { cat.ingest_qos_report(latency("p", 1.0, 1.5)); }) == ErrorCode::Validation);
  CHECK(code_of([&] { cat.ingest_qos_report(latency("p", NAN)); }) == ErrorCode::Validation);
  CHECK(cat.qos_aggregate("p", kLatencyMetric)->count == 2);
}

TEST_CASE("qos retention keeps the latest window") {
  Catalog cat;
  cat.register_product(product("p"));
  for (int v = 1; v <= 150; ++v) cat.ingest_qos_report(latency("p", v));
  auto agg = *cat.qos_aggregate("p", kLatencyMetric);
  CHECK(agg.count == Catalog::kQosRetention);
  CHECK(agg.min == 51.0);
  CHECK(agg.max == 150.0);
  CHECK(agg.mean == Approx(100.5));
}

TEST_CASE("aggregate mean stays within the observed range") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(1.0, 1000.0), trust(0.01, 1.0);
  for (int i = 0; i < 200; ++i) {
    Catalog cat;
    cat.register_product(product("p"));
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int k = 0; k < n; ++k) cat.ingest_qos_report(latency("p", val(rng), trust(rng)));
    auto agg = *cat.qos_aggregate("p", kLatencyMetric);
    REQUIRE(agg.min <= agg.mean);
    REQUIRE(agg.mean <= agg.max);
  }
}

TEST_CASE("listing order") {
  Catalog cat;
  auto a = product("a");
  a.marketVolumeRank = 2;
  auto b = product("b");
  b.marketVolumeRank = 1;
  auto c = product("c");
  c.marketVolumeRank = 1;
  c.standards = {"OCCI"};
  auto d = product("d");
  d.marketVolumeRank = 1;
  for (auto& p : {a, b, c, d}) cat.register_product(p);
  std::vector<std::string> ids;
  for (const auto* p : cat.list_products()) ids.push_back(p->productId);
  CHECK(ids == std::vector<std::string>{"c", "b", "d", "a"});
}

TEST_CASE("catalog json round trip") {
  auto cat = catalog_from_json(cbtest::read_json(cbtest::fixture("petclinic/catalog.json")));
  CHECK(cat.reference_currency() == "EUR");
  CHECK(cat.fx().at("USD") == 0.9);
  CHECK(cat.ref_latency_ms() == 50.0);
  auto doc = to_json(cat);
  auto again = catalog_from_json(doc);
  CHECK(to_json(again) == doc);
  REQUIRE(cat.size() == again.size());
  for (const auto* p : cat.list_products()) CHECK(*p == again.get(p->productId));
  CHECK(cat.qos_reports().size() == again.qos_reports().size());
  auto aws = *cat.qos_aggregate("aws-beanstalk-premium", kLatencyMetric);
  CHECK(aws.mean == Approx(40.0));
}

TEST_CASE("fixture prices") {
  auto cat = catalog_from_json(cbtest::read_json(cbtest::fixture("petclinic/catalog.json")));
  auto w = workload_from_json(cbtest::read_json(cbtest::fixture("petclinic/workload.json")));
  CHECK(cat.normalize_offer(cat.get("cloudfoundry-std"), w).monthlyCost == Approx(26.6));
  CHECK(cat.normalize_offer(cat.get("heroku-basic"), w).monthlyCost == Approx(29.511));
  CHECK(cat.normalize_offer(cat.get("aws-beanstalk-premium"), w).monthlyCost == Approx(44.9));
  CHECK(cat.normalize_offer(cat.get("openstack-imaging-9090"), w).monthlyCost == 60.0);
  for (const auto* p : cat.list_products()) {
    CHECK(cat.normalize_offer(*p, w).monthlyCost ==
          Approx(static_cast<double>(cbtest::cost_oracle(p->pricing, w, cat.fx()))));
  }
}

TEST_CASE("fx and reference latency validation") {
  Catalog cat("USD");
  CHECK(cat.fx().at("USD") == 1.0);
  CHECK(code_of([&] { cat.set_fx_rate("EUR", 0.0); }) == ErrorCode::Validation);
  CHECK(code_of([&] { cat.set_ref_latency_ms(-5); }) == ErrorCode::Validation);
  cat.set_fx_rate("EUR", 1.1);
  CHECK(cat.fx().at("EUR") == 1.1);
}

TEST_CASE("workload json") {
  auto w = workload_from_json({{"usage", {{"cpu", "730"}, {"storage", 10}}}});
  CHECK(w.usage.at("cpu") == 730.0);
  CHECK(w.usage.at("storage") == 10.0);
  CHECK(code_of([] { workload_from_json({{"usage", {{"cpu", "-1"}}}}); }) == ErrorCode::Validation);
  CHECK(code_of([] { workload_from_json({{"usage", {{"cpu", "abc"}}}}); }) == ErrorCode::Validation);
  CHECK(code_of([] { workload_from_json(nlohmann::json::object()); }) == ErrorCode::Validation);
}
