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

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "doctest.h"
#include "json.hpp"

#include "cloudbroker/cloudbroker.h"

using nlohmann::json;

namespace {

std::string fx(const std::string& rel) { return std::string(CB_FIXTURES_DIR) + "/" + rel; }

std::string slurp(const std::string& rel) {
  std::ifstream in(fx(rel), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  cb_string_free(s);
  return out;
}

struct Catalog {
  cb_catalog* p = nullptr;
  ~Catalog() { cb_catalog_destroy(p); }
};

struct PetClinic {
  std::string manifest = slurp("petclinic/manifest.broker");
  std::string app = slurp("petclinic/app.json");
  std::string workload = slurp("petclinic/workload.json");
  std::string policy = slurp("petclinic/policy.json");
  Catalog cat;
  PetClinic() { REQUIRE(cb_catalog_from_json(slurp("petclinic/catalog.json").c_str(), &cat.p) == CB_OK); }
};

}  // namespace

TEST_CASE("library basics") {
  CHECK(std::string(cb_version()) == "1.0.0");
  CHECK(std::string(cb_status_name(CB_ERR_SYNTAX)) == "syntax");
  CHECK(std::string(cb_status_name(static_cast<cb_status>(99))) == "unknown");
  cb_string_free(nullptr);
  cb_catalog_destroy(nullptr);
  cb_simulation_destroy(nullptr);
}

TEST_CASE("null arguments") {
  CHECK(cb_catalog_create("EUR", nullptr) == CB_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(cb_last_error()) > 0);
  char* out = nullptr;
  CHECK(cb_catalog_to_json(nullptr, &out) == CB_ERR_INVALID_ARGUMENT);
  CHECK(cb_plan(nullptr, "", "", "", nullptr, &out) == CB_ERR_INVALID_ARGUMENT);
  CHECK(cb_simulate(nullptr, nullptr, nullptr) == CB_ERR_INVALID_ARGUMENT);
  CHECK(out == nullptr);
}

TEST_CASE("catalog lifecycle") {
  Catalog c;
  REQUIRE(cb_catalog_create("EUR", &c.p) == CB_OK);
  CHECK(std::string(cb_last_error()).empty());
  size_t n = 99;
  CHECK(cb_catalog_size(c.p, &n) == CB_OK);
  CHECK(n == 0);

  const std::string rec = slurp("openstack-9090.json");
  uint64_t rev = 0;
  CHECK(cb_catalog_add_product(c.p, rec.c_str(), &rev) == CB_OK);
  CHECK(rev == 1);
  CHECK(cb_catalog_add_product(c.p, rec.c_str(), &rev) == CB_ERR_DUPLICATE);
  CHECK(std::string(cb_last_error()).find("openstack-imaging-9090") != std::string::npos);
  CHECK(cb_catalog_add_product(c.p, slurp("openstack-8080.json").c_str(), nullptr) == CB_OK);
  CHECK(cb_catalog_add_product(c.p, "{not json", nullptr) == CB_ERR_VALIDATION);
  CHECK(cb_catalog_size(c.p, &n) == CB_OK);
  CHECK(n == 2);

  char* s = nullptr;
  REQUIRE(cb_catalog_list(c.p, &s) == CB_OK);
  std::istringstream lines(take(s));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    auto j = json::parse(line);
    CHECK(j.contains("productId"));
    ++count;
  }
  CHECK(count == 2);

  char* events = nullptr;
  CHECK(cb_catalog_update_product(c.p, "openstack-imaging-8080", R"({"status":"withdrawn"})", &events) == CB_OK);
  auto ev = json::parse(take(events));
  REQUIRE(ev.size() == 1);
  CHECK(ev[0]["type"] == "ProductWithdrawn");
  CHECK(cb_catalog_update_product(c.p, "ghost", R"({"status":"withdrawn"})", nullptr) == CB_ERR_NOT_FOUND);
  CHECK(cb_catalog_update_product(c.p, "openstack-imaging-8080", R"({"status":"active"})", nullptr) ==
        CB_ERR_VALIDATION);

  CHECK(cb_catalog_ingest_qos(c.p,
                              R"({"productId":"openstack-imaging-9090","metric":"responseTimeMs",)"
                              R"("value":"40","sourceId":"t","trustWeight":"1"})") == CB_OK);

  REQUIRE(cb_catalog_to_json(c.p, &s) == CB_OK);
  auto doc = json::parse(take(s));
  CHECK(doc["products"].size() == 2);
  CHECK(doc["qosReports"].size() == 1);

  Catalog copy;
  REQUIRE(cb_catalog_from_json(doc.dump().c_str(), &copy.p) == CB_OK);
  REQUIRE(cb_catalog_to_json(copy.p, &s) == CB_OK);
  CHECK(json::parse(take(s)) == doc);
  REQUIRE(cb_catalog_reference_currency(copy.p, &s) == CB_OK);
  CHECK(take(s) == "EUR");
}

TEST_CASE("manifest check") {
  char* canon = nullptr;
  CHECK(cb_manifest_check("broker { governance.lifecycle = active views { all economy } }", &canon) == CB_OK);
  CHECK(take(canon).find("all economy") != std::string::npos);
  CHECK(cb_manifest_check("broker {\n governance.lifecycle = active\n views { al economy }\n}", nullptr) ==
        CB_ERR_SYNTAX);
  CHECK(std::string(cb_last_error()).find("3") != std::string::npos);
  CHECK(cb_manifest_check("broker { views { all economy } }", nullptr) == CB_ERR_SYNTAX);
}

TEST_CASE("plan and explain") {
  PetClinic pc;
  char* out = nullptr;
  REQUIRE(cb_plan(pc.cat.p, pc.manifest.c_str(), pc.app.c_str(), pc.workload.c_str(), pc.policy.c_str(), &out) ==
          CB_OK);
  const std::string planText = take(out);
  auto plan = json::parse(planText);
  CHECK(plan["revision"] == 1);
  CHECK(plan["assignments"].size() == 18);

  REQUIRE(cb_explain(pc.cat.p, pc.manifest.c_str(), pc.app.c_str(), pc.workload.c_str(), pc.policy.c_str(),
                     planText.c_str(), "prodDb", &out) == CB_OK);
  auto ex = json::parse(take(out));
  CHECK(ex["reason"] == "privateCloud pin");
  CHECK(ex["candidates"].size() == 1);

  REQUIRE(cb_explain(pc.cat.p, pc.manifest.c_str(), pc.app.c_str(), pc.workload.c_str(), pc.policy.c_str(),
                     planText.c_str(), "controllers/Pet", &out) == CB_OK);
  CHECK(json::parse(take(out))["winnerProductId"] == "aws-beanstalk-premium");

  // "Pet" names both a domain class and a controller
  CHECK(cb_explain(pc.cat.p, pc.manifest.c_str(), pc.app.c_str(), pc.workload.c_str(), pc.policy.c_str(),
                   planText.c_str(), "Pet", &out) == CB_ERR_NOT_FOUND);
  CHECK(cb_explain(pc.cat.p, pc.manifest.c_str(), pc.app.c_str(), pc.workload.c_str(), pc.policy.c_str(),
                   planText.c_str(), "views/ghost", &out) == CB_ERR_NOT_FOUND);
  CHECK(std::string(cb_last_error()).find("views/ghost") != std::string::npos);

  Catalog empty;
  REQUIRE(cb_catalog_create("EUR", &empty.p) == CB_OK);
  CHECK(cb_plan(empty.p, pc.manifest.c_str(), pc.app.c_str(), pc.workload.c_str(), nullptr, &out) ==
        CB_ERR_INFEASIBLE);
  CHECK(std::string(cb_last_error()).find("NoFeasibleProduct") != std::string::npos);
  CHECK(cb_plan(pc.cat.p, "broker {", pc.app.c_str(), pc.workload.c_str(), nullptr, &out) == CB_ERR_SYNTAX);
  CHECK(cb_plan(pc.cat.p, pc.manifest.c_str(), pc.app.c_str(), pc.workload.c_str(), R"({"wCost":"0.9"})", &out) ==
        CB_ERR_VALIDATION);
}

TEST_CASE("simulate") {
  cb_simulation* sim = nullptr;
  cb_sim_options opts{};
  REQUIRE(cb_simulate(fx("scenarios/petclinic-price-rise.json").c_str(), &opts, &sim) == CB_OK);
  char* out = nullptr;
  REQUIRE(cb_simulation_summary(sim, &out) == CB_OK);
  auto sum = json::parse(take(out));
  CHECK(sum["finalRevision"] == 2);
  CHECK(sum["redeployments"] == 1);
  CHECK(sum["currency"] == "EUR");
  CHECK(sum["deployed"].contains("heroku-basic"));
  REQUIRE(cb_simulation_log(sim, &out) == CB_OK);
  const std::string log = take(out);
  cb_simulation_destroy(sim);

  // same seed, same log
  REQUIRE(cb_simulate(fx("scenarios/petclinic-price-rise.json").c_str(), nullptr, &sim) == CB_OK);
  REQUIRE(cb_simulation_log(sim, &out) == CB_OK);
  CHECK(take(out) == log);
  cb_simulation_destroy(sim);

  opts.has_ticks = 1;
  opts.ticks = 0;
  REQUIRE(cb_simulate(fx("scenarios/petclinic-price-rise.json").c_str(), &opts, &sim) == CB_OK);
  REQUIRE(cb_simulation_summary(sim, &out) == CB_OK);
  CHECK(json::parse(take(out))["logRecords"] == 3);
  cb_simulation_destroy(sim);

  sim = nullptr;
  CHECK(cb_simulate(fx("scenarios/missing.json").c_str(), nullptr, &sim) == CB_ERR_IO);
  CHECK(sim == nullptr);
  CHECK(cb_simulate(fx("petclinic/app.json").c_str(), nullptr, &sim) == CB_ERR_SCENARIO);
}

TEST_CASE("errors are per thread") {
  char* out = nullptr;
  CHECK(cb_manifest_check("nope", &out) == CB_ERR_SYNTAX);
  const std::string mine = cb_last_error();
  std::string theirs = "unset";
  std::thread([&] {
    Catalog c;
    cb_catalog_create("EUR", &c.p);
    theirs = cb_last_error();
  }).join();
  CHECK(theirs.empty());
  CHECK(std::string(cb_last_error()) == mine);
}
