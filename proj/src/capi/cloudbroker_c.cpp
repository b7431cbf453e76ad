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

#include "cloudbroker/cloudbroker.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "cloudbroker/catalog.hpp"
#include "cloudbroker/decision.hpp"
#include "cloudbroker/manifest.hpp"
#include "cloudbroker/simcloud.hpp"

using nlohmann::json;
namespace cb = cloudbroker;

struct cb_catalog {
  cb::Catalog impl;
};

struct cb_simulation {
  cb::ScenarioResult result;
};

namespace {

thread_local std::string g_last_error;

cb_status status_of(cb::ErrorCode code) {
  using cb::ErrorCode;
  switch (code) {
    case ErrorCode::Syntax:
    case ErrorCode::DuplicateSelector:
    case ErrorCode::MissingLifecycle:
    case ErrorCode::InvalidOptionArgs:
      return CB_ERR_SYNTAX;
    case ErrorCode::DuplicateProduct:
      return CB_ERR_DUPLICATE;
    case ErrorCode::UnknownProduct:
      return CB_ERR_NOT_FOUND;
    case ErrorCode::NoCandidates:
    case ErrorCode::NoFeasibleProduct:
    case ErrorCode::InitialPlanInfeasible:
      return CB_ERR_INFEASIBLE;
    case ErrorCode::ScenarioParse:
      return CB_ERR_SCENARIO;
    case ErrorCode::Io:
      return CB_ERR_IO;
    default:
      return CB_ERR_VALIDATION;
  }
}

cb_status fail(cb_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body` with every exception mapped to a status.
template <typename F>
cb_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return CB_OK;
  } catch (const cb::BrokerError& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(CB_ERR_VALIDATION, std::string("ValidationError: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(CB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CB_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_json(const char* text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw cb::BrokerError(cb::ErrorCode::Validation, what,
                          std::string("ValidationError(") + what + "): not valid JSON");
  }
  return doc;
}

struct PlanningInputs {
  cb::DeploymentManifest manifest;
  cb::ApplicationModel app;
  cb::WorkloadProfile workload;
  cb::GovernancePolicy policy;

  cb::DecisionInputs view() const { return {manifest, app, policy, workload}; }
};

PlanningInputs load_inputs(const char* manifest_text, const char* app_json,
                           const char* workload_json, const char* policy_json) {
  PlanningInputs in;
  in.manifest = cb::parse_manifest(manifest_text);
  in.app = cb::application_from_json(parse_json(app_json, "app"));
  in.workload = cb::workload_from_json(parse_json(workload_json, "workload"));
  if (policy_json) in.policy = cb::policy_from_json(parse_json(policy_json, "policy"));
  in.app.validate();
  cb::validate_manifest(in.manifest);
  in.policy.validate();
  return in;
}

// "kind/name", or a bare name that only one kind uses.
bool resolve_component(const cb::ApplicationModel& app, const std::string& text,
                       cb::ComponentId& out) {
  if (text.find('/') != std::string::npos) {
    try {
      out = cb::ComponentId::parse(text);
    } catch (const cb::BrokerError&) {
      return false;
    }
    return app.find(out) != nullptr;
  }
  int hits = 0;
  for (const auto& c : app.components) {
    if (c.name == text) {
      out = c.id();
      ++hits;
    }
  }
  return hits == 1;
}

}  // namespace

extern "C" {

const char* cb_version(void) { return "1.0.0"; }

const char* cb_status_name(cb_status status) {
  switch (status) {
    case CB_OK: return "ok";
    case CB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CB_ERR_IO: return "io";
    case CB_ERR_VALIDATION: return "validation";
    case CB_ERR_INFEASIBLE: return "infeasible";
    case CB_ERR_SCENARIO: return "scenario";
    case CB_ERR_DUPLICATE: return "duplicate";
    case CB_ERR_NOT_FOUND: return "not found";
    case CB_ERR_SYNTAX: return "syntax";
    case CB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* cb_last_error(void) { return g_last_error.c_str(); }

void cb_string_free(char* s) { std::free(s); }

cb_status cb_catalog_create(const char* reference_currency, cb_catalog** out) {
  if (!out) return fail(CB_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    *out = new cb_catalog{cb::Catalog(reference_currency ? reference_currency : "EUR")};
  });
}

cb_status cb_catalog_from_json(const char* text, cb_catalog** out) {
  if (!text || !out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new cb_catalog{cb::catalog_from_json(parse_json(text, "catalog"))}; });
}

cb_status cb_catalog_to_json(const cb_catalog* catalog, char** out) {
  if (!catalog || !out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(cb::to_json(catalog->impl).dump(2) + "\n"); });
}

void cb_catalog_destroy(cb_catalog* catalog) { delete catalog; }

cb_status cb_catalog_reference_currency(const cb_catalog* catalog, char** out) {
  if (!catalog || !out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(catalog->impl.reference_currency()); });
}

cb_status cb_catalog_size(const cb_catalog* catalog, size_t* out) {
  if (!catalog || !out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  g_last_error.clear();
  *out = catalog->impl.size();
  return CB_OK;
}

cb_status cb_catalog_add_product(cb_catalog* catalog, const char* product_json,
                                 uint64_t* revision) {
  if (!catalog || !product_json) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto rev = catalog->impl.register_product(cb::product_from_json(parse_json(product_json, "product")));
    if (revision) *revision = rev;
  });
}

cb_status cb_catalog_update_product(cb_catalog* catalog, const char* product_id,
                                    const char* patch_json, char** events_out) {
  if (!catalog || !product_id || !patch_json) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto events = catalog->impl.update_product(product_id, cb::patch_from_json(parse_json(patch_json, "patch")));
    if (events_out) {
      json arr = json::array();
      for (const auto& e : events) arr.push_back(cb::to_json(e));
      *events_out = dup_string(arr.dump());
    }
  });
}

cb_status cb_catalog_list(const cb_catalog* catalog, char** jsonl_out) {
  if (!catalog || !jsonl_out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string out;
    for (const auto* p : catalog->impl.list_products()) out += cb::to_json(*p).dump() + "\n";
    *jsonl_out = dup_string(out);
  });
}

cb_status cb_catalog_ingest_qos(cb_catalog* catalog, const char* report_json) {
  if (!catalog || !report_json) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    catalog->impl.ingest_qos_report(cb::qos_report_from_json(parse_json(report_json, "qosReport")));
  });
}

cb_status cb_manifest_check(const char* manifest_text, char** canonical_out) {
  if (!manifest_text) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto m = cb::parse_manifest(manifest_text);
    cb::validate_manifest(m);
    if (canonical_out) *canonical_out = dup_string(cb::serialize_manifest(m));
  });
}

cb_status cb_plan(const cb_catalog* catalog, const char* manifest_text, const char* app_json,
                  const char* workload_json, const char* policy_json, char** plan_out) {
  if (!catalog || !manifest_text || !app_json || !workload_json || !plan_out) {
    return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto in = load_inputs(manifest_text, app_json, workload_json, policy_json);
    auto plan = cb::decide(in.view(), catalog->impl);
    *plan_out = dup_string(cb::to_json(plan).dump(2) + "\n");
  });
}

cb_status cb_explain(const cb_catalog* catalog, const char* manifest_text, const char* app_json,
                     const char* workload_json, const char* policy_json, const char* plan_json,
                     const char* component, char** explanation_out) {
  if (!catalog || !manifest_text || !app_json || !workload_json || !plan_json || !component ||
      !explanation_out) {
    return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  }
  cb_status st = CB_OK;
  cb_status inner = guarded([&] {
    auto in = load_inputs(manifest_text, app_json, workload_json, policy_json);
    auto plan = cb::plan_from_json(parse_json(plan_json, "plan"));
    cb::ComponentId id;
    if (!resolve_component(in.app, component, id) || !plan.find(id)) {
      st = fail(CB_ERR_NOT_FOUND, std::string("unknown component '") + component + "'");
      return;
    }
    auto ex = cb::explain(in.view(), catalog->impl, plan, id);
    *explanation_out = dup_string(cb::to_json(ex).dump(2) + "\n");
  });
  return st != CB_OK ? st : inner;
}

cb_status cb_simulate(const char* scenario_path, const cb_sim_options* options,
                      cb_simulation** out) {
  if (!scenario_path || !out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::map<std::string, std::filesystem::path> fallbacks;
    cb::RunOverrides overrides;
    if (options) {
      if (options->catalog_path) fallbacks["catalog"] = options->catalog_path;
      if (options->policy_path) fallbacks["policy"] = options->policy_path;
      if (options->has_seed) overrides.seed = options->seed;
      if (options->has_ticks) overrides.ticks = options->ticks;
    }
    auto bundle = cb::load_scenario_bundle(scenario_path, fallbacks);
    *out = new cb_simulation{cb::run_scenario(bundle, overrides)};
  });
}

cb_status cb_simulation_log(const cb_simulation* sim, char** jsonl_out) {
  if (!sim || !jsonl_out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *jsonl_out = dup_string(cb::render_log(sim->result.log)); });
}

cb_status cb_simulation_summary(const cb_simulation* sim, char** json_out) {
  if (!sim || !json_out) return fail(CB_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& r = sim->result;
    json deployed = json::object();
    for (const auto& [pid, p] : r.providers) {
      if (!p.deployed.empty()) deployed[pid] = p.deployed;
    }
    json j{{"finalRevision", r.finalPlan.revision},
           {"monthlyCost", cb::format_decimal(r.monthlyCost)},
           {"currency", r.finalCatalog.reference_currency()},
           {"redeployments", r.redeployments},
           {"injectedFailures", r.injectedFailures},
           {"failuresScheduled", r.failuresScheduled},
           {"endTick", r.endTick},
           {"logRecords", r.log.size()},
           {"deployed", std::move(deployed)},
           {"finalPlan", cb::to_json(r.finalPlan)}};
    *json_out = dup_string(j.dump(2) + "\n");
  });
}

void cb_simulation_destroy(cb_simulation* sim) { delete sim; }

}  // extern "C"
