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

// broker: batch front end over the C API.
//
// exit codes: 0 ok, 2 usage/io, 3 validation, 4 infeasible, 5 scenario

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cloudbroker/cloudbroker.h"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kValidation = 3;
constexpr int kInfeasible = 4;
constexpr int kScenario = 5;

struct Config {
  std::string catalogPath = "catalog.json";
  std::string policyPath;
  std::string currency;
  std::string logPath;
};

// Raised to unwind with a given exit code; the message is already printed.
struct Exit {
  int code;
};

int exit_code(cb_status st) {
  switch (st) {
    case CB_OK: return kOk;
    case CB_ERR_INVALID_ARGUMENT:
    case CB_ERR_IO: return kUsage;
    case CB_ERR_INFEASIBLE: return kInfeasible;
    case CB_ERR_SCENARIO: return kScenario;
    case CB_ERR_INTERNAL: return 1;
    default: return kValidation;
  }
}

void check(cb_status st) {
  if (st == CB_OK) return;
  std::cerr << "broker: " << cb_last_error() << "\n";
  throw Exit{exit_code(st)};
}

[[noreturn]] void die(int code, const std::string& message) {
  std::cerr << "broker: " << message << "\n";
  throw Exit{code};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kUsage, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  // Write-then-rename so a crash never leaves half a file behind.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) die(kUsage, "cannot write " + tmp);
    out << data;
    if (!out.flush()) die(kUsage, "cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) die(kUsage, "cannot replace " + path + ": " + ec.message());
}

struct CString {
  char* p = nullptr;
  ~CString() { cb_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct CatalogHandle {
  cb_catalog* p = nullptr;
  ~CatalogHandle() { cb_catalog_destroy(p); }
};

// Advisory lock on <catalog>.lock, held for the life of the command.
class CatalogLock {
 public:
  CatalogLock(const std::string& catalogPath, bool exclusive) {
    const std::string path = catalogPath + ".lock";
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) die(kUsage, "cannot open lock file " + path);
    if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      ::close(fd_);
      die(kUsage, "cannot lock " + path);
    }
  }
  ~CatalogLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  CatalogLock(const CatalogLock&) = delete;
  CatalogLock& operator=(const CatalogLock&) = delete;

 private:
  int fd_ = -1;
};

void load_catalog(const Config& cfg, CatalogHandle& cat, bool createMissing) {
  if (!std::filesystem::exists(cfg.catalogPath)) {
    if (!createMissing) die(kUsage, "catalog " + cfg.catalogPath + " does not exist");
    check(cb_catalog_create(cfg.currency.empty() ? "EUR" : cfg.currency.c_str(), &cat.p));
    return;
  }
  check(cb_catalog_from_json(read_file(cfg.catalogPath).c_str(), &cat.p));
  if (!cfg.currency.empty()) {
    CString cur;
    check(cb_catalog_reference_currency(cat.p, &cur.p));
    if (cur.str() != cfg.currency) {
      die(kValidation, "catalog reference currency is " + cur.str() + ", not " + cfg.currency);
    }
  }
}

void save_catalog(const Config& cfg, const CatalogHandle& cat) {
  CString out;
  check(cb_catalog_to_json(cat.p, &out.p));
  write_file(cfg.catalogPath, out.str());
}

std::optional<std::string> policy_text(const Config& cfg) {
  if (cfg.policyPath.empty()) return std::nullopt;
  return read_file(cfg.policyPath);
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  CLI::App app{"Cross-cloud deployment broker"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.option_defaults()->always_capture_default();
  app.add_option("--catalog", cfg.catalogPath, "Catalog JSON file");
  app.add_option("--policy", cfg.policyPath, "Governance policy JSON file");
  app.add_option("--currency", cfg.currency, "Reference currency of the catalog");
  app.add_option("--log", cfg.logPath, "Event log output (simulate)");

  auto* catalog = app.add_subcommand("catalog", "Manage the product catalog");
  catalog->require_subcommand(1);
  std::string productFile;
  auto* add = catalog->add_subcommand("add", "Register a product record");
  add->add_option("record", productFile, "Product JSON file")->required();
  auto* list = catalog->add_subcommand("list", "List products, one JSON line each");
  std::string updateId, patchFile;
  auto* update = catalog->add_subcommand("update", "Apply a patch to a product");
  update->add_option("productId", updateId)->required();
  update->add_option("patch", patchFile, "Patch JSON file")->required();

  std::string manifestFile, appFile, workloadFile;
  auto* plan = app.add_subcommand("plan", "Print the deployment plan (dry run)");
  plan->add_option("-m,--manifest", manifestFile)->required();
  plan->add_option("-a,--app", appFile)->required();
  plan->add_option("-w,--workload", workloadFile)->required();

  std::string scenarioFile, outFile;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> ticks;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario against simulated clouds");
  simulate->add_option("-s,--scenario", scenarioFile)->required();
  simulate->add_option("--seed", seed);
  simulate->add_option("--ticks", ticks)->check(CLI::NonNegativeNumber);
  simulate->add_option("-o,--out", outFile, "Event log output");

  std::string planFile, component;
  auto* explain = app.add_subcommand("explain", "Show the ranked candidates for one component");
  explain->add_option("-p,--plan", planFile)->required();
  explain->add_option("-c,--component", component, "kind/name, or a unique bare name")->required();
  explain->add_option("-m,--manifest", manifestFile)->required();
  explain->add_option("-a,--app", appFile)->required();
  explain->add_option("-w,--workload", workloadFile)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*add) {
      CatalogLock lock(cfg.catalogPath, true);
      CatalogHandle cat;
      load_catalog(cfg, cat, true);
      std::uint64_t rev = 0;
      check(cb_catalog_add_product(cat.p, read_file(productFile).c_str(), &rev));
      save_catalog(cfg, cat);
      std::cout << nlohmann::json{{"revision", rev}}.dump() << "\n";
    } else if (*list) {
      CatalogLock lock(cfg.catalogPath, false);
      CatalogHandle cat;
      load_catalog(cfg, cat, false);
      CString out;
      check(cb_catalog_list(cat.p, &out.p));
      std::cout << out.str();
    } else if (*update) {
      CatalogLock lock(cfg.catalogPath, true);
      CatalogHandle cat;
      load_catalog(cfg, cat, false);
      CString events;
      check(cb_catalog_update_product(cat.p, updateId.c_str(), read_file(patchFile).c_str(),
                                      &events.p));
      save_catalog(cfg, cat);
      std::cout << events.str() << "\n";
    } else if (*plan) {
      CatalogLock lock(cfg.catalogPath, false);
      CatalogHandle cat;
      load_catalog(cfg, cat, false);
      auto policy = policy_text(cfg);
      CString out;
      check(cb_plan(cat.p, read_file(manifestFile).c_str(), read_file(appFile).c_str(),
                    read_file(workloadFile).c_str(), policy ? policy->c_str() : nullptr, &out.p));
      std::cout << out.str();
    } else if (*simulate) {
      const std::string logPath = !outFile.empty() ? outFile : cfg.logPath;
      if (logPath.empty()) die(kUsage, "simulate needs -o <log> or --log <log>");
      cb_sim_options opts{};
      opts.has_seed = seed.has_value();
      opts.seed = seed.value_or(0);
      opts.has_ticks = ticks.has_value();
      opts.ticks = ticks.value_or(0);
      // The global catalog and policy only fill in what the scenario leaves out.
      opts.catalog_path = std::filesystem::exists(cfg.catalogPath) ? cfg.catalogPath.c_str() : nullptr;
      opts.policy_path = cfg.policyPath.empty() ? nullptr : cfg.policyPath.c_str();
      cb_simulation* sim = nullptr;
      cb_status st = cb_simulate(scenarioFile.c_str(), &opts, &sim);
      std::unique_ptr<cb_simulation, void (*)(cb_simulation*)> guard(sim, cb_simulation_destroy);
      check(st);
      CString log, summary;
      check(cb_simulation_log(sim, &log.p));
      write_file(logPath, log.str());
      check(cb_simulation_summary(sim, &summary.p));
      auto s = nlohmann::json::parse(summary.str());
      nlohmann::json brief{{"finalRevision", s["finalRevision"]},
                           {"monthlyCost", s["monthlyCost"]},
                           {"currency", s["currency"]},
                           {"redeployments", s["redeployments"]},
                           {"log", logPath}};
      std::cout << brief.dump() << "\n";
    } else if (*explain) {
      CatalogLock lock(cfg.catalogPath, false);
      CatalogHandle cat;
      load_catalog(cfg, cat, false);
      auto policy = policy_text(cfg);
      CString out;
      cb_status st = cb_explain(cat.p, read_file(manifestFile).c_str(), read_file(appFile).c_str(),
                                read_file(workloadFile).c_str(), policy ? policy->c_str() : nullptr,
                                read_file(planFile).c_str(), component.c_str(), &out.p);
      if (st == CB_ERR_NOT_FOUND) die(kUsage, cb_last_error());
      check(st);
      std::cout << out.str();
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kOk;
}
