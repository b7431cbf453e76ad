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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cloudbroker/common.hpp"
#include "cloudbroker/events.hpp"
#include "cloudbroker/manifest.hpp"

namespace cloudbroker {

enum class ServiceType { Storage, Compute, Database, Messaging };
enum class ProductStatus { Active, Withdrawn };

std::string_view to_string(ServiceType type);
std::string_view to_string(ProductStatus status);

/// Metric ids with a price table. Each has one canonical unit; rates given in
/// another accepted unit are converted when the product is registered.
///
///   cpu       cpu-hour
///   memory    gb-month    (also gib-month, gb-hour, gib-hour)
///   storage   gb-month    (also gib-month, gb-hour, gib-hour)
///   network   gb-transfer (also gib-transfer)
///   database  k-requests  (also requests)
std::optional<std::string> canonical_unit(std::string_view metric);

/// Metric id used for latency observations (QoS reports, monitor samples).
inline constexpr std::string_view kLatencyMetric = "responseTimeMs";

struct Rate {
  std::string metric;
  std::string unit;
  double pricePerUnit = 0.0;
  bool operator==(const Rate&) const = default;
};

struct PricingPlan {
  std::string currency = "EUR";
  double fixedFeePerMonth = 0.0;
  std::vector<Rate> rates;
  bool operator==(const PricingPlan&) const = default;
};

struct SlaTerms {
  double availabilityPct = 99.0;
  double responseTimeMsP95 = 100.0;
  std::set<std::string> securityAttrs;
  bool operator==(const SlaTerms&) const = default;
};

/// Security attributes that count towards securityScore.
const std::set<std::string>& recognized_security_attrs();

struct CloudProduct {
  std::string productId;
  std::string providerId;
  CloudType cloudType = CloudType::Paas;
  std::set<ServiceType> serviceTypes;
  std::set<std::string> regions;
  std::set<std::string> techTags;
  PricingPlan pricing;
  SlaTerms sla;
  std::optional<std::string> endpoint;
  ProductStatus status = ProductStatus::Active;
  int marketVolumeRank = 1;
  std::set<std::string> standards;

  bool active() const { return status == ProductStatus::Active; }
  bool operator==(const CloudProduct&) const = default;
};

/// Fields an update may change. Each present field is one facet.
struct ProductPatch {
  std::optional<PricingPlan> pricing;
  std::optional<SlaTerms> sla;
  std::optional<std::set<std::string>> techTags;
  std::optional<ProductStatus> status;
};

struct QosReport {
  std::string productId;
  std::string region;
  std::string metric;
  double value = 0.0;
  std::string sourceId;
  double trustWeight = 1.0;
  SimInstant timestamp = 0;
};

struct QosAggregate {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct WorkloadProfile {
  std::map<std::string, double> usage;  // metric id -> monthly quantity, canonical units
};

using FxTable = std::map<std::string, double>;  // currency -> rate to reference currency

struct NormalizedOffer {
  std::string productId;
  double monthlyCost = 0.0;
  double perfScore = 1.0;
  double reliabilityScore = 0.0;
  double securityScore = 0.0;
  bool measured = false;  // false: no latency data, perfScore is the optimistic 1.0
  bool operator==(const NormalizedOffer&) const = default;
};

struct CatalogChanged {
  std::uint64_t revision = 0;
  std::string productId;
  bool registered = false;  // false for updates
};

/// fx[plan.currency] * (fixedFee + sum of pricePerUnit * usage[metric]).
/// Workload metrics the plan does not price cost nothing and raise a warning.
double estimate_monthly_cost(const PricingPlan& plan, const WorkloadProfile& workload,
                             const FxTable& fx);

/// `latencyMs` is the product's aggregated latency, if any was reported.
NormalizedOffer normalize_offer(const CloudProduct& product, const WorkloadProfile& workload,
                                const FxTable& fx, std::optional<double> latencyMs,
                                double refLatencyMs);

/// Converts every rate into its metric's canonical unit. Throws
/// ValidationError for unknown metrics or units.
PricingPlan canonicalize_pricing(PricingPlan plan);

void validate_product(const CloudProduct& product);

/// Product registry plus third-party QoS store. Copying a Catalog yields an
/// immutable-by-convention snapshot; subscribers are not copied.
class Catalog {
 public:
  static constexpr std::size_t kQosRetention = 100;
  static constexpr double kDefaultRefLatencyMs = 50.0;

  explicit Catalog(std::string referenceCurrency = "EUR");
  Catalog(const Catalog& other);
  Catalog& operator=(const Catalog& other);
  Catalog(Catalog&&) noexcept = default;
  Catalog& operator=(Catalog&&) noexcept = default;

  std::uint64_t register_product(CloudProduct product);
  std::vector<EventPayload> update_product(const std::string& productId, const ProductPatch& patch);

  const CloudProduct* find(const std::string& productId) const;
  const CloudProduct& get(const std::string& productId) const;

  /// Every product, ordered by (marketVolumeRank asc, |standards| desc, productId asc).
  std::vector<const CloudProduct*> list_products() const;
  /// Active products only, same order.
  std::vector<const CloudProduct*> candidates() const;

  QosAggregate ingest_qos_report(const QosReport& report);
  std::optional<QosAggregate> qos_aggregate(const std::string& productId,
                                            std::string_view metric) const;
  /// Retained reports in ingestion order.
  std::vector<QosReport> qos_reports() const;

  NormalizedOffer normalize_offer(const CloudProduct& product,
                                  const WorkloadProfile& workload) const;
  double estimate_monthly_cost(const PricingPlan& plan, const WorkloadProfile& workload) const {
    return cloudbroker::estimate_monthly_cost(plan, workload, fx_);
  }

  void subscribe(std::function<void(const CatalogChanged&)> subscriber);

  const std::string& reference_currency() const { return referenceCurrency_; }
  const FxTable& fx() const { return fx_; }
  void set_fx_rate(const std::string& currency, double rate);
  double ref_latency_ms() const { return refLatencyMs_; }
  void set_ref_latency_ms(double ms);
  std::uint64_t revision() const { return revision_; }
  std::size_t size() const { return products_.size(); }

 private:
  struct StoredReport {
    std::uint64_t order;
    QosReport report;
  };

  void notify(const CatalogChanged& change);

  std::string referenceCurrency_;
  FxTable fx_;
  double refLatencyMs_ = kDefaultRefLatencyMs;
  std::map<std::string, CloudProduct> products_;
  std::map<std::pair<std::string, std::string>, std::deque<StoredReport>> qos_;
  std::uint64_t qosOrder_ = 0;
  std::uint64_t revision_ = 0;
  std::vector<std::function<void(const CatalogChanged&)>> subscribers_;
};

CloudProduct product_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CloudProduct& product);
ProductPatch patch_from_json(const nlohmann::json& doc);
QosReport qos_report_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const QosReport& report);
WorkloadProfile workload_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const WorkloadProfile& workload);
nlohmann::json to_json(const NormalizedOffer& offer);

/// `{"products": [...], "qosReports": [...], "fx": {...}, "referenceCurrency": "EUR"}`,
/// optionally with `"refLatencyMs"`.
Catalog catalog_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Catalog& catalog);

}  // namespace cloudbroker
