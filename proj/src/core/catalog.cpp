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

#include "cloudbroker/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "json_util.hpp"

namespace cloudbroker {

using detail::invalid;
using nlohmann::json;

std::string_view to_string(ServiceType type) {
  switch (type) {
    case ServiceType::Storage: return "storage";
    case ServiceType::Compute: return "compute";
    case ServiceType::Database: return "database";
    case ServiceType::Messaging: return "messaging";
  }
  return "?";
}

std::string_view to_string(ProductStatus status) {
  return status == ProductStatus::Active ? "active" : "withdrawn";
}

namespace {

constexpr double kGbPerGib = 1.073741824;
constexpr double kHoursPerMonth = 730.0;

struct UnitConversion {
  std::string_view metric;
  std::string_view unit;
  double priceFactor;  // price per canonical unit = price per `unit` * priceFactor
};

// The first entry for each metric is its canonical unit.
constexpr UnitConversion kUnits[] = {
    {"cpu", "cpu-hour", 1.0},
    {"memory", "gb-month", 1.0},
    {"memory", "gib-month", 1.0 / kGbPerGib},
    {"memory", "gb-hour", kHoursPerMonth},
    {"memory", "gib-hour", kHoursPerMonth / kGbPerGib},
    {"storage", "gb-month", 1.0},
    {"storage", "gib-month", 1.0 / kGbPerGib},
    {"storage", "gb-hour", kHoursPerMonth},
    {"storage", "gib-hour", kHoursPerMonth / kGbPerGib},
    {"network", "gb-transfer", 1.0},
    {"network", "gib-transfer", 1.0 / kGbPerGib},
    {"database", "k-requests", 1.0},
    {"database", "requests", 1000.0},
};

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

std::string join(const std::set<std::string>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    out += v;
  }
  return out;
}

}  // namespace

std::optional<std::string> canonical_unit(std::string_view metric) {
  for (const auto& u : kUnits) {
    if (u.metric == metric) {
      return std::string(u.unit);
    }
  }
  return std::nullopt;
}

const std::set<std::string>& recognized_security_attrs() {
  static const std::set<std::string> attrs{"daily-backup", "encrypted-at-rest",
                                           "encrypted-in-transit", "multi-region-replication"};
  return attrs;
}

PricingPlan canonicalize_pricing(PricingPlan plan) {
  for (auto& rate : plan.rates) {
    const UnitConversion* hit = nullptr;
    bool knownMetric = false;
    for (const auto& u : kUnits) {
      if (u.metric != rate.metric) continue;
      knownMetric = true;
      if (u.unit == rate.unit) {
        hit = &u;
        break;
      }
    }
    if (!knownMetric) {
      invalid("pricing.rates.metric", "unknown metric '" + rate.metric + "'");
    }
    if (!hit) {
      invalid("pricing.rates.unit", "unit '" + rate.unit + "' not accepted for " + rate.metric);
    }
    rate.pricePerUnit *= hit->priceFactor;
    rate.unit = *canonical_unit(rate.metric);
  }
  return plan;
}

namespace {

void validate_pricing(const PricingPlan& plan) {
  const auto& c = plan.currency;
  if (c.size() != 3 || !std::all_of(c.begin(), c.end(), [](unsigned char ch) {
        return std::isupper(ch) != 0;
      })) {
    invalid("pricing.currency", "expected an ISO-4217 code");
  }
  if (!finite_non_negative(plan.fixedFeePerMonth)) {
    invalid("pricing.fixedFeePerMonth", "must be finite and >= 0");
  }
  std::set<std::string> metrics;
  for (const auto& r : plan.rates) {
    if (!metrics.insert(r.metric).second) {
      invalid("pricing.rates.metric", "duplicate metric '" + r.metric + "'");
    }
    if (!finite_non_negative(r.pricePerUnit)) {
      invalid("pricing.rates.pricePerUnit", "must be finite and >= 0");
    }
  }
}

void validate_sla(const SlaTerms& sla) {
  if (!std::isfinite(sla.availabilityPct) || sla.availabilityPct < 0.0 ||
      sla.availabilityPct > 100.0) {
    invalid("sla.availabilityPct", "must lie in [0, 100]");
  }
  if (!std::isfinite(sla.responseTimeMsP95) || sla.responseTimeMsP95 <= 0.0) {
    invalid("sla.responseTimeMsP95", "must be > 0");
  }
}

}  // namespace

void validate_product(const CloudProduct& p) {
  if (p.productId.empty()) invalid("productId", "must not be empty");
  if (p.providerId.empty()) invalid("providerId", "must not be empty");
  if (p.marketVolumeRank < 1) invalid("marketVolumeRank", "must be a positive integer");
  if (p.endpoint && !is_valid_absolute_url(*p.endpoint)) {
    invalid("endpoint", "not an absolute URL");
  }
  validate_pricing(p.pricing);
  validate_sla(p.sla);
}

double estimate_monthly_cost(const PricingPlan& plan, const WorkloadProfile& workload,
                             const FxTable& fx) {
  auto rate = fx.find(plan.currency);
  if (rate == fx.end()) {
    throw BrokerError(ErrorCode::MissingFxRate, plan.currency);
  }
  double variable = 0.0;
  for (const auto& r : plan.rates) {
    auto used = workload.usage.find(r.metric);
    if (used != workload.usage.end()) {
      variable += r.pricePerUnit * used->second;
    }
  }
  for (const auto& [metric, quantity] : workload.usage) {
    bool priced = std::any_of(plan.rates.begin(), plan.rates.end(),
                              [&](const Rate& r) { return r.metric == metric; });
    if (!priced && quantity > 0.0) {
      warn("workload metric '" + metric + "' has no rate; counted as free");
    }
  }
  return rate->second * (plan.fixedFeePerMonth + variable);
}

NormalizedOffer normalize_offer(const CloudProduct& product, const WorkloadProfile& workload,
                                const FxTable& fx, std::optional<double> latencyMs,
                                double refLatencyMs) {
  NormalizedOffer offer;
  offer.productId = product.productId;
  offer.monthlyCost = estimate_monthly_cost(product.pricing, workload, fx);
  offer.measured = latencyMs.has_value();
  if (latencyMs) {
    offer.perfScore = *latencyMs > 0.0 ? std::clamp(refLatencyMs / *latencyMs, 0.0, 1.0) : 1.0;
  } else {
    offer.perfScore = 1.0;
  }
  offer.reliabilityScore = std::clamp((product.sla.availabilityPct - 99.0) / 1.0, 0.0, 1.0);
  const auto& recognized = recognized_security_attrs();
  auto hits = std::count_if(recognized.begin(), recognized.end(), [&](const std::string& a) {
    return product.sla.securityAttrs.count(a) > 0;
  });
  offer.securityScore = static_cast<double>(hits) / static_cast<double>(recognized.size());
  return offer;
}

// ---------------------------------------------------------------------------
// Catalog

Catalog::Catalog(std::string referenceCurrency) : referenceCurrency_(std::move(referenceCurrency)) {
  fx_[referenceCurrency_] = 1.0;
}

Catalog::Catalog(const Catalog& other)
    : referenceCurrency_(other.referenceCurrency_),
      fx_(other.fx_),
      refLatencyMs_(other.refLatencyMs_),
      products_(other.products_),
      qos_(other.qos_),
      qosOrder_(other.qosOrder_),
      revision_(other.revision_) {}

Catalog& Catalog::operator=(const Catalog& other) {
  if (this != &other) {
    Catalog copy(other);
    copy.subscribers_ = std::move(subscribers_);
    *this = std::move(copy);
  }
  return *this;
}

std::uint64_t Catalog::register_product(CloudProduct product) {
  validate_product(product);
  if (products_.count(product.productId)) {
    throw BrokerError(ErrorCode::DuplicateProduct, product.productId);
  }
  product.pricing = canonicalize_pricing(std::move(product.pricing));
  std::string id = product.productId;
  products_.emplace(id, std::move(product));
  ++revision_;
  notify({revision_, id, true});
  return revision_;
}

std::vector<EventPayload> Catalog::update_product(const std::string& productId,
                                                  const ProductPatch& patch) {
  auto it = products_.find(productId);
  if (it == products_.end()) {
    throw BrokerError(ErrorCode::UnknownProduct, productId);
  }
  CloudProduct updated = it->second;
  std::vector<EventPayload> events;

  if (patch.pricing) {
    validate_pricing(*patch.pricing);
    PricingPlan next = canonicalize_pricing(*patch.pricing);
    const PricingPlan& prev = updated.pricing;
    if (next.currency != prev.currency) {
      invalid("pricing.currency", "a product's currency cannot change; register a new product");
    }
    if (next.fixedFeePerMonth != prev.fixedFeePerMonth) {
      events.push_back(
          PriceChanged{productId, "fixedFeePerMonth", prev.fixedFeePerMonth, next.fixedFeePerMonth});
    }
    auto price_of = [](const PricingPlan& plan, const std::string& metric) {
      for (const auto& r : plan.rates) {
        if (r.metric == metric) return r.pricePerUnit;
      }
      return 0.0;
    };
    std::set<std::string> metrics;
    for (const auto& r : prev.rates) metrics.insert(r.metric);
    for (const auto& r : next.rates) metrics.insert(r.metric);
    for (const auto& m : metrics) {
      double before = price_of(prev, m);
      double after = price_of(next, m);
      auto had = std::any_of(prev.rates.begin(), prev.rates.end(),
                             [&](const Rate& r) { return r.metric == m; });
      auto has = std::any_of(next.rates.begin(), next.rates.end(),
                             [&](const Rate& r) { return r.metric == m; });
      if (before != after || had != has) {
        events.push_back(PriceChanged{productId, m, before, after});
      }
    }
    updated.pricing = std::move(next);
  }

  if (patch.sla) {
    validate_sla(*patch.sla);
    const SlaTerms& prev = updated.sla;
    const SlaTerms& next = *patch.sla;
    if (prev.availabilityPct != next.availabilityPct) {
      events.push_back(SlaChanged{productId, "availabilityPct", format_decimal(prev.availabilityPct),
                                  format_decimal(next.availabilityPct)});
    }
    if (prev.responseTimeMsP95 != next.responseTimeMsP95) {
      events.push_back(SlaChanged{productId, "responseTimeMsP95",
                                  format_decimal(prev.responseTimeMsP95),
                                  format_decimal(next.responseTimeMsP95)});
    }
    if (prev.securityAttrs != next.securityAttrs) {
      events.push_back(SlaChanged{productId, "securityAttrs", join(prev.securityAttrs),
                                  join(next.securityAttrs)});
    }
    updated.sla = next;
  }

  if (patch.techTags && *patch.techTags != updated.techTags) {
    TechnologyChanged change{productId, {}, {}};
    std::set_difference(patch.techTags->begin(), patch.techTags->end(), updated.techTags.begin(),
                        updated.techTags.end(),
                        std::inserter(change.addedTags, change.addedTags.end()));
    std::set_difference(updated.techTags.begin(), updated.techTags.end(), patch.techTags->begin(),
                        patch.techTags->end(),
                        std::inserter(change.removedTags, change.removedTags.end()));
    events.push_back(std::move(change));
    updated.techTags = *patch.techTags;
  }

  if (patch.status && *patch.status != updated.status) {
    if (*patch.status == ProductStatus::Active) {
      invalid("status", "withdrawn products cannot be reactivated");
    }
    events.push_back(ProductWithdrawn{productId});
    updated.status = *patch.status;
  }

  if (!events.empty()) {
    it->second = std::move(updated);
    ++revision_;
    notify({revision_, productId, false});
  }
  return events;
}

const CloudProduct* Catalog::find(const std::string& productId) const {
  auto it = products_.find(productId);
  return it == products_.end() ? nullptr : &it->second;
}

const CloudProduct& Catalog::get(const std::string& productId) const {
  const auto* p = find(productId);
  if (!p) {
    throw BrokerError(ErrorCode::UnknownProduct, productId);
  }
  return *p;
}

std::vector<const CloudProduct*> Catalog::list_products() const {
  std::vector<const CloudProduct*> out;
  out.reserve(products_.size());
  for (const auto& [id, p] : products_) {
    out.push_back(&p);
  }
  std::sort(out.begin(), out.end(), [](const CloudProduct* a, const CloudProduct* b) {
    if (a->marketVolumeRank != b->marketVolumeRank) {
      return a->marketVolumeRank < b->marketVolumeRank;
    }
    if (a->standards.size() != b->standards.size()) {
      return a->standards.size() > b->standards.size();
    }
    return a->productId < b->productId;
  });
  return out;
}

std::vector<const CloudProduct*> Catalog::candidates() const {
  auto all = list_products();
  std::erase_if(all, [](const CloudProduct* p) { return !p->active(); });
  return all;
}

QosAggregate Catalog::ingest_qos_report(const QosReport& report) {
  if (!products_.count(report.productId)) {
    throw BrokerError(ErrorCode::UnknownProduct, report.productId);
  }
  if (!std::isfinite(report.trustWeight) || report.trustWeight <= 0.0 || report.trustWeight > 1.0) {
    invalid("trustWeight", "must lie in (0, 1]");
  }
  if (!std::isfinite(report.value)) {
    invalid("value", "must be finite");
  }
  if (report.metric.empty()) {
    invalid("metric", "must not be empty");
  }
  auto& window = qos_[{report.productId, report.metric}];
  window.push_back({qosOrder_++, report});
  while (window.size() > kQosRetention) {
    window.pop_front();
  }
  return *qos_aggregate(report.productId, report.metric);
}

std::optional<QosAggregate> Catalog::qos_aggregate(const std::string& productId,
                                                   std::string_view metric) const {
  auto it = qos_.find({productId, std::string(metric)});
  if (it == qos_.end() || it->second.empty()) {
    return std::nullopt;
  }
  QosAggregate agg;
  double weighted = 0.0;
  double weights = 0.0;
  agg.min = it->second.front().report.value;
  agg.max = agg.min;
  for (const auto& stored : it->second) {
    const auto& r = stored.report;
    weighted += r.trustWeight * r.value;
    weights += r.trustWeight;
    agg.min = std::min(agg.min, r.value);
    agg.max = std::max(agg.max, r.value);
  }
  agg.count = it->second.size();
  // Rounding can push the quotient a hair outside the observed range.
  agg.mean = std::clamp(weighted / weights, agg.min, agg.max);
  return agg;
}

std::vector<QosReport> Catalog::qos_reports() const {
  std::vector<const StoredReport*> all;
  for (const auto& [key, window] : qos_) {
    for (const auto& s : window) {
      all.push_back(&s);
    }
  }
  std::sort(all.begin(), all.end(),
            [](const StoredReport* a, const StoredReport* b) { return a->order < b->order; });
  std::vector<QosReport> out;
  out.reserve(all.size());
  for (const auto* s : all) {
    out.push_back(s->report);
  }
  return out;
}

NormalizedOffer Catalog::normalize_offer(const CloudProduct& product,
                                         const WorkloadProfile& workload) const {
  std::optional<double> latency;
  if (auto agg = qos_aggregate(product.productId, kLatencyMetric)) {
    latency = agg->mean;
  }
  return cloudbroker::normalize_offer(product, workload, fx_, latency, refLatencyMs_);
}

void Catalog::subscribe(std::function<void(const CatalogChanged&)> subscriber) {
  subscribers_.push_back(std::move(subscriber));
}

void Catalog::notify(const CatalogChanged& change) {
  for (const auto& s : subscribers_) {
    s(change);
  }
}

void Catalog::set_fx_rate(const std::string& currency, double rate) {
  if (!std::isfinite(rate) || rate <= 0.0) {
    invalid("fx." + currency, "rate must be > 0");
  }
  fx_[currency] = rate;
}

void Catalog::set_ref_latency_ms(double ms) {
  if (!std::isfinite(ms) || ms <= 0.0) {
    invalid("refLatencyMs", "must be > 0");
  }
  refLatencyMs_ = ms;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

PricingPlan pricing_from_json(const json& doc) {
  PricingPlan plan;
  plan.currency = detail::get_string(doc, "currency");
  plan.fixedFeePerMonth = detail::get_decimal(doc, "fixedFeePerMonth");
  if (auto it = doc.find("rates"); it != doc.end()) {
    if (!it->is_array()) invalid("pricing.rates", "expected an array");
    for (const auto& r : *it) {
      plan.rates.push_back({detail::get_string(r, "metric"), detail::get_string(r, "unit"),
                            detail::get_decimal(r, "pricePerUnit")});
    }
  }
  return plan;
}

json to_json(const PricingPlan& plan) {
  json rates = json::array();
  for (const auto& r : plan.rates) {
    rates.push_back({{"metric", r.metric},
                     {"unit", r.unit},
                     {"pricePerUnit", format_decimal(r.pricePerUnit)}});
  }
  return {{"currency", plan.currency},
          {"fixedFeePerMonth", format_decimal(plan.fixedFeePerMonth)},
          {"rates", std::move(rates)}};
}

SlaTerms sla_from_json(const json& doc) {
  SlaTerms sla;
  sla.availabilityPct = detail::get_decimal(doc, "availabilityPct");
  sla.responseTimeMsP95 = detail::get_decimal(doc, "responseTimeMsP95");
  sla.securityAttrs = detail::get_string_set(doc, "securityAttrs");
  return sla;
}

json to_json(const SlaTerms& sla) {
  return {{"availabilityPct", format_decimal(sla.availabilityPct)},
          {"responseTimeMsP95", format_decimal(sla.responseTimeMsP95)},
          {"securityAttrs", detail::string_array(sla.securityAttrs)}};
}

ProductStatus status_from_string(const std::string& s) {
  if (s == "active") return ProductStatus::Active;
  if (s == "withdrawn") return ProductStatus::Withdrawn;
  invalid("status", "expected active or withdrawn");
}

std::set<std::string> parse_tags(const json& doc, const char* key) {
  return detail::get_string_set(doc, key);
}

}  // namespace

CloudProduct product_from_json(const json& doc) {
  CloudProduct p;
  p.productId = detail::get_string(doc, "productId");
  p.providerId = detail::get_string(doc, "providerId");
  auto type = detail::get_string(doc, "cloudType");
  auto ct = cloud_type_from_string(type);
  if (!ct) invalid("cloudType", "expected iaas, paas or saas");
  p.cloudType = *ct;
  for (const auto& s : detail::get_string_set(doc, "serviceTypes")) {
    if (s == "storage") p.serviceTypes.insert(ServiceType::Storage);
    else if (s == "compute") p.serviceTypes.insert(ServiceType::Compute);
    else if (s == "database") p.serviceTypes.insert(ServiceType::Database);
    else if (s == "messaging") p.serviceTypes.insert(ServiceType::Messaging);
    else invalid("serviceTypes", "unknown service type '" + s + "'");
  }
  p.regions = parse_tags(doc, "regions");
  p.techTags = parse_tags(doc, "techTags");
  p.pricing = pricing_from_json(detail::require(doc, "pricing"));
  p.sla = sla_from_json(detail::require(doc, "sla"));
  if (auto it = doc.find("endpoint"); it != doc.end() && !it->is_null()) {
    p.endpoint = detail::get_string(doc, "endpoint");
  }
  if (doc.contains("status")) {
    p.status = status_from_string(detail::get_string(doc, "status"));
  }
  auto rank = detail::get_integer(doc, "marketVolumeRank");
  if (rank < 1 || rank > 1'000'000'000) invalid("marketVolumeRank", "must be a positive integer");
  p.marketVolumeRank = static_cast<int>(rank);
  p.standards = parse_tags(doc, "standards");
  return p;
}

json to_json(const CloudProduct& p) {
  json services = json::array();
  for (auto s : p.serviceTypes) services.push_back(std::string(to_string(s)));
  json doc{{"productId", p.productId},
           {"providerId", p.providerId},
           {"cloudType", std::string(to_string(p.cloudType))},
           {"serviceTypes", std::move(services)},
           {"regions", detail::string_array(p.regions)},
           {"techTags", detail::string_array(p.techTags)},
           {"pricing", to_json(p.pricing)},
           {"sla", to_json(p.sla)},
           {"status", std::string(to_string(p.status))},
           {"marketVolumeRank", p.marketVolumeRank},
           {"standards", detail::string_array(p.standards)}};
  if (p.endpoint) doc["endpoint"] = *p.endpoint;
  return doc;
}

ProductPatch patch_from_json(const json& doc) {
  if (!doc.is_object()) invalid("patch", "expected an object");
  ProductPatch patch;
  for (const auto& [key, value] : doc.items()) {
    if (key == "pricing") patch.pricing = pricing_from_json(value);
    else if (key == "sla") patch.sla = sla_from_json(value);
    else if (key == "techTags") patch.techTags = parse_tags(doc, "techTags");
    else if (key == "status") patch.status = status_from_string(detail::get_string(doc, "status"));
    else invalid("patch." + key, "not a patchable facet (pricing, sla, techTags, status)");
  }
  return patch;
}

QosReport qos_report_from_json(const json& doc) {
  QosReport r;
  r.productId = detail::get_string(doc, "productId");
  r.region = doc.contains("region") ? detail::get_string(doc, "region") : std::string();
  r.metric = detail::get_string(doc, "metric");
  r.value = detail::get_decimal(doc, "value");
  r.sourceId = detail::get_string(doc, "sourceId");
  r.trustWeight = detail::get_decimal(doc, "trustWeight");
  r.timestamp = doc.contains("timestamp") ? detail::get_integer(doc, "timestamp") : 0;
  return r;
}

json to_json(const QosReport& r) {
  return {{"productId", r.productId},     {"region", r.region},
          {"metric", r.metric},           {"value", format_decimal(r.value)},
          {"sourceId", r.sourceId},       {"trustWeight", format_decimal(r.trustWeight)},
          {"timestamp", r.timestamp}};
}

WorkloadProfile workload_from_json(const json& doc) {
  WorkloadProfile w;
  const json& usage = detail::require(doc, "usage");
  if (!usage.is_object()) invalid("usage", "expected an object");
  for (const auto& [metric, value] : usage.items()) {
    double q = detail::decimal_value(value, "usage." + metric);
    if (q < 0.0) invalid("usage." + metric, "quantity must be >= 0");
    w.usage[metric] = q;
  }
  return w;
}

json to_json(const WorkloadProfile& w) {
  json usage = json::object();
  for (const auto& [m, q] : w.usage) usage[m] = format_decimal(q);
  return {{"usage", std::move(usage)}};
}

json to_json(const NormalizedOffer& o) {
  return {{"productId", o.productId},
          {"monthlyCost", format_decimal(o.monthlyCost)},
          {"perfScore", format_decimal(o.perfScore)},
          {"reliabilityScore", format_decimal(o.reliabilityScore)},
          {"securityScore", format_decimal(o.securityScore)},
          {"measured", o.measured}};
}

Catalog catalog_from_json(const json& doc) {
  if (!doc.is_object()) invalid("catalog", "expected an object");
  std::string ref = doc.contains("referenceCurrency")
                        ? detail::get_string(doc, "referenceCurrency")
                        : std::string("EUR");
  Catalog cat(ref);
  if (auto it = doc.find("fx"); it != doc.end()) {
    if (!it->is_object()) invalid("fx", "expected an object");
    for (const auto& [cur, rate] : it->items()) {
      cat.set_fx_rate(cur, detail::decimal_value(rate, "fx." + cur));
    }
  }
  if (auto it = doc.find("refLatencyMs"); it != doc.end()) {
    cat.set_ref_latency_ms(detail::decimal_value(*it, "refLatencyMs"));
  }
  if (auto it = doc.find("products"); it != doc.end()) {
    if (!it->is_array()) invalid("products", "expected an array");
    for (const auto& p : *it) {
      cat.register_product(product_from_json(p));
    }
  }
  if (auto it = doc.find("qosReports"); it != doc.end()) {
    if (!it->is_array()) invalid("qosReports", "expected an array");
    for (const auto& r : *it) {
      cat.ingest_qos_report(qos_report_from_json(r));
    }
  }
  return cat;
}

json to_json(const Catalog& cat) {
  json products = json::array();
  for (const auto* p : cat.list_products()) products.push_back(to_json(*p));
  json reports = json::array();
  for (const auto& r : cat.qos_reports()) reports.push_back(to_json(r));
  json fx = json::object();
  for (const auto& [cur, rate] : cat.fx()) fx[cur] = format_decimal(rate);
  return {{"products", std::move(products)},
          {"qosReports", std::move(reports)},
          {"fx", std::move(fx)},
          {"referenceCurrency", cat.reference_currency()},
          {"refLatencyMs", format_decimal(cat.ref_latency_ms())}};
}

}  // namespace cloudbroker
