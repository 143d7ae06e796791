// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/codec.hpp"

namespace sensemarket {

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw MarketError(ErrorCode::InvalidArgument, std::string("invalid JSON: ") + e.what());
    }
}

void to_json(json& j, OwnershipCategory v) { j = std::string(to_string(v)); }
void from_json(const json& j, OwnershipCategory& v) { v = ownership_category_from_string(j.get<std::string>()); }

void to_json(json& j, const RegionTag& v) { j = v.str(); }
void from_json(const json& j, RegionTag& v) { v = RegionTag(j.get<std::string>()); }

void to_json(json& j, const Coordinates& v) { j = json{{"lat", v.latitude}, {"lon", v.longitude}}; }
void from_json(const json& j, Coordinates& v) {
    j.at("lat").get_to(v.latitude);
    j.at("lon").get_to(v.longitude);
}

void to_json(json& j, const SensorOwner& v) {
    json spend = json::object();
    for (const auto& [vendor, cents] : v.expected_monthly_spend_cents) spend[vendor.str()] = cents;
    j = json{{"owner_id", v.owner_id},
             {"category", v.category},
             {"display_name", v.display_name},
             {"vendor_affinities", v.vendor_affinities},
             {"expected_monthly_spend_cents", std::move(spend)},
             {"notification_address", v.notification_address}};
}
void from_json(const json& j, SensorOwner& v) {
    j.at("owner_id").get_to(v.owner_id);
    v.category = j.value("category", OwnershipCategory::PersonalHousehold);
    v.display_name = j.value("display_name", std::string{});
    v.vendor_affinities.clear();
    if (j.contains("vendor_affinities"))
        for (const auto& vendor : j.at("vendor_affinities")) v.vendor_affinities.insert(vendor.get<VendorId>());
    v.expected_monthly_spend_cents.clear();
    if (j.contains("expected_monthly_spend_cents"))
        for (const auto& [vendor, cents] : j.at("expected_monthly_spend_cents").items())
            v.expected_monthly_spend_cents[VendorId{vendor}] = cents.get<Cents>();
    v.notification_address = j.value("notification_address", std::string{});
}

void to_json(json& j, const SensorDescriptor& v) {
    j = json{{"sensor_id", v.sensor_id},   {"device_id", v.device_id},
             {"owner_id", v.owner_id},     {"local_name", v.local_name},
             {"phenomenon", v.phenomenon}, {"unit", v.unit},
             {"location", v.location},     {"sampling_period_s", v.sampling_period_s},
             {"publisher_id", v.publisher_id}};
    put_optional(j, "coordinates", v.coordinates);
}
void from_json(const json& j, SensorDescriptor& v) {
    j.at("sensor_id").get_to(v.sensor_id);
    j.at("device_id").get_to(v.device_id);
    v.owner_id = j.value("owner_id", OwnerId{});
    v.local_name = j.value("local_name", std::string{});
    j.at("phenomenon").get_to(v.phenomenon);
    v.unit = j.value("unit", std::string{});
    j.at("location").get_to(v.location);
    v.coordinates = get_optional<Coordinates>(j, "coordinates");
    v.sampling_period_s = j.value("sampling_period_s", 1.0);
    j.at("publisher_id").get_to(v.publisher_id);
}

void to_json(json& j, const CompensationOption& v) {
    if (const auto* fee = std::get_if<MonthlyFee>(&v)) {
        j = json{{"type", "monthly_fee"}, {"amount_cents", fee->amount_cents}};
    } else {
        const auto& d = std::get<PurchaseDiscount>(v);
        j = json{{"type", "purchase_discount"}, {"basis_points", d.basis_points}, {"vendor_id", d.vendor_id}};
    }
}
void from_json(const json& j, CompensationOption& v) {
    const auto type = j.at("type").get<std::string>();
    if (type == "monthly_fee") {
        v = MonthlyFee{j.at("amount_cents").get<Cents>()};
    } else if (type == "purchase_discount") {
        v = PurchaseDiscount{j.at("basis_points").get<BasisPoints>(), j.at("vendor_id").get<VendorId>()};
    } else {
        fail(ErrorCode::InvalidArgument, "unknown compensation option type: " + type);
    }
    validate(v);
}

void to_json(json& j, const Certificate& v) {
    j = json{{"issuer", v.issuer},
             {"subject", v.subject},
             {"organization_name", v.organization_name},
             {"consumer_category", v.consumer_category},
             {"expires_at", v.expires_at},
             {"signature", to_hex(v.signature)}};
}
void from_json(const json& j, Certificate& v) {
    j.at("issuer").get_to(v.issuer);
    j.at("subject").get_to(v.subject);
    j.at("organization_name").get_to(v.organization_name);
    j.at("consumer_category").get_to(v.consumer_category);
    j.at("expires_at").get_to(v.expires_at);
    v.signature = from_hex(j.at("signature").get<std::string>());
}

void to_json(json& j, const ConsumerIdentity& v) {
    j = json{{"consumer_id", v.consumer_id},
             {"organization_name", v.organization_name},
             {"consumer_category", v.consumer_category},
             {"certificate", v.certificate},
             {"certificate_token", encode_certificate_token(v.certificate)}};
}
void from_json(const json& j, ConsumerIdentity& v) {
    j.at("consumer_id").get_to(v.consumer_id);
    j.at("organization_name").get_to(v.organization_name);
    j.at("consumer_category").get_to(v.consumer_category);
    j.at("certificate").get_to(v.certificate);
}

void to_json(json& j, const Window& v) { j = json{{"start", v.start}, {"end", v.end}}; }
void from_json(const json& j, Window& v) {
    j.at("start").get_to(v.start);
    j.at("end").get_to(v.end);
}

void to_json(json& j, const AnnouncedSensor& v) {
    j = json{{"local_name", v.local_name},
             {"phenomenon", v.phenomenon},
             {"unit", v.unit},
             {"sampling_period_s", v.sampling_period_s}};
}
void from_json(const json& j, AnnouncedSensor& v) {
    j.at("local_name").get_to(v.local_name);
    j.at("phenomenon").get_to(v.phenomenon);
    v.unit = j.value("unit", std::string{});
    v.sampling_period_s = j.value("sampling_period_s", 1.0);
}

void to_json(json& j, const DeviceAnnouncement& v) {
    j = json{{"device_id", v.device_id},
             {"sensors", v.sensors},
             {"network_info", v.network_info},
             {"location", v.location}};
    put_optional(j, "owner_hint", v.owner_hint);
    put_optional(j, "coordinates", v.coordinates);
}
void from_json(const json& j, DeviceAnnouncement& v) {
    j.at("device_id").get_to(v.device_id);
    v.owner_hint = get_optional<OwnerId>(j, "owner_hint");
    j.at("sensors").get_to(v.sensors);
    v.network_info = j.value("network_info", std::string{});
    j.at("location").get_to(v.location);
    v.coordinates = get_optional<Coordinates>(j, "coordinates");
}

void to_json(json& j, const PendingRegistration& v) {
    j = json{{"device_id", v.device_id},
             {"sensor_ids", v.sensor_ids},
             {"announced_at", v.announced_at},
             {"device_token", v.device_token},
             {"state", "awaiting-owner-decision"}};
    put_optional(j, "owner_id", v.owner_id);
}
void from_json(const json& j, PendingRegistration& v) {
    j.at("device_id").get_to(v.device_id);
    v.owner_id = get_optional<OwnerId>(j, "owner_id");
    j.at("sensor_ids").get_to(v.sensor_ids);
    j.at("announced_at").get_to(v.announced_at);
    v.device_token = j.value("device_token", std::string{});
}

void to_json(json& j, const PublicationPolicy& v) {
    j = json{{"policy_id", v.policy_id},
             {"owner_id", v.owner_id},
             {"sensor_ids", v.sensor_ids},
             {"allowed_consumer_categories", v.allowed_consumer_categories},
             {"reserve_cents", v.reserve_cents},
             {"auto_accept", v.auto_accept},
             {"published", v.published}};
}
void from_json(const json& j, PublicationPolicy& v) {
    v.policy_id = j.value("policy_id", PolicyId{});
    v.owner_id = j.value("owner_id", OwnerId{});
    j.at("sensor_ids").get_to(v.sensor_ids);
    v.allowed_consumer_categories = j.value("allowed_consumer_categories", std::set<std::string>{});
    v.reserve_cents = j.value("reserve_cents", Cents{0});
    v.auto_accept = j.value("auto_accept", false);
    v.published = j.value("published", false);
}

void to_json(json& j, const CatalogQuery& v) {
    j = json{{"region", v.region_prefix}};
    put_optional(j, "phenomenon", v.phenomenon);
    put_optional(j, "group", v.group);
}
void from_json(const json& j, CatalogQuery& v) {
    v.phenomenon = get_optional<std::string>(j, "phenomenon");
    v.group = get_optional<std::string>(j, "group");
    v.region_prefix = j.value("region", RegionTag{});
}

void to_json(json& j, const PublishedSensor& v) {
    j = json{{"descriptor", v.descriptor}, {"allowed_consumer_categories", v.allowed_consumer_categories}};
}
void from_json(const json& j, PublishedSensor& v) {
    j.at("descriptor").get_to(v.descriptor);
    v.allowed_consumer_categories = j.value("allowed_consumer_categories", std::set<std::string>{});
}

void to_json(json& j, OfferStatus v) { j = std::string(to_string(v)); }
void from_json(const json& j, OfferStatus& v) { v = offer_status_from_string(j.get<std::string>()); }

void to_json(json& j, const OfferRequest& v) {
    j = json{{"sensor_ids", v.sensor_ids}, {"options", v.options}};
    put_optional(j, "term_days", v.term_days);
    put_optional(j, "expires_at", v.expires_at);
    put_optional(j, "via_esp", v.via_esp);
}
void from_json(const json& j, OfferRequest& v) {
    j.at("sensor_ids").get_to(v.sensor_ids);
    j.at("options").get_to(v.options);
    v.term_days = get_optional<int>(j, "term_days");
    v.expires_at = get_optional<Timestamp>(j, "expires_at");
    v.via_esp = get_optional<EspId>(j, "via_esp");
}

void to_json(json& j, const Offer& v) {
    j = json{{"offer_id", v.offer_id},
             {"consumer_id", v.consumer_id},
             {"consumer_category", v.consumer_category},
             {"sensor_ids", v.sensor_ids},
             {"options", v.options},
             {"term_days", v.term_days},
             {"submitted_at", v.submitted_at},
             {"expires_at", v.expires_at},
             {"status", v.status},
             {"owner_id", v.owner_id},
             {"publisher_id", v.publisher_id},
             {"sequence", v.sequence}};
    put_optional(j, "via_esp", v.via_esp);
}
void from_json(const json& j, Offer& v) {
    j.at("offer_id").get_to(v.offer_id);
    j.at("consumer_id").get_to(v.consumer_id);
    v.consumer_category = j.value("consumer_category", std::string{});
    v.via_esp = get_optional<EspId>(j, "via_esp");
    j.at("sensor_ids").get_to(v.sensor_ids);
    j.at("options").get_to(v.options);
    j.at("term_days").get_to(v.term_days);
    j.at("submitted_at").get_to(v.submitted_at);
    j.at("expires_at").get_to(v.expires_at);
    j.at("status").get_to(v.status);
    j.at("owner_id").get_to(v.owner_id);
    j.at("publisher_id").get_to(v.publisher_id);
    v.sequence = j.value("sequence", std::uint64_t{0});
}

void to_json(json& j, const AgreementParties& v) {
    j = json{{"owner_id", v.owner_id}, {"consumer_id", v.consumer_id}, {"publisher_id", v.publisher_id}};
    put_optional(j, "esp_id", v.esp_id);
}
void from_json(const json& j, AgreementParties& v) {
    j.at("owner_id").get_to(v.owner_id);
    j.at("consumer_id").get_to(v.consumer_id);
    j.at("publisher_id").get_to(v.publisher_id);
    v.esp_id = get_optional<EspId>(j, "esp_id");
}

void to_json(json& j, const Agreement& v) {
    j = json{{"agreement_id", v.agreement_id},
             {"offer_id", v.offer_id},
             {"chosen_index", v.chosen_index},
             {"chosen_option", v.chosen_option},
             {"sensor_ids", v.sensor_ids},
             {"term_days", v.term_days},
             {"window", v.window},
             {"parties", v.parties}};
    put_optional(j, "cancelled_at", v.cancelled_at);
}
void from_json(const json& j, Agreement& v) {
    j.at("agreement_id").get_to(v.agreement_id);
    j.at("offer_id").get_to(v.offer_id);
    j.at("chosen_index").get_to(v.chosen_index);
    j.at("chosen_option").get_to(v.chosen_option);
    j.at("sensor_ids").get_to(v.sensor_ids);
    j.at("term_days").get_to(v.term_days);
    j.at("window").get_to(v.window);
    j.at("parties").get_to(v.parties);
    v.cancelled_at = get_optional<Timestamp>(j, "cancelled_at");
}

void to_json(json& j, const Bid& v) {
    j = json{{"offer_id", v.offer_id},
             {"submitted_at", v.submitted_at},
             {"best_value_cents", v.best_value},
             {"best_option", v.best_option}};
}

void to_json(json& j, const CompetitionOutcome& v) {
    j = json{{"ranking", v.ranking}, {"below_reserve", v.below_reserve}};
    j["winner"] = v.winner ? json(*v.winner) : json(nullptr);
}

json reading_value_to_json(const ReadingValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return std::get<std::string>(v);
}

ReadingValue reading_value_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    fail(ErrorCode::InvalidArgument, "reading value must be a number or an event token");
}

void to_json(json& j, const Reading& v) {
    j = json{{"sensor_id", v.sensor_id}, {"ts", v.ts}, {"value", reading_value_to_json(v.value)}};
    put_optional(j, "quality", v.quality);
}
void from_json(const json& j, Reading& v) {
    j.at("sensor_id").get_to(v.sensor_id);
    j.at("ts").get_to(v.ts);
    v.value = reading_value_from_json(j.at("value"));
    v.quality = get_optional<double>(j, "quality");
    if (v.quality && (*v.quality < 0.0 || *v.quality > 1.0))
        fail(ErrorCode::InvalidArgument, "reading quality must be within [0, 1]");
}

void to_json(json& j, const AnonymizedReading& v) {
    j = json{{"sensor_id", v.sensor_id},     {"ts", v.ts},
             {"value", reading_value_to_json(v.value)},
             {"owner_token", v.owner_token}, {"region", v.region},
             {"phenomenon", v.phenomenon},   {"unit", v.unit}};
    put_optional(j, "quality", v.quality);
}
void from_json(const json& j, AnonymizedReading& v) {
    j.at("sensor_id").get_to(v.sensor_id);
    j.at("ts").get_to(v.ts);
    v.value = reading_value_from_json(j.at("value"));
    v.quality = get_optional<double>(j, "quality");
    j.at("owner_token").get_to(v.owner_token);
    j.at("region").get_to(v.region);
    j.at("phenomenon").get_to(v.phenomenon);
    j.at("unit").get_to(v.unit);
}

void to_json(json& j, const IngestResult& v) {
    json rejected = json::array();
    for (const auto& r : v.rejected)
        rejected.push_back({{"index", r.index}, {"error", to_string(r.code)}, {"reason", r.reason}});
    j = json{{"accepted", v.accepted}, {"rejected", std::move(rejected)}};
}

void to_json(json& j, const LedgerEntry& v) {
    j = json{{"entry_id", v.entry_id},
             {"ts", v.ts},
             {"debit_account", v.debit_account},
             {"credit_account", v.credit_account},
             {"amount_cents", v.amount_cents},
             {"reason", std::string(to_string(v.reason))},
             {"agreement_id", v.agreement_id}};
    put_optional(j, "cycle_index", v.cycle_index);
}
void from_json(const json& j, LedgerEntry& v) {
    j.at("entry_id").get_to(v.entry_id);
    j.at("ts").get_to(v.ts);
    j.at("debit_account").get_to(v.debit_account);
    j.at("credit_account").get_to(v.credit_account);
    j.at("amount_cents").get_to(v.amount_cents);
    v.reason = entry_reason_from_string(j.at("reason").get<std::string>());
    j.at("agreement_id").get_to(v.agreement_id);
    v.cycle_index = get_optional<std::uint32_t>(j, "cycle_index");
}

void to_json(json& j, const Account& v) {
    j = json{{"account_id", v.account_id}, {"role", std::string(to_string(v.role))}, {"balance_cents", v.balance_cents}};
}

void to_json(json& j, const CostComparison& v) {
    j = json{{"respondents", v.respondents},
             {"traditional_total_cents", v.traditional_total_cents},
             {"traditional_per_response_cents", v.traditional_per_response_cents},
             {"traditional_remainder_cents", v.traditional_remainder_cents},
             {"automated_per_response_cents", v.automated_per_response_cents},
             {"automated_total_cents", v.automated_total_cents},
             {"ratio_numerator", v.ratio_numerator},
             {"ratio_denominator", v.ratio_denominator},
             {"ratio", v.ratio()}};
}

void to_json(json& j, const PaybackReport& v) {
    j = json{{"owner_id", v.owner_id},
             {"premium_cents", v.premium_cents},
             {"horizon_months", v.horizon_months},
             {"origin", v.origin},
             {"monthly_credits_cents", v.monthly_credits},
             {"within_threshold", v.within_threshold},
             {"threshold_months", kPaybackThresholdMonths}};
    j["months"] = v.months ? json(*v.months) : json("not reached");
}

void to_json(json& j, const SensorConstraints& v) {
    j = json{{"terms", v.terms}, {"region", v.region_prefix}};
    put_optional(j, "phenomenon_group", v.phenomenon_group);
    put_optional(j, "max_monthly_budget_cents", v.max_monthly_budget_cents);
    put_optional(j, "min_sampling_period_s", v.min_sampling_period_s);
}
void from_json(const json& j, SensorConstraints& v) {
    v.phenomenon_group = get_optional<std::string>(j, "phenomenon_group");
    v.terms = j.value("terms", std::vector<std::string>{});
    v.region_prefix = j.value("region", RegionTag{});
    v.max_monthly_budget_cents = get_optional<Cents>(j, "max_monthly_budget_cents");
    v.min_sampling_period_s = get_optional<double>(j, "min_sampling_period_s");
}

void to_json(json& j, const Requirement& v) {
    j = v.constraints;
    j["requirement_id"] = v.requirement_id;
    j["consumer_id"] = v.consumer_id;
}
void from_json(const json& j, Requirement& v) {
    v.requirement_id = j.value("requirement_id", RequirementId{});
    v.consumer_id = j.value("consumer_id", ConsumerId{});
    j.get_to(v.constraints);
}

void to_json(json& j, const InterestRegistration& v) {
    j = json{{"interest_id", v.interest_id},
             {"consumer_id", v.consumer_id},
             {"consumer_category", v.consumer_category},
             {"constraints", v.constraints},
             {"active", v.active}};
}
void from_json(const json& j, InterestRegistration& v) {
    j.at("interest_id").get_to(v.interest_id);
    j.at("consumer_id").get_to(v.consumer_id);
    v.consumer_category = j.value("consumer_category", std::string{});
    j.at("constraints").get_to(v.constraints);
    v.active = j.value("active", true);
}

void to_json(json& j, const PlanEntry& v) { j = json{{"publisher_id", v.publisher_id}, {"sensors", v.sensors}}; }
void from_json(const json& j, PlanEntry& v) {
    j.at("publisher_id").get_to(v.publisher_id);
    j.at("sensors").get_to(v.sensors);
}

void to_json(json& j, const Plan& v) {
    j = json{{"entries", v.entries}, {"degraded", v.degraded}, {"unreachable", v.unreachable}};
}
void from_json(const json& j, Plan& v) {
    j.at("entries").get_to(v.entries);
    v.degraded = j.value("degraded", false);
    v.unreachable = j.value("unreachable", std::vector<PublisherId>{});
}

void to_json(json& j, const AcquireOutcome& v) {
    j = json{{"publisher_id", v.publisher_id}, {"owner_id", v.owner_id}, {"sensor_ids", v.sensor_ids}};
    if (v.offer) j["offer"] = *v.offer;
    if (v.error) {
        j["error"] = std::string(to_string(*v.error));
        j["message"] = v.message;
    }
}

void to_json(json& j, const InterestNotification& v) {
    j = json{{"seq", v.seq},
             {"interest_id", v.interest_id},
             {"consumer_id", v.consumer_id},
             {"publisher_id", v.publisher_id},
             {"sensor", v.sensor},
             {"at", v.at}};
}
void from_json(const json& j, InterestNotification& v) {
    j.at("seq").get_to(v.seq);
    j.at("interest_id").get_to(v.interest_id);
    j.at("consumer_id").get_to(v.consumer_id);
    j.at("publisher_id").get_to(v.publisher_id);
    j.at("sensor").get_to(v.sensor);
    j.at("at").get_to(v.at);
}

void to_json(json& j, const Notification& v) {
    j = json{{"seq", v.seq}, {"recipient", v.recipient}, {"kind", v.kind}, {"at", v.at}, {"payload", v.payload}};
}

} // namespace sensemarket
