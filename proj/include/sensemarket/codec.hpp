// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

// JSON wire and file forms of the domain types. Timestamps are RFC 3339 UTC
// strings; money is integer cents; missing optional fields are omitted.

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sensemarket/data_plane.hpp"
#include "sensemarket/domain.hpp"
#include "sensemarket/esp.hpp"
#include "sensemarket/journal.hpp"
#include "sensemarket/ledger.hpp"
#include "sensemarket/negotiation.hpp"
#include "sensemarket/registry.hpp"

namespace nlohmann {
template <>
struct adl_serializer<sensemarket::Timestamp> {
    static void to_json(json& j, const sensemarket::Timestamp& ts) { j = sensemarket::to_rfc3339(ts); }
    static void from_json(const json& j, sensemarket::Timestamp& ts) {
        ts = sensemarket::parse_rfc3339(j.get<std::string>());
    }
};
} // namespace nlohmann

namespace sensemarket {

using nlohmann::json;

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
    if (value) j[key] = *value;
}

template <class T>
std::optional<T> get_optional(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->template get<T>();
}

/// Parses a request body into T, mapping any JSON error to invalid-argument.
template <class T>
T decode(const json& j) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw MarketError(ErrorCode::InvalidArgument, std::string("malformed request: ") + e.what());
    }
}

json parse_json(std::string_view text);

void to_json(json& j, OwnershipCategory v);
void from_json(const json& j, OwnershipCategory& v);
void to_json(json& j, const RegionTag& v);
void from_json(const json& j, RegionTag& v);
void to_json(json& j, const Coordinates& v);
void from_json(const json& j, Coordinates& v);
void to_json(json& j, const SensorOwner& v);
void from_json(const json& j, SensorOwner& v);
void to_json(json& j, const SensorDescriptor& v);
void from_json(const json& j, SensorDescriptor& v);
void to_json(json& j, const CompensationOption& v);
void from_json(const json& j, CompensationOption& v);
void to_json(json& j, const Certificate& v);
void from_json(const json& j, Certificate& v);
void to_json(json& j, const ConsumerIdentity& v);
void from_json(const json& j, ConsumerIdentity& v);
void to_json(json& j, const Window& v);
void from_json(const json& j, Window& v);

void to_json(json& j, const AnnouncedSensor& v);
void from_json(const json& j, AnnouncedSensor& v);
void to_json(json& j, const DeviceAnnouncement& v);
void from_json(const json& j, DeviceAnnouncement& v);
void to_json(json& j, const PendingRegistration& v);
void from_json(const json& j, PendingRegistration& v);
void to_json(json& j, const PublicationPolicy& v);
void from_json(const json& j, PublicationPolicy& v);
void to_json(json& j, const CatalogQuery& v);
void from_json(const json& j, CatalogQuery& v);
void to_json(json& j, const PublishedSensor& v);
void from_json(const json& j, PublishedSensor& v);

void to_json(json& j, OfferStatus v);
void from_json(const json& j, OfferStatus& v);
void to_json(json& j, const OfferRequest& v);
void from_json(const json& j, OfferRequest& v);
void to_json(json& j, const Offer& v);
void from_json(const json& j, Offer& v);
void to_json(json& j, const AgreementParties& v);
void from_json(const json& j, AgreementParties& v);
void to_json(json& j, const Agreement& v);
void from_json(const json& j, Agreement& v);
void to_json(json& j, const Bid& v);
void to_json(json& j, const CompetitionOutcome& v);

json reading_value_to_json(const ReadingValue& v);
ReadingValue reading_value_from_json(const json& j);
void to_json(json& j, const Reading& v);
void from_json(const json& j, Reading& v);
void to_json(json& j, const AnonymizedReading& v);
void from_json(const json& j, AnonymizedReading& v);
void to_json(json& j, const IngestResult& v);

void to_json(json& j, const LedgerEntry& v);
void from_json(const json& j, LedgerEntry& v);
void to_json(json& j, const Account& v);
void to_json(json& j, const CostComparison& v);
void to_json(json& j, const PaybackReport& v);

void to_json(json& j, const SensorConstraints& v);
void from_json(const json& j, SensorConstraints& v);
void to_json(json& j, const Requirement& v);
void from_json(const json& j, Requirement& v);
void to_json(json& j, const InterestRegistration& v);
void from_json(const json& j, InterestRegistration& v);
void to_json(json& j, const PlanEntry& v);
void from_json(const json& j, PlanEntry& v);
void to_json(json& j, const Plan& v);
void from_json(const json& j, Plan& v);
void to_json(json& j, const AcquireOutcome& v);
void to_json(json& j, const InterestNotification& v);
void from_json(const json& j, InterestNotification& v);
void to_json(json& j, const Notification& v);

} // namespace sensemarket
