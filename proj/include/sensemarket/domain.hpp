// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sensemarket/ids.hpp"
#include "sensemarket/time.hpp"

namespace sensemarket {

/// Money is integer cents everywhere.
using Cents = std::int64_t;
/// 1 bp = 0.01 %; 10000 bp = 100 %.
using BasisPoints = std::int32_t;
inline constexpr BasisPoints kFullBasisPoints = 10000;

enum class OwnershipCategory {
    PersonalHousehold,
    PrivateOrg,
    PublicOrg,
    CommercialProvider,
};

std::string_view to_string(OwnershipCategory category) noexcept;
OwnershipCategory ownership_category_from_string(std::string_view name);

/// Lowercase slash-separated location hierarchy, e.g. "au/act/canberra".
/// Containment is segment-wise prefix: "au/act" contains "au/act/canberra"
/// but "au/ac" does not. The empty tag contains everything.
class RegionTag {
public:
    RegionTag() = default;
    /// Normalizes case and surrounding slashes; rejects empty segments.
    explicit RegionTag(std::string_view text);

    [[nodiscard]] const std::string& str() const noexcept { return text_; }
    [[nodiscard]] bool empty() const noexcept { return text_.empty(); }
    [[nodiscard]] std::size_t depth() const noexcept;
    [[nodiscard]] bool contains(const RegionTag& other) const noexcept;
    [[nodiscard]] RegionTag truncated(std::size_t depth) const;

    friend bool operator==(const RegionTag&, const RegionTag&) = default;

private:
    std::string text_;
};

struct Coordinates {
    double latitude = 0.0;
    double longitude = 0.0;
    friend bool operator==(const Coordinates&, const Coordinates&) = default;
};

struct SensorOwner {
    OwnerId owner_id;
    OwnershipCategory category = OwnershipCategory::PersonalHousehold;
    std::string display_name;
    std::set<VendorId> vendor_affinities;
    std::map<VendorId, Cents> expected_monthly_spend_cents;
    std::string notification_address;

    friend bool operator==(const SensorOwner&, const SensorOwner&) = default;
};

/// Throws invalid-argument on a bad id or negative spend.
void validate(const SensorOwner& owner);

struct SensorDescriptor {
    SensorId sensor_id;
    DeviceId device_id;
    OwnerId owner_id; // empty until the device is claimed
    std::string local_name;
    std::string phenomenon;
    std::string unit;
    RegionTag location;
    std::optional<Coordinates> coordinates;
    double sampling_period_s = 1.0;
    PublisherId publisher_id;

    friend bool operator==(const SensorDescriptor&, const SensorDescriptor&) = default;
};

struct MonthlyFee {
    Cents amount_cents = 0;
    friend bool operator==(const MonthlyFee&, const MonthlyFee&) = default;
};

struct PurchaseDiscount {
    BasisPoints basis_points = 0;
    VendorId vendor_id;
    friend bool operator==(const PurchaseDiscount&, const PurchaseDiscount&) = default;
};

using CompensationOption = std::variant<MonthlyFee, PurchaseDiscount>;

/// Amounts strictly positive; discount in (0, 10000] bp with a vendor.
void validate(const CompensationOption& option);

/// "$2.00/month" or "3% discount at DairyIceCream"; lossless for cents and bp.
std::string describe(const CompensationOption& option);

/// Monthly worth of an option to a particular owner. A discount is valued at
/// floor(bp * expected monthly spend at that vendor / 10000); no recorded
/// spend values it at 0.
Cents normalized_monthly_value(const CompensationOption& option, const SensorOwner& owner);

/// Index of the option the owner takes. Discounts at vendors the owner has an
/// affinity for win first (highest value among them); otherwise the highest
/// normalized value. Ties go to the lowest index. Throws invalid-argument on
/// an empty list.
std::size_t preferred_option_index(std::span<const CompensationOption> options, const SensorOwner& owner);

const CompensationOption& preferred_option(std::span<const CompensationOption> options, const SensorOwner& owner);

/// Signed statement from the broker's authority binding a consumer to its
/// organization and category until expires_at.
struct Certificate {
    std::string issuer;
    ConsumerId subject;
    std::string organization_name;
    std::string consumer_category;
    Timestamp expires_at{};
    std::vector<std::uint8_t> signature;

    friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct ConsumerIdentity {
    ConsumerId consumer_id;
    std::string organization_name;
    std::string consumer_category;
    Certificate certificate;

    friend bool operator==(const ConsumerIdentity&, const ConsumerIdentity&) = default;
};

struct Window {
    Timestamp start{};
    Timestamp end{};

    [[nodiscard]] bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
    friend bool operator==(const Window&, const Window&) = default;
};

} // namespace sensemarket
