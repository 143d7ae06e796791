// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

namespace sensemarket {

/// Opaque identifier tagged by the entity it names, so a SensorId cannot be
/// passed where an OwnerId is expected.
template <class Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string value) : value_(std::move(value)) {}

    [[nodiscard]] const std::string& str() const noexcept { return value_; }
    [[nodiscard]] bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const Id&, const Id&) = default;
    friend bool operator==(const Id&, const Id&) = default;

    friend void to_json(nlohmann::json& j, const Id& id) { j = id.value_; }
    friend void from_json(const nlohmann::json& j, Id& id) { id.value_ = j.get<std::string>(); }

private:
    std::string value_;
};

using OwnerId = Id<struct OwnerTag>;
using DeviceId = Id<struct DeviceTag>;
using SensorId = Id<struct SensorTag>;
using PublisherId = Id<struct PublisherTag>;
using EspId = Id<struct EspTag>;
using ConsumerId = Id<struct ConsumerTag>;
using VendorId = Id<struct VendorTag>;
using PolicyId = Id<struct PolicyTag>;
using OfferId = Id<struct OfferTag>;
using AgreementId = Id<struct AgreementTag>;
using InterestId = Id<struct InterestTag>;
using RequirementId = Id<struct RequirementTag>;

/// Identifiers travel in URL paths and file names: [A-Za-z0-9._-]+, at most 128 chars.
bool is_valid_identifier(std::string_view text) noexcept;

} // namespace sensemarket

template <class Tag>
struct std::hash<sensemarket::Id<Tag>> {
    std::size_t operator()(const sensemarket::Id<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
