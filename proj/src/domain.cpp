// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "sensemarket/error.hpp"

namespace sensemarket {

std::string_view to_string(OwnershipCategory category) noexcept {
    switch (category) {
    case OwnershipCategory::PersonalHousehold: return "personal-household";
    case OwnershipCategory::PrivateOrg: return "private-org";
    case OwnershipCategory::PublicOrg: return "public-org";
    case OwnershipCategory::CommercialProvider: return "commercial-provider";
    }
    return "personal-household";
}

OwnershipCategory ownership_category_from_string(std::string_view name) {
    for (auto c : {OwnershipCategory::PersonalHousehold, OwnershipCategory::PrivateOrg, OwnershipCategory::PublicOrg,
                   OwnershipCategory::CommercialProvider})
        if (to_string(c) == name) return c;
    fail(ErrorCode::InvalidArgument, "unknown ownership category: " + std::string(name));
}

RegionTag::RegionTag(std::string_view text) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto first = lowered.find_first_not_of('/');
    auto last = lowered.find_last_not_of('/');
    if (first == std::string::npos) return;
    lowered = lowered.substr(first, last - first + 1);
    if (lowered.find("//") != std::string::npos)
        fail(ErrorCode::InvalidArgument, "region tag has an empty segment: " + std::string(text));
    if (lowered.find_first_of(" \t\r\n") != std::string::npos)
        fail(ErrorCode::InvalidArgument, "region tag contains whitespace: " + std::string(text));
    text_ = std::move(lowered);
}

std::size_t RegionTag::depth() const noexcept {
    if (text_.empty()) return 0;
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.end(), '/'));
}

bool RegionTag::contains(const RegionTag& other) const noexcept {
    if (text_.empty()) return true;
    if (other.text_.size() < text_.size()) return false;
    if (other.text_.compare(0, text_.size(), text_) != 0) return false;
    return other.text_.size() == text_.size() || other.text_[text_.size()] == '/';
}

RegionTag RegionTag::truncated(std::size_t depth) const {
    if (depth == 0) return RegionTag{};
    std::size_t pos = 0;
    for (std::size_t seen = 0; seen < depth; ++seen) {
        pos = text_.find('/', pos);
        if (pos == std::string::npos) return *this;
        if (seen + 1 < depth) ++pos;
    }
    return RegionTag(std::string_view(text_).substr(0, pos));
}

void validate(const SensorOwner& owner) {
    require(is_valid_identifier(owner.owner_id.str()), ErrorCode::InvalidArgument,
            "invalid owner id: '" + owner.owner_id.str() + "'");
    for (const auto& [vendor, spend] : owner.expected_monthly_spend_cents)
        require(spend >= 0, ErrorCode::InvalidArgument, "negative expected spend for vendor " + vendor.str());
}

void validate(const CompensationOption& option) {
    if (const auto* fee = std::get_if<MonthlyFee>(&option)) {
        require(fee->amount_cents > 0, ErrorCode::InvalidArgument, "monthly fee must be positive");
        return;
    }
    const auto& discount = std::get<PurchaseDiscount>(option);
    require(discount.basis_points > 0 && discount.basis_points <= kFullBasisPoints, ErrorCode::InvalidArgument,
            "discount must be in (0, 10000] basis points");
    require(!discount.vendor_id.empty(), ErrorCode::InvalidArgument, "discount needs a vendor");
}

std::string describe(const CompensationOption& option) {
    char buf[96];
    if (const auto* fee = std::get_if<MonthlyFee>(&option)) {
        std::snprintf(buf, sizeof buf, "$%lld.%02lld/month", static_cast<long long>(fee->amount_cents / 100),
                      static_cast<long long>(fee->amount_cents % 100));
        return buf;
    }
    const auto& d = std::get<PurchaseDiscount>(option);
    if (d.basis_points % 100 == 0)
        std::snprintf(buf, sizeof buf, "%d%% discount", d.basis_points / 100);
    else
        std::snprintf(buf, sizeof buf, "%d.%02d%% discount", d.basis_points / 100, d.basis_points % 100);
    return std::string(buf) + " at " + d.vendor_id.str();
}

Cents normalized_monthly_value(const CompensationOption& option, const SensorOwner& owner) {
    if (const auto* fee = std::get_if<MonthlyFee>(&option)) return fee->amount_cents;
    const auto& discount = std::get<PurchaseDiscount>(option);
    auto it = owner.expected_monthly_spend_cents.find(discount.vendor_id);
    if (it == owner.expected_monthly_spend_cents.end()) return 0;
    return static_cast<Cents>(discount.basis_points) * it->second / kFullBasisPoints;
}

std::size_t preferred_option_index(std::span<const CompensationOption> options, const SensorOwner& owner) {
    require(!options.empty(), ErrorCode::InvalidArgument, "no compensation options to choose from");

    auto favoured = [&](const CompensationOption& option) {
        const auto* d = std::get_if<PurchaseDiscount>(&option);
        return d != nullptr && owner.vendor_affinities.contains(d->vendor_id);
    };
    const bool any_favoured = std::any_of(options.begin(), options.end(), favoured);

    std::size_t best = options.size();
    Cents best_value = 0;
    for (std::size_t i = 0; i < options.size(); ++i) {
        if (any_favoured && !favoured(options[i])) continue;
        const Cents value = normalized_monthly_value(options[i], owner);
        if (best == options.size() || value > best_value) {
            best = i;
            best_value = value;
        }
    }
    return best;
}

const CompensationOption& preferred_option(std::span<const CompensationOption> options, const SensorOwner& owner) {
    return options[preferred_option_index(options, owner)];
}

} // namespace sensemarket
