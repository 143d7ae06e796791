// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference computations the implementation is checked against.
// They share no code with the library beyond plain data types.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sensemarket/negotiation.hpp"

namespace sensemarket::testing {

inline std::int64_t oracle_option_value(const CompensationOption& option, const SensorOwner& owner) {
    if (option.index() == 0) return std::get<MonthlyFee>(option).amount_cents;
    const auto& d = std::get<PurchaseDiscount>(option);
    for (const auto& [vendor, spend] : owner.expected_monthly_spend_cents)
        if (vendor == d.vendor_id) return (static_cast<std::int64_t>(d.basis_points) * spend) / 10000;
    return 0;
}

/// Winner of a first-price auction with reserve: scan every pending offer,
/// value it at its best option, drop those under the reserve, keep the
/// maximum; equal values go to the earlier submission, then the smaller id.
inline std::optional<OfferId> oracle_auction_winner(const std::vector<Offer>& offers, const SensorOwner& owner,
                                                    std::int64_t reserve, Timestamp at) {
    const Offer* best = nullptr;
    std::int64_t best_value = -1;
    for (const auto& offer : offers) {
        if (offer.status != OfferStatus::Pending || offer.expires_at <= at) continue;
        std::int64_t value = -1;
        for (const auto& option : offer.options) value = std::max(value, oracle_option_value(option, owner));
        if (value < reserve) continue;
        const bool better = best == nullptr || value > best_value ||
                            (value == best_value && (offer.submitted_at < best->submitted_at ||
                                                     (offer.submitted_at == best->submitted_at &&
                                                      offer.offer_id.str() < best->offer_id.str())));
        if (better) {
            best = &offer;
            best_value = value;
        }
    }
    if (best == nullptr) return std::nullopt;
    return best->offer_id;
}

/// Expected ledger balances from first principles: each posted fee cycle
/// moves the fee out of the consumer, floor(fee*rate/10000) to each
/// commission account, the rest to the owner; each redemption moves
/// floor(purchase*bp/10000) from consumer to owner.
struct BalanceOracle {
    std::int64_t sp_bp = 1000;
    std::int64_t esp_bp = 500;
    std::map<std::string, std::int64_t> balances;

    void fee_cycle(const std::string& consumer, const std::string& owner, const std::string& sp,
                   const std::optional<std::string>& esp, std::int64_t fee) {
        const std::int64_t to_sp = fee * sp_bp / 10000;
        const std::int64_t to_esp = esp ? fee * esp_bp / 10000 : 0;
        balances[consumer] -= fee;
        balances[sp] += to_sp;
        if (esp) balances[*esp] += to_esp;
        balances[owner] += fee - to_sp - to_esp;
    }
    void redemption(const std::string& consumer, const std::string& owner, std::int64_t purchase, std::int64_t bp) {
        const std::int64_t amount = purchase * bp / 10000;
        balances[consumer] -= amount;
        balances[owner] += amount;
    }
    [[nodiscard]] std::int64_t get(const std::string& account) const {
        auto it = balances.find(account);
        return it == balances.end() ? 0 : it->second;
    }
};

/// Smallest m with the first m credits summing to at least the premium.
inline std::optional<int> oracle_payback(const std::vector<std::int64_t>& credits, std::int64_t premium) {
    if (premium <= 0) return 0;
    for (std::size_t m = 1; m <= credits.size(); ++m) {
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < m; ++i) sum += credits[i];
        if (sum >= premium) return static_cast<int>(m);
    }
    return std::nullopt;
}

} // namespace sensemarket::testing
