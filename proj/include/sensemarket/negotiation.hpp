// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "sensemarket/domain.hpp"

namespace sensemarket {

enum class OfferStatus { Pending, Accepted, Rejected, Expired, Outbid };
std::string_view to_string(OfferStatus status) noexcept;
OfferStatus offer_status_from_string(std::string_view name);

/// Pending may move to any other status; every other status is final.
bool is_valid_transition(OfferStatus from, OfferStatus to) noexcept;

struct OfferRequest {
    std::set<SensorId> sensor_ids;
    std::vector<CompensationOption> options;
    std::optional<int> term_days;
    std::optional<Timestamp> expires_at;
    std::optional<EspId> via_esp;
};

struct Offer {
    OfferId offer_id;
    ConsumerId consumer_id;
    std::string consumer_category;
    std::optional<EspId> via_esp;
    std::set<SensorId> sensor_ids;
    std::vector<CompensationOption> options;
    int term_days = 30;
    Timestamp submitted_at{};
    Timestamp expires_at{};
    OfferStatus status = OfferStatus::Pending;
    OwnerId owner_id;
    PublisherId publisher_id;
    /// Submission order within the publisher.
    std::uint64_t sequence = 0;

    friend bool operator==(const Offer&, const Offer&) = default;
};

enum class AgreementStatus { Active, Completed, Cancelled };
std::string_view to_string(AgreementStatus status) noexcept;

struct AgreementParties {
    OwnerId owner_id;
    ConsumerId consumer_id;
    PublisherId publisher_id;
    std::optional<EspId> esp_id;
    friend bool operator==(const AgreementParties&, const AgreementParties&) = default;
};

struct Agreement {
    AgreementId agreement_id;
    OfferId offer_id;
    std::size_t chosen_index = 0;
    CompensationOption chosen_option;
    std::set<SensorId> sensor_ids;
    int term_days = 30;
    Window window;
    AgreementParties parties;
    std::optional<Timestamp> cancelled_at;

    /// Active inside the window until cancelled, completed once the window ends.
    [[nodiscard]] AgreementStatus status_at(Timestamp now) const noexcept;

    friend bool operator==(const Agreement&, const Agreement&) = default;
};

struct OwnerDecision {
    enum class Kind { Accept, Reject };
    Kind kind = Kind::Reject;
    std::size_t option_index = 0;

    static OwnerDecision accept(std::size_t index) { return {Kind::Accept, index}; }
    static OwnerDecision reject() { return {Kind::Reject, 0}; }
};

/// One offer as seen by the auction: its best normalized monthly value for the
/// owner and the option that achieves it.
struct Bid {
    OfferId offer_id;
    Timestamp submitted_at{};
    Cents best_value = 0;
    std::size_t best_option = 0;

    friend bool operator==(const Bid&, const Bid&) = default;
};

/// Highest value first, then earliest submission, then lexicographic offer id.
bool outranks(const Bid& a, const Bid& b) noexcept;

Bid make_bid(const Offer& offer, const SensorOwner& owner);

struct CompetitionOutcome {
    std::optional<Bid> winner;
    /// Bids at or above reserve, best first.
    std::vector<Bid> ranking;
    std::vector<OfferId> below_reserve;
};

/// First-price resolution: discard bids below reserve, the best remaining wins.
CompetitionOutcome rank_first_price(std::span<const Bid> bids, Cents reserve_cents);

/// Pure offer/agreement store for one publisher.
class OfferBook {
public:
    void put_offer(Offer offer);
    void set_status(const OfferId& id, OfferStatus status);
    [[nodiscard]] const Offer* find_offer(const OfferId& id) const;

    void put_agreement(Agreement agreement);
    void cancel_agreement(const AgreementId& id, Timestamp at);
    [[nodiscard]] const Agreement* find_agreement(const AgreementId& id) const;

    /// Active agreement between consumer and sensor at `now`, if any.
    [[nodiscard]] const Agreement* active_agreement(const SensorId& sensor, const ConsumerId& consumer,
                                                    Timestamp now) const;

    [[nodiscard]] std::vector<const Offer*> pending_for_sensor(const SensorId& sensor) const;

    [[nodiscard]] const std::map<OfferId, Offer>& offers() const noexcept { return offers_; }
    [[nodiscard]] const std::map<AgreementId, Agreement>& agreements() const noexcept { return agreements_; }

private:
    std::map<OfferId, Offer> offers_;
    std::map<AgreementId, Agreement> agreements_;
};

} // namespace sensemarket
