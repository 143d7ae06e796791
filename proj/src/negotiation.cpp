// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/negotiation.hpp"

#include <algorithm>

#include "sensemarket/error.hpp"

namespace sensemarket {

std::string_view to_string(OfferStatus status) noexcept {
    switch (status) {
    case OfferStatus::Pending: return "pending";
    case OfferStatus::Accepted: return "accepted";
    case OfferStatus::Rejected: return "rejected";
    case OfferStatus::Expired: return "expired";
    case OfferStatus::Outbid: return "outbid";
    }
    return "pending";
}

OfferStatus offer_status_from_string(std::string_view name) {
    for (auto s : {OfferStatus::Pending, OfferStatus::Accepted, OfferStatus::Rejected, OfferStatus::Expired,
                   OfferStatus::Outbid})
        if (to_string(s) == name) return s;
    fail(ErrorCode::InvalidArgument, "unknown offer status: " + std::string(name));
}

bool is_valid_transition(OfferStatus from, OfferStatus to) noexcept {
    return from == OfferStatus::Pending && to != OfferStatus::Pending;
}

std::string_view to_string(AgreementStatus status) noexcept {
    switch (status) {
    case AgreementStatus::Active: return "active";
    case AgreementStatus::Completed: return "completed";
    case AgreementStatus::Cancelled: return "cancelled";
    }
    return "active";
}

AgreementStatus Agreement::status_at(Timestamp now) const noexcept {
    if (cancelled_at && *cancelled_at <= now) return AgreementStatus::Cancelled;
    if (now >= window.end) return AgreementStatus::Completed;
    return AgreementStatus::Active;
}

bool outranks(const Bid& a, const Bid& b) noexcept {
    if (a.best_value != b.best_value) return a.best_value > b.best_value;
    if (a.submitted_at != b.submitted_at) return a.submitted_at < b.submitted_at;
    return a.offer_id < b.offer_id;
}

Bid make_bid(const Offer& offer, const SensorOwner& owner) {
    Bid bid{offer.offer_id, offer.submitted_at, 0, 0};
    for (std::size_t i = 0; i < offer.options.size(); ++i) {
        const Cents value = normalized_monthly_value(offer.options[i], owner);
        if (i == 0 || value > bid.best_value) {
            bid.best_value = value;
            bid.best_option = i;
        }
    }
    return bid;
}

CompetitionOutcome rank_first_price(std::span<const Bid> bids, Cents reserve_cents) {
    CompetitionOutcome outcome;
    for (const auto& bid : bids) {
        if (bid.best_value < reserve_cents)
            outcome.below_reserve.push_back(bid.offer_id);
        else
            outcome.ranking.push_back(bid);
    }
    std::sort(outcome.ranking.begin(), outcome.ranking.end(), outranks);
    std::sort(outcome.below_reserve.begin(), outcome.below_reserve.end());
    if (!outcome.ranking.empty()) outcome.winner = outcome.ranking.front();
    return outcome;
}

void OfferBook::put_offer(Offer offer) {
    auto id = offer.offer_id;
    offers_.insert_or_assign(std::move(id), std::move(offer));
}

void OfferBook::set_status(const OfferId& id, OfferStatus status) {
    auto it = offers_.find(id);
    if (it == offers_.end()) fail(ErrorCode::NotFound, "unknown offer " + id.str());
    if (!is_valid_transition(it->second.status, status))
        fail(ErrorCode::FailedPrecondition, "offer " + id.str() + " is " + std::string(to_string(it->second.status)));
    it->second.status = status;
}

const Offer* OfferBook::find_offer(const OfferId& id) const {
    auto it = offers_.find(id);
    return it == offers_.end() ? nullptr : &it->second;
}

void OfferBook::put_agreement(Agreement agreement) {
    auto id = agreement.agreement_id;
    agreements_.insert_or_assign(std::move(id), std::move(agreement));
}

void OfferBook::cancel_agreement(const AgreementId& id, Timestamp at) {
    auto it = agreements_.find(id);
    if (it == agreements_.end()) fail(ErrorCode::NotFound, "unknown agreement " + id.str());
    it->second.cancelled_at = at;
}

const Agreement* OfferBook::find_agreement(const AgreementId& id) const {
    auto it = agreements_.find(id);
    return it == agreements_.end() ? nullptr : &it->second;
}

const Agreement* OfferBook::active_agreement(const SensorId& sensor, const ConsumerId& consumer,
                                             Timestamp now) const {
    for (const auto& [id, a] : agreements_)
        if (a.parties.consumer_id == consumer && a.sensor_ids.contains(sensor) &&
            a.status_at(now) == AgreementStatus::Active)
            return &a;
    return nullptr;
}

std::vector<const Offer*> OfferBook::pending_for_sensor(const SensorId& sensor) const {
    std::vector<const Offer*> out;
    for (const auto& [id, offer] : offers_)
        if (offer.status == OfferStatus::Pending && offer.sensor_ids.contains(sensor)) out.push_back(&offer);
    return out;
}

} // namespace sensemarket
