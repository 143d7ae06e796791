// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sensemarket/authority.hpp"
#include "sensemarket/error.hpp"
#include "sensemarket/journal.hpp"
#include "sensemarket/negotiation.hpp"
#include "sensemarket/registry.hpp"
#include "sensemarket/taxonomy.hpp"

namespace sensemarket {

class Broker;
class Ledger;

/// How the ESP reaches a sensor publisher, in process or over HTTP.
/// Implementations throw MarketError(unavailable) when the publisher cannot
/// be reached.
class PublisherPort {
public:
    virtual ~PublisherPort() = default;
    [[nodiscard]] virtual PublisherId publisher_id() const = 0;
    virtual std::vector<SensorDescriptor> search(const CatalogQuery& query, const Certificate& requester) = 0;
    virtual Offer submit_offer(const OfferRequest& request, const Certificate& consumer) = 0;
};

class InProcessPublisherPort final : public PublisherPort {
public:
    explicit InProcessPublisherPort(Broker& broker) : broker_(broker) {}
    [[nodiscard]] PublisherId publisher_id() const override;
    std::vector<SensorDescriptor> search(const CatalogQuery& query, const Certificate& requester) override;
    Offer submit_offer(const OfferRequest& request, const Certificate& consumer) override;

private:
    Broker& broker_;
};

/// Constraint set shared by one-off requirements and standing interests.
struct SensorConstraints {
    std::optional<std::string> phenomenon_group;
    std::vector<std::string> terms;
    RegionTag region_prefix;
    std::optional<Cents> max_monthly_budget_cents;
    /// Sensors sampling less often than this (larger period) are kept;
    /// faster ones are excluded.
    std::optional<double> min_sampling_period_s;

    [[nodiscard]] bool has_selection() const noexcept {
        return phenomenon_group.has_value() || !terms.empty() || !region_prefix.empty();
    }
};

struct Requirement {
    RequirementId requirement_id;
    ConsumerId consumer_id;
    SensorConstraints constraints;
};

struct InterestRegistration {
    InterestId interest_id;
    ConsumerId consumer_id;
    std::string consumer_category;
    SensorConstraints constraints;
    bool active = true;
};

struct PlanEntry {
    PublisherId publisher_id;
    std::vector<SensorDescriptor> sensors;
};

struct Plan {
    std::vector<PlanEntry> entries;
    bool degraded = false;
    std::vector<PublisherId> unreachable;

    [[nodiscard]] std::size_t sensor_count() const noexcept;
    [[nodiscard]] std::set<SensorId> sensor_ids() const;
};

struct AcquireOutcome {
    PublisherId publisher_id;
    OwnerId owner_id;
    std::set<SensorId> sensor_ids;
    std::optional<Offer> offer;
    std::optional<ErrorCode> error;
    std::string message;
};

struct InterestNotification {
    std::uint64_t seq = 0;
    InterestId interest_id;
    ConsumerId consumer_id;
    PublisherId publisher_id;
    SensorDescriptor sensor;
    Timestamp at{};
};

/// Phenomenon terms named by a constraint set. Unknown names throw invalid-argument.
std::set<std::string> expand_terms(const SensorConstraints& constraints, const PhenomenonTaxonomy& taxonomy);

/// True when a sensor satisfies phenomenon, region and sampling constraints.
bool matches(const SensorConstraints& constraints, const std::set<std::string>& terms,
             const SensorDescriptor& sensor);

/// Extended Service Provider: turns high-level requirements into sensor sets
/// across publishers, acquires them on the consumer's behalf, and runs the
/// interest registry.
class ExtendedServiceProvider {
public:
    ExtendedServiceProvider(EspId id, std::shared_ptr<const PhenomenonTaxonomy> taxonomy,
                            std::shared_ptr<const Clock> clock, std::shared_ptr<const CertificateAuthority> authority,
                            std::optional<std::filesystem::path> data_dir = std::nullopt);

    [[nodiscard]] const EspId& esp_id() const noexcept { return id_; }

    void add_publisher(std::shared_ptr<PublisherPort> port);
    /// Optional funding check against a ledger the ESP can see.
    void set_funding_ledger(std::shared_ptr<const Ledger> ledger) { ledger_ = std::move(ledger); }

    /// Union of matching sensors across all publishers, grouped by publisher
    /// in publisher order, sensors by id. Unreachable publishers mark the plan
    /// degraded and are listed.
    Plan resolve(const Requirement& requirement, const Certificate& consumer);

    /// One offer per owner, submitted through the owning publisher with
    /// via_esp set. Per-offer failures are reported, siblings still go out.
    std::vector<AcquireOutcome> acquire(const Plan& plan, const std::vector<CompensationOption>& options,
                                        int term_days, const Certificate& consumer,
                                        std::optional<Cents> max_monthly_budget_cents = std::nullopt);

    InterestRegistration register_interest(const Certificate& consumer, SensorConstraints constraints);
    void deactivate_interest(const InterestId& id);

    /// Emits one notification per (interest, sensor) pair the first time the
    /// sensor becomes visible to that interest. Returns what was sent now.
    std::vector<InterestNotification> match_interests(const CatalogChange& change);

    [[nodiscard]] std::vector<InterestNotification> notifications(const InterestId& id, std::uint64_t after_seq = 0) const;
    [[nodiscard]] std::vector<InterestRegistration> interests() const;
    [[nodiscard]] std::optional<InterestRegistration> find_interest(const InterestId& id) const;

private:
    void apply(const nlohmann::json& event);

    EspId id_;
    std::shared_ptr<const PhenomenonTaxonomy> taxonomy_;
    std::shared_ptr<const Clock> clock_;
    std::shared_ptr<const CertificateAuthority> authority_;
    std::shared_ptr<const Ledger> ledger_;
    std::unique_ptr<JsonLinesLog> journal_;

    mutable std::mutex ports_mutex_;
    std::vector<std::shared_ptr<PublisherPort>> ports_;

    mutable std::mutex interests_mutex_;
    std::map<InterestId, InterestRegistration> interests_;
    std::set<std::pair<InterestId, SensorId>> notified_;
    std::vector<InterestNotification> sent_;
    std::uint64_t next_interest_ = 1;
    std::uint64_t next_seq_ = 1;
};

} // namespace sensemarket
