// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <json.hpp>

#include "sensemarket/authority.hpp"
#include "sensemarket/data_plane.hpp"
#include "sensemarket/journal.hpp"
#include "sensemarket/ledger.hpp"
#include "sensemarket/negotiation.hpp"
#include "sensemarket/registry.hpp"
#include "sensemarket/taxonomy.hpp"

namespace sensemarket {

struct BrokerConfig {
    PublisherId publisher_id{"easysensing"};
    AnonymizationProfile anonymization;
    Duration certificate_ttl = days(365);
    Duration offer_ttl = days(7);
    int default_term_days = 30;
    /// Journal and reading logs live here; in-memory when unset.
    std::optional<std::filesystem::path> data_dir;
    std::optional<std::size_t> reading_retention_cap;
};

/// Services shared by every role in one deployment.
struct BrokerServices {
    std::shared_ptr<const PhenomenonTaxonomy> taxonomy;
    std::shared_ptr<const Clock> clock;
    std::shared_ptr<const CertificateAuthority> authority;
    std::shared_ptr<Ledger> ledger;
    /// Keys owner pseudonyms and device tokens.
    KeySeed deployment_key{};
};

struct DecisionResult {
    Offer offer;
    std::optional<Agreement> agreement;
};

struct Resolution {
    SensorId sensor_id;
    CompetitionOutcome outcome;
    /// Set when auto_accept committed the winner.
    std::optional<Agreement> agreement;
    std::vector<OfferId> outbid;
};

/// The Sensor Publisher: device handshake, owner policies, catalog, offer
/// routing, agreements, and the entitlement-gated data plane.
///
/// State changes are recorded as events in a JSON-lines journal and replayed
/// on construction. All public calls are safe from multiple threads; entity
/// state transitions are serialized by one broker lock.
class Broker {
public:
    Broker(BrokerConfig config, BrokerServices services);
    ~Broker();
    Broker(const Broker&) = delete;
    Broker& operator=(const Broker&) = delete;

    [[nodiscard]] const PublisherId& publisher_id() const noexcept { return config_.publisher_id; }
    [[nodiscard]] const BrokerConfig& config() const noexcept { return config_; }
    [[nodiscard]] const PhenomenonTaxonomy& taxonomy() const noexcept { return *services_.taxonomy; }
    [[nodiscard]] const Clock& clock() const noexcept { return *services_.clock; }

    SensorOwner register_owner(const SensorOwner& owner);
    PendingRegistration announce_device(const DeviceAnnouncement& announcement);
    void claim_device(const DeviceId& device, const OwnerId& owner);
    PublicationPolicy set_policy(const OwnerId& owner, PublicationPolicy policy);
    std::vector<SensorDescriptor> search_catalog(const CatalogQuery& query, const Certificate& requester);
    ConsumerIdentity register_consumer(const std::string& organization_name, const std::string& consumer_category,
                                       std::optional<ConsumerId> consumer_id = std::nullopt);

    Offer submit_offer(const OfferRequest& request, const Certificate& consumer);
    DecisionResult owner_decide(const OfferId& offer, const OwnerDecision& decision);
    /// Ranks competing offers for a sensor. With the governing policy's
    /// auto_accept (or `commit`) the winner is accepted and the rest outbid;
    /// otherwise nothing changes.
    Resolution resolve_competition(const SensorId& sensor, Timestamp at, bool commit = false);
    std::size_t expire_offers(Timestamp now);
    Agreement cancel_agreement(const AgreementId& agreement);

    /// Readings must come from sensors of the device holding `device_token`
    /// when one is given.
    IngestResult ingest(std::span<const Reading> batch, const std::optional<std::string>& device_token = std::nullopt);
    std::vector<AnonymizedReading> query(const Certificate& consumer, const SensorId& sensor, Timestamp from,
                                         Timestamp to);
    std::shared_ptr<Subscription> subscribe(const Certificate& consumer, const SensorId& sensor);

    void verify(const Certificate& certificate) const;

    [[nodiscard]] std::vector<Offer> offers(std::optional<OwnerId> owner = std::nullopt,
                                            std::optional<OfferStatus> status = std::nullopt) const;
    [[nodiscard]] std::optional<Offer> find_offer(const OfferId& id) const;
    [[nodiscard]] std::vector<Agreement> agreements() const;
    [[nodiscard]] std::optional<Agreement> find_agreement(const AgreementId& id) const;
    [[nodiscard]] std::optional<SensorDescriptor> find_sensor(const SensorId& id) const;
    [[nodiscard]] std::optional<SensorOwner> find_owner(const OwnerId& id) const;
    [[nodiscard]] std::optional<PublicationPolicy> policy_for(const SensorId& id) const;
    [[nodiscard]] std::vector<SensorDescriptor> all_sensors() const;
    [[nodiscard]] std::vector<PublishedSensor> visible_sensors() const;

    [[nodiscard]] Inbox& inbox() noexcept { return inbox_; }
    [[nodiscard]] DataPlane& data_plane() noexcept { return *data_plane_; }
    [[nodiscard]] Ledger& ledger() noexcept { return *services_.ledger; }

    using CatalogListener = std::function<void(const CatalogChange&)>;
    /// Listeners run after the broker lock is released, in event order.
    void on_catalog_change(CatalogListener listener);

    /// Canonical JSON of catalog, policies, offers and agreements, for
    /// state comparison.
    [[nodiscard]] nlohmann::json snapshot() const;

private:
    void apply(const nlohmann::json& event, bool live);
    void record(const nlohmann::json& event);
    void dispatch_changes();
    Agreement accept_locked(const Offer& offer, std::size_t option_index, Timestamp now);
    /// Throws when the offer cannot become an agreement now.
    void check_acceptable_locked(const Offer& offer, Timestamp now) const;
    std::string device_token(const DeviceId& device) const;

    BrokerConfig config_;
    BrokerServices services_;
    KeyedHasher device_keys_;
    std::unique_ptr<DataPlane> data_plane_;
    std::unique_ptr<JsonLinesLog> journal_;
    Inbox inbox_;

    mutable std::mutex mutex_;
    Registry registry_;
    OfferBook book_;
    std::uint64_t next_offer_ = 1;
    std::uint64_t next_agreement_ = 1;
    std::uint64_t next_policy_ = 1;
    std::uint64_t next_consumer_ = 1;
    std::map<ConsumerId, ConsumerIdentity> consumers_;

    std::vector<CatalogChange> pending_changes_; // guarded by mutex_

    std::mutex dispatch_mutex_;
    std::vector<CatalogListener> listeners_;
};

} // namespace sensemarket
