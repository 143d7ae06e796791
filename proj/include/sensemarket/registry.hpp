// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sensemarket/domain.hpp"
#include "sensemarket/taxonomy.hpp"

namespace sensemarket {

struct AnnouncedSensor {
    std::string local_name;
    std::string phenomenon;
    std::string unit;
    double sampling_period_s = 1.0;
};

/// What a device tells its publisher when it comes online.
struct DeviceAnnouncement {
    DeviceId device_id;
    std::optional<OwnerId> owner_hint;
    std::vector<AnnouncedSensor> sensors;
    std::string network_info;
    RegionTag location;
    std::optional<Coordinates> coordinates;
};

enum class SensorState { AwaitingOwnerDecision, Published, Unpublished };
std::string_view to_string(SensorState state) noexcept;

struct PendingRegistration {
    DeviceId device_id;
    std::optional<OwnerId> owner_id;
    std::vector<SensorId> sensor_ids;
    Timestamp announced_at{};
    /// Credential the device presents on ingest.
    std::string device_token;
};

struct PublicationPolicy {
    PolicyId policy_id;
    OwnerId owner_id;
    std::set<SensorId> sensor_ids;
    /// Empty means any consumer category may bid.
    std::set<std::string> allowed_consumer_categories;
    /// Minimum normalized monthly value an offer must reach in auction resolution.
    Cents reserve_cents = 0;
    bool auto_accept = false;
    bool published = false;

    [[nodiscard]] bool admits(const std::string& consumer_category) const {
        return allowed_consumer_categories.empty() || allowed_consumer_categories.contains(consumer_category);
    }

    friend bool operator==(const PublicationPolicy&, const PublicationPolicy&) = default;
};

struct CatalogQuery {
    std::optional<std::string> phenomenon;
    std::optional<std::string> group;
    RegionTag region_prefix;
};

/// A sensor as it becomes visible, with the policy categories the ESP needs
/// to route interest notifications.
struct PublishedSensor {
    SensorDescriptor descriptor;
    std::set<std::string> allowed_consumer_categories;
};

struct CatalogChange {
    PublisherId publisher_id;
    std::vector<PublishedSensor> newly_visible;
};

/// In-memory catalog of one sensor publisher. Not synchronized; the Broker
/// serializes access.
class Registry {
public:
    explicit Registry(PublisherId publisher_id) : publisher_id_(std::move(publisher_id)) {}

    [[nodiscard]] const PublisherId& publisher_id() const noexcept { return publisher_id_; }

    void put_owner(SensorOwner owner);
    [[nodiscard]] const SensorOwner* find_owner(const OwnerId& id) const;

    void add_device(PendingRegistration registration, std::vector<SensorDescriptor> sensors);
    void claim_device(const DeviceId& device, const OwnerId& owner);
    [[nodiscard]] const PendingRegistration* find_device(const DeviceId& id) const;

    [[nodiscard]] const SensorDescriptor* find_sensor(const SensorId& id) const;
    [[nodiscard]] SensorState state(const SensorId& id) const;

    /// Replaces any policy previously governing the named sensors.
    void put_policy(PublicationPolicy policy);
    [[nodiscard]] const PublicationPolicy* find_policy(const PolicyId& id) const;
    /// The policy currently governing a sensor, if any.
    [[nodiscard]] const PublicationPolicy* policy_for(const SensorId& id) const;
    [[nodiscard]] bool is_visible(const SensorId& id) const;

    /// Published sensors matching phenomenon (or group membership), region and
    /// category admission, ordered by sensor_id.
    [[nodiscard]] std::vector<SensorDescriptor> search(const CatalogQuery& query, const std::string& consumer_category,
                                                       const PhenomenonTaxonomy& taxonomy) const;

    [[nodiscard]] const std::map<OwnerId, SensorOwner>& owners() const noexcept { return owners_; }
    [[nodiscard]] const std::map<DeviceId, PendingRegistration>& devices() const noexcept { return devices_; }
    [[nodiscard]] const std::map<SensorId, SensorDescriptor>& sensors() const noexcept { return sensors_; }
    [[nodiscard]] const std::map<PolicyId, PublicationPolicy>& policies() const noexcept { return policies_; }

private:
    PublisherId publisher_id_;
    std::map<OwnerId, SensorOwner> owners_;
    std::map<DeviceId, PendingRegistration> devices_;
    std::map<SensorId, SensorDescriptor> sensors_;
    std::map<PolicyId, PublicationPolicy> policies_;
    std::map<SensorId, PolicyId> governing_policy_;
};

/// Sensor ids are scoped by publisher so one sensor can never be listed by two.
SensorId make_sensor_id(const PublisherId& publisher, const DeviceId& device, std::string_view local_name);

} // namespace sensemarket
