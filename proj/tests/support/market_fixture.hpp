// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

// Small builders shared by the unit and acceptance tests.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sensemarket/broker.hpp"
#include "sensemarket/codec.hpp"
#include "sensemarket/esp.hpp"

namespace sensemarket::testing {

inline Timestamp t0() { return parse_rfc3339("2026-01-05T09:00:00Z"); }

struct Market {
    std::shared_ptr<SimulatedClock> clock;
    std::shared_ptr<const PhenomenonTaxonomy> taxonomy;
    std::shared_ptr<const CertificateAuthority> authority;
    std::shared_ptr<Ledger> ledger;
    std::unique_ptr<Broker> broker;

    explicit Market(std::string publisher = "easysensing", std::optional<std::filesystem::path> dir = std::nullopt,
                    std::shared_ptr<SimulatedClock> shared_clock = nullptr,
                    std::shared_ptr<const CertificateAuthority> shared_authority = nullptr)
        : clock(shared_clock ? std::move(shared_clock) : std::make_shared<SimulatedClock>(t0())),
          taxonomy(std::make_shared<const PhenomenonTaxonomy>(PhenomenonTaxonomy::builtin())),
          authority(shared_authority ? std::move(shared_authority)
                                     : std::make_shared<const CertificateAuthority>("test-ca", seed_from_label("test-ca"))),
          ledger(std::make_shared<Ledger>()) {
        BrokerConfig config;
        config.publisher_id = PublisherId{publisher};
        config.data_dir = dir;
        broker = std::make_unique<Broker>(
            config, BrokerServices{taxonomy, clock, authority, ledger, seed_from_label("test-keys")});
    }

    SensorOwner owner(const std::string& id, std::set<VendorId> affinities = {},
                      std::map<VendorId, Cents> spend = {}) {
        SensorOwner o;
        o.owner_id = OwnerId{id};
        o.display_name = id;
        o.vendor_affinities = std::move(affinities);
        o.expected_monthly_spend_cents = std::move(spend);
        return broker->register_owner(o);
    }

    /// Announces a device whose sensors are (local_name, phenomenon) pairs.
    PendingRegistration device(const std::string& owner_id, const std::string& device_id, const std::string& region,
                               const std::vector<std::pair<std::string, std::string>>& sensors,
                               double period_s = 60.0) {
        DeviceAnnouncement a;
        a.device_id = DeviceId{device_id};
        if (!owner_id.empty()) a.owner_hint = OwnerId{owner_id};
        a.location = RegionTag(region);
        for (const auto& [name, phenomenon] : sensors) a.sensors.push_back({name, phenomenon, "u", period_s});
        return broker->announce_device(a);
    }

    PublicationPolicy publish(const std::string& owner_id, const std::vector<SensorId>& sensors,
                              std::set<std::string> categories = {}, Cents reserve = 0, bool auto_accept = false,
                              bool published = true) {
        PublicationPolicy p;
        p.sensor_ids = {sensors.begin(), sensors.end()};
        p.allowed_consumer_categories = std::move(categories);
        p.reserve_cents = reserve;
        p.auto_accept = auto_accept;
        p.published = published;
        return broker->set_policy(OwnerId{owner_id}, p);
    }

    ConsumerIdentity consumer(const std::string& org, const std::string& category, const std::string& id) {
        return broker->register_consumer(org, category, ConsumerId{id});
    }

    Offer offer(const ConsumerIdentity& who, const std::vector<SensorId>& sensors,
                std::vector<CompensationOption> options, int term_days = 30) {
        OfferRequest r;
        r.sensor_ids = {sensors.begin(), sensors.end()};
        r.options = std::move(options);
        r.term_days = term_days;
        return broker->submit_offer(r, who.certificate);
    }
};

inline CompensationOption fee(Cents c) { return MonthlyFee{c}; }
inline CompensationOption discount(BasisPoints bp, const std::string& vendor) {
    return PurchaseDiscount{bp, VendorId{vendor}};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    static std::random_device rd;
    auto dir = std::filesystem::temp_directory_path() /
               ("smkt-" + name + "-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace sensemarket::testing
