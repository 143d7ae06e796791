// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sensemarket/authority.hpp"
#include "sensemarket/domain.hpp"
#include "sensemarket/error.hpp"
#include "sensemarket/journal.hpp"

namespace sensemarket {

/// Numeric sample or event token (e.g. "open", an RFID tag).
using ReadingValue = std::variant<double, std::string>;

struct Reading {
    SensorId sensor_id;
    Timestamp ts{};
    ReadingValue value;
    std::optional<double> quality;

    friend bool operator==(const Reading&, const Reading&) = default;
};

/// Owner pseudonymization is unconditional; only location coarsening is tunable.
struct AnonymizationProfile {
    std::size_t region_truncate_depth = 2;
};

struct Entitlement {
    AgreementId agreement_id;
    ConsumerId consumer_id;
    std::set<SensorId> sensor_ids;
    Window window;
    AnonymizationProfile profile;
    std::optional<Timestamp> revoked_at;

    [[nodiscard]] bool active_at(Timestamp t) const noexcept {
        return window.contains(t) && (!revoked_at || t < *revoked_at);
    }
    [[nodiscard]] bool covers(const ConsumerId& consumer, const SensorId& sensor, Timestamp reading_ts,
                              Timestamp delivered_at) const {
        return consumer == consumer_id && sensor_ids.contains(sensor) && window.contains(reading_ts) &&
               active_at(delivered_at);
    }
};

/// What a consumer receives: no device id, owner replaced by a keyed token,
/// location coarsened.
struct AnonymizedReading {
    SensorId sensor_id;
    Timestamp ts{};
    ReadingValue value;
    std::optional<double> quality;
    std::string owner_token;
    std::string region;
    std::string phenomenon;
    std::string unit;

    friend bool operator==(const AnonymizedReading&, const AnonymizedReading&) = default;
};

struct IngestRejection {
    std::size_t index = 0;
    ErrorCode code = ErrorCode::InvalidArgument;
    std::string reason;
};

struct IngestResult {
    std::size_t accepted = 0;
    std::vector<IngestRejection> rejected;
};

enum class DeliveryChannel { Query, Stream };

struct DeliveryRecord {
    ConsumerId consumer_id;
    SensorId sensor_id;
    Timestamp reading_ts{};
    Timestamp delivered_at{};
    AgreementId agreement_id;
    DeliveryChannel channel = DeliveryChannel::Query;
};

/// Live feed for one (consumer, sensor) pair. Closed when the window ends or
/// the entitlement is revoked; readings queued before closing stay readable.
class Subscription {
public:
    Subscription(ConsumerId consumer, SensorId sensor, AgreementId agreement, Window window);

    [[nodiscard]] std::optional<AnonymizedReading> try_next();
    /// Blocks up to `timeout` of real time for the next reading.
    [[nodiscard]] std::optional<AnonymizedReading> next(std::chrono::milliseconds timeout);
    [[nodiscard]] std::vector<AnonymizedReading> drain();
    [[nodiscard]] bool closed() const;
    /// Closed and nothing left to read.
    [[nodiscard]] bool finished() const;

    [[nodiscard]] const ConsumerId& consumer_id() const noexcept { return consumer_; }
    [[nodiscard]] const SensorId& sensor_id() const noexcept { return sensor_; }
    [[nodiscard]] const AgreementId& agreement_id() const noexcept { return agreement_; }
    [[nodiscard]] const Window& window() const noexcept { return window_; }

private:
    friend class DataPlane;
    void push(AnonymizedReading reading);
    void close();

    ConsumerId consumer_;
    SensorId sensor_;
    AgreementId agreement_;
    Window window_;
    mutable std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<AnonymizedReading> queue_;
    bool closed_ = false;
};

/// Reading store and entitlement gate of one publisher.
///
/// Storage is an append-only log per sensor (JSON lines, one file per sensor
/// when a directory is configured). Timestamps must strictly increase per
/// sensor. Every reading handed to a consumer is recorded in the audit log
/// together with the agreement that allowed it.
class DataPlane {
public:
    DataPlane(PublisherId publisher, std::shared_ptr<const Clock> clock, KeyedHasher pseudonymizer,
              std::optional<std::filesystem::path> storage_dir = std::nullopt,
              std::optional<std::size_t> retention_cap = std::nullopt);

    /// Makes a sensor known to ingest, or refreshes its descriptor. Loads any
    /// persisted log for it.
    void bind_sensor(const SensorDescriptor& descriptor);

    IngestResult ingest(std::span<const Reading> batch);

    void grant(Entitlement entitlement);
    void revoke(const AgreementId& agreement, Timestamp at);

    /// Throws permission-denied without an entitlement active now; the range
    /// [from, to) is clipped to the entitlement window.
    std::vector<AnonymizedReading> query(const ConsumerId& consumer, const SensorId& sensor, Timestamp from,
                                         Timestamp to);

    std::shared_ptr<Subscription> subscribe(const ConsumerId& consumer, const SensorId& sensor);

    /// Closes subscriptions whose window has ended.
    void sweep();

    [[nodiscard]] std::vector<DeliveryRecord> audit_log() const;
    [[nodiscard]] std::vector<Entitlement> entitlements() const;
    [[nodiscard]] std::vector<Reading> readings(const SensorId& sensor) const;
    [[nodiscard]] std::string owner_token(const OwnerId& owner) const;

private:
    struct SensorLog {
        SensorDescriptor descriptor;
        std::deque<Reading> readings;
        std::unique_ptr<JsonLinesLog> file;
    };

    const Entitlement* active_entitlement(const ConsumerId& consumer, const SensorId& sensor, Timestamp now) const;
    AnonymizedReading anonymize(const SensorLog& log, const Reading& reading, const AnonymizationProfile& profile) const;
    void load_log(SensorLog& log);

    PublisherId publisher_;
    std::shared_ptr<const Clock> clock_;
    KeyedHasher pseudonymizer_;
    std::optional<std::filesystem::path> storage_dir_;
    std::optional<std::size_t> retention_cap_;

    mutable std::shared_mutex mutex_;
    std::map<SensorId, SensorLog> logs_;
    std::vector<Entitlement> entitlements_;
    std::vector<std::weak_ptr<Subscription>> subscriptions_;
    mutable std::mutex audit_mutex_;
    std::vector<DeliveryRecord> audit_;
};

} // namespace sensemarket
