// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/data_plane.hpp"

#include <algorithm>

#include "sensemarket/codec.hpp"

namespace sensemarket {

Subscription::Subscription(ConsumerId consumer, SensorId sensor, AgreementId agreement, Window window)
    : consumer_(std::move(consumer)), sensor_(std::move(sensor)), agreement_(std::move(agreement)), window_(window) {}

std::optional<AnonymizedReading> Subscription::try_next() {
    std::lock_guard lock(mutex_);
    if (queue_.empty()) return std::nullopt;
    auto r = std::move(queue_.front());
    queue_.pop_front();
    return r;
}

std::optional<AnonymizedReading> Subscription::next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    ready_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    auto r = std::move(queue_.front());
    queue_.pop_front();
    return r;
}

std::vector<AnonymizedReading> Subscription::drain() {
    std::lock_guard lock(mutex_);
    std::vector<AnonymizedReading> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
    queue_.clear();
    return out;
}

bool Subscription::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

bool Subscription::finished() const {
    std::lock_guard lock(mutex_);
    return closed_ && queue_.empty();
}

void Subscription::push(AnonymizedReading reading) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        queue_.push_back(std::move(reading));
    }
    ready_.notify_all();
}

void Subscription::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    ready_.notify_all();
}

DataPlane::DataPlane(PublisherId publisher, std::shared_ptr<const Clock> clock, KeyedHasher pseudonymizer,
                     std::optional<std::filesystem::path> storage_dir, std::optional<std::size_t> retention_cap)
    : publisher_(std::move(publisher)),
      clock_(std::move(clock)),
      pseudonymizer_(pseudonymizer),
      storage_dir_(std::move(storage_dir)),
      retention_cap_(retention_cap) {}

void DataPlane::bind_sensor(const SensorDescriptor& descriptor) {
    require(descriptor.publisher_id == publisher_, ErrorCode::PermissionDenied,
            "sensor " + descriptor.sensor_id.str() + " reports to another publisher");
    std::unique_lock lock(mutex_);
    auto [it, inserted] = logs_.try_emplace(descriptor.sensor_id);
    it->second.descriptor = descriptor;
    if (inserted) load_log(it->second);
}

void DataPlane::load_log(SensorLog& log) {
    if (!storage_dir_) return;
    const auto path = *storage_dir_ / (log.descriptor.sensor_id.str() + ".jsonl");
    for (const auto& record : JsonLinesLog::read_all(path)) log.readings.push_back(record.get<Reading>());
    if (retention_cap_)
        while (log.readings.size() > *retention_cap_) log.readings.pop_front();
    log.file = std::make_unique<JsonLinesLog>(path);
}

IngestResult DataPlane::ingest(std::span<const Reading> batch) {
    IngestResult result;
    std::vector<std::pair<std::shared_ptr<Subscription>, AnonymizedReading>> deliveries;
    std::vector<std::shared_ptr<Subscription>> to_close;
    std::vector<DeliveryRecord> records;
    const Timestamp now = clock_->now();
    {
        std::unique_lock lock(mutex_);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto& reading = batch[i];
            auto it = logs_.find(reading.sensor_id);
            if (it == logs_.end()) {
                result.rejected.push_back({i, ErrorCode::NotFound,
                                           "sensor " + reading.sensor_id.str() + " is not bound to publisher " +
                                               publisher_.str()});
                continue;
            }
            auto& log = it->second;
            if (!log.readings.empty() && reading.ts <= log.readings.back().ts) {
                result.rejected.push_back({i, ErrorCode::InvalidArgument,
                                           "timestamp " + to_rfc3339(reading.ts) + " is not after the last reading"});
                continue;
            }
            if (reading.quality && (*reading.quality < 0.0 || *reading.quality > 1.0)) {
                result.rejected.push_back({i, ErrorCode::InvalidArgument, "quality outside [0, 1]"});
                continue;
            }
            if (log.file) log.file->append(json(reading));
            log.readings.push_back(reading);
            if (retention_cap_ && log.readings.size() > *retention_cap_) log.readings.pop_front();
            ++result.accepted;

            // Subscribers only see readings after they are durably appended.
            for (const auto& weak : subscriptions_) {
                auto sub = weak.lock();
                if (!sub || sub->sensor_id() != reading.sensor_id || sub->closed()) continue;
                const auto ent = std::find_if(entitlements_.begin(), entitlements_.end(), [&](const Entitlement& e) {
                    return e.agreement_id == sub->agreement_id();
                });
                if (ent == entitlements_.end() || !ent->active_at(now)) {
                    to_close.push_back(sub);
                    continue;
                }
                if (!ent->window.contains(reading.ts)) {
                    if (reading.ts >= ent->window.end) to_close.push_back(sub);
                    continue;
                }
                deliveries.emplace_back(sub, anonymize(log, reading, ent->profile));
                records.push_back(DeliveryRecord{sub->consumer_id(), reading.sensor_id, reading.ts, now,
                                                 sub->agreement_id(), DeliveryChannel::Stream});
            }
        }
    }
    {
        std::lock_guard audit_lock(audit_mutex_);
        audit_.insert(audit_.end(), records.begin(), records.end());
    }
    for (auto& [sub, reading] : deliveries) sub->push(std::move(reading));
    for (auto& sub : to_close) sub->close();
    return result;
}

void DataPlane::grant(Entitlement entitlement) {
    std::unique_lock lock(mutex_);
    auto it = std::find_if(entitlements_.begin(), entitlements_.end(),
                           [&](const Entitlement& e) { return e.agreement_id == entitlement.agreement_id; });
    if (it != entitlements_.end())
        *it = std::move(entitlement);
    else
        entitlements_.push_back(std::move(entitlement));
}

void DataPlane::revoke(const AgreementId& agreement, Timestamp at) {
    std::vector<std::shared_ptr<Subscription>> to_close;
    {
        std::unique_lock lock(mutex_);
        for (auto& e : entitlements_)
            if (e.agreement_id == agreement && (!e.revoked_at || at < *e.revoked_at)) e.revoked_at = at;
        for (const auto& weak : subscriptions_)
            if (auto sub = weak.lock(); sub && sub->agreement_id() == agreement) to_close.push_back(sub);
    }
    for (auto& sub : to_close) sub->close();
}

const Entitlement* DataPlane::active_entitlement(const ConsumerId& consumer, const SensorId& sensor,
                                                 Timestamp now) const {
    for (const auto& e : entitlements_)
        if (e.consumer_id == consumer && e.sensor_ids.contains(sensor) && e.active_at(now)) return &e;
    return nullptr;
}

AnonymizedReading DataPlane::anonymize(const SensorLog& log, const Reading& reading,
                                       const AnonymizationProfile& profile) const {
    return AnonymizedReading{reading.sensor_id,
                             reading.ts,
                             reading.value,
                             reading.quality,
                             owner_token(log.descriptor.owner_id),
                             log.descriptor.location.truncated(profile.region_truncate_depth).str(),
                             log.descriptor.phenomenon,
                             log.descriptor.unit};
}

std::string DataPlane::owner_token(const OwnerId& owner) const {
    return "anon-" + pseudonymizer_.digest_hex(owner.str());
}

std::vector<AnonymizedReading> DataPlane::query(const ConsumerId& consumer, const SensorId& sensor, Timestamp from,
                                                Timestamp to) {
    const Timestamp now = clock_->now();
    std::vector<AnonymizedReading> out;
    std::vector<DeliveryRecord> records;
    {
        std::shared_lock lock(mutex_);
        const auto* ent = active_entitlement(consumer, sensor, now);
        require(ent != nullptr, ErrorCode::PermissionDenied,
                "consumer " + consumer.str() + " holds no active entitlement for " + sensor.str());
        auto it = logs_.find(sensor);
        require(it != logs_.end(), ErrorCode::NotFound, "unknown sensor " + sensor.str());
        const Timestamp lo = std::max(from, ent->window.start);
        const Timestamp hi = std::min(to, ent->window.end);
        if (lo >= hi) return out;
        const auto& readings = it->second.readings;
        auto first = std::lower_bound(readings.begin(), readings.end(), lo,
                                      [](const Reading& r, Timestamp t) { return r.ts < t; });
        for (; first != readings.end() && first->ts < hi; ++first) {
            out.push_back(anonymize(it->second, *first, ent->profile));
            records.push_back(
                DeliveryRecord{consumer, sensor, first->ts, now, ent->agreement_id, DeliveryChannel::Query});
        }
    }
    std::lock_guard audit_lock(audit_mutex_);
    audit_.insert(audit_.end(), records.begin(), records.end());
    return out;
}

std::shared_ptr<Subscription> DataPlane::subscribe(const ConsumerId& consumer, const SensorId& sensor) {
    const Timestamp now = clock_->now();
    std::unique_lock lock(mutex_);
    const auto* ent = active_entitlement(consumer, sensor, now);
    require(ent != nullptr, ErrorCode::PermissionDenied,
            "consumer " + consumer.str() + " holds no active entitlement for " + sensor.str());
    auto sub = std::make_shared<Subscription>(consumer, sensor, ent->agreement_id, ent->window);
    std::erase_if(subscriptions_, [](const std::weak_ptr<Subscription>& w) { return w.expired(); });
    subscriptions_.push_back(sub);
    return sub;
}

void DataPlane::sweep() {
    const Timestamp now = clock_->now();
    std::vector<std::shared_ptr<Subscription>> to_close;
    {
        std::unique_lock lock(mutex_);
        std::erase_if(subscriptions_, [](const std::weak_ptr<Subscription>& w) { return w.expired(); });
        for (const auto& weak : subscriptions_) {
            auto sub = weak.lock();
            if (!sub || sub->closed()) continue;
            const auto ent = std::find_if(entitlements_.begin(), entitlements_.end(), [&](const Entitlement& e) {
                return e.agreement_id == sub->agreement_id();
            });
            if (ent == entitlements_.end() || !ent->active_at(now)) to_close.push_back(sub);
        }
    }
    for (auto& sub : to_close) sub->close();
}

std::vector<DeliveryRecord> DataPlane::audit_log() const {
    std::lock_guard lock(audit_mutex_);
    return audit_;
}

std::vector<Entitlement> DataPlane::entitlements() const {
    std::shared_lock lock(mutex_);
    return entitlements_;
}

std::vector<Reading> DataPlane::readings(const SensorId& sensor) const {
    std::shared_lock lock(mutex_);
    auto it = logs_.find(sensor);
    if (it == logs_.end()) return {};
    return {it->second.readings.begin(), it->second.readings.end()};
}

} // namespace sensemarket
