// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/registry.hpp"

#include "sensemarket/error.hpp"

namespace sensemarket {

std::string_view to_string(SensorState state) noexcept {
    switch (state) {
    case SensorState::AwaitingOwnerDecision: return "awaiting-owner-decision";
    case SensorState::Published: return "published";
    case SensorState::Unpublished: return "unpublished";
    }
    return "unpublished";
}

SensorId make_sensor_id(const PublisherId& publisher, const DeviceId& device, std::string_view local_name) {
    return SensorId{publisher.str() + "." + device.str() + "." + std::string(local_name)};
}

void Registry::put_owner(SensorOwner owner) {
    auto id = owner.owner_id;
    owners_.insert_or_assign(std::move(id), std::move(owner));
}

const SensorOwner* Registry::find_owner(const OwnerId& id) const {
    auto it = owners_.find(id);
    return it == owners_.end() ? nullptr : &it->second;
}

void Registry::add_device(PendingRegistration registration, std::vector<SensorDescriptor> sensors) {
    for (auto& s : sensors) {
        auto id = s.sensor_id;
        sensors_.insert_or_assign(std::move(id), std::move(s));
    }
    auto id = registration.device_id;
    devices_.insert_or_assign(std::move(id), std::move(registration));
}

void Registry::claim_device(const DeviceId& device, const OwnerId& owner) {
    auto it = devices_.find(device);
    if (it == devices_.end()) fail(ErrorCode::NotFound, "unknown device " + device.str());
    it->second.owner_id = owner;
    for (const auto& sensor : it->second.sensor_ids) sensors_.at(sensor).owner_id = owner;
}

const PendingRegistration* Registry::find_device(const DeviceId& id) const {
    auto it = devices_.find(id);
    return it == devices_.end() ? nullptr : &it->second;
}

const SensorDescriptor* Registry::find_sensor(const SensorId& id) const {
    auto it = sensors_.find(id);
    return it == sensors_.end() ? nullptr : &it->second;
}

SensorState Registry::state(const SensorId& id) const {
    const auto* policy = policy_for(id);
    if (policy == nullptr) return SensorState::AwaitingOwnerDecision;
    return policy->published ? SensorState::Published : SensorState::Unpublished;
}

void Registry::put_policy(PublicationPolicy policy) {
    // A replaced policy releases sensors it no longer names.
    if (auto old = policies_.find(policy.policy_id); old != policies_.end())
        for (const auto& sensor : old->second.sensor_ids)
            if (!policy.sensor_ids.contains(sensor)) {
                auto g = governing_policy_.find(sensor);
                if (g != governing_policy_.end() && g->second == policy.policy_id) governing_policy_.erase(g);
            }
    for (const auto& sensor : policy.sensor_ids) {
        auto previous = governing_policy_.find(sensor);
        if (previous != governing_policy_.end() && previous->second != policy.policy_id) {
            auto& superseded = policies_.at(previous->second);
            superseded.sensor_ids.erase(sensor);
            if (superseded.sensor_ids.empty()) policies_.erase(previous->second);
        }
        governing_policy_[sensor] = policy.policy_id;
    }
    auto id = policy.policy_id;
    policies_.insert_or_assign(std::move(id), std::move(policy));
}

const PublicationPolicy* Registry::find_policy(const PolicyId& id) const {
    auto it = policies_.find(id);
    return it == policies_.end() ? nullptr : &it->second;
}

const PublicationPolicy* Registry::policy_for(const SensorId& id) const {
    auto it = governing_policy_.find(id);
    return it == governing_policy_.end() ? nullptr : find_policy(it->second);
}

bool Registry::is_visible(const SensorId& id) const {
    const auto* policy = policy_for(id);
    return policy != nullptr && policy->published;
}

std::vector<SensorDescriptor> Registry::search(const CatalogQuery& query, const std::string& consumer_category,
                                               const PhenomenonTaxonomy& taxonomy) const {
    std::set<std::string> wanted;
    if (query.group) {
        require(taxonomy.has_group(*query.group), ErrorCode::InvalidArgument, "unknown group " + *query.group);
        wanted = taxonomy.expand(*query.group);
    }
    if (query.phenomenon) {
        require(taxonomy.has_term(*query.phenomenon), ErrorCode::InvalidArgument,
                "unknown phenomenon " + *query.phenomenon);
        if (query.group) {
            // Both given: the term must also belong to the group.
            wanted = wanted.contains(*query.phenomenon) ? std::set<std::string>{*query.phenomenon}
                                                        : std::set<std::string>{};
        } else {
            wanted = {*query.phenomenon};
        }
    }
    const bool any_phenomenon = !query.group && !query.phenomenon;

    std::vector<SensorDescriptor> out;
    for (const auto& [id, sensor] : sensors_) {
        const auto* policy = policy_for(id);
        if (policy == nullptr || !policy->published) continue;
        if (!any_phenomenon && !wanted.contains(sensor.phenomenon)) continue;
        if (!query.region_prefix.contains(sensor.location)) continue;
        if (!policy->admits(consumer_category)) continue;
        out.push_back(sensor);
    }
    return out; // std::map iteration already orders by sensor_id
}

} // namespace sensemarket
