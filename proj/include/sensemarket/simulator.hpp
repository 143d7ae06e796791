// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensemarket/broker.hpp"
#include "sensemarket/esp.hpp"

namespace sensemarket {

/// One simulated sensor: a periodic sampler (base + gaussian noise) or a
/// Poisson event source emitting `event_token`.
struct SimSensorSpec {
    enum class Model { Periodic, Poisson };
    std::string local_name;
    std::string phenomenon;
    std::string unit;
    Model model = Model::Periodic;
    double period_s = 60.0;
    double base = 0.0;
    double noise = 0.0;
    double rate_per_hour = 1.0;
    std::string event_token = "event";
};

struct SimDeviceSpec {
    DeviceId device_id;
    std::optional<OwnerId> owner_id;
    RegionTag location;
    std::vector<SimSensorSpec> sensors;
    std::uint64_t seed = 0;
};

/// Readings the device emits over [start, start + duration), ordered by time.
/// Identical (spec, publisher, start, duration) give identical output.
std::vector<Reading> generate_readings(const SimDeviceSpec& spec, const PublisherId& publisher, Timestamp start,
                                       Duration duration);

struct FleetStats {
    std::map<SensorId, std::size_t> emitted;
    std::map<SensorId, std::size_t> accepted;
    std::map<DeviceId, std::string> device_errors;
    std::size_t rejected = 0;
};

/// Announces every device, then feeds its readings to the broker hour by
/// hour while advancing the simulated clock to start + duration.
FleetStats run_fleet(Broker& broker, SimulatedClock& clock, const std::vector<SimDeviceSpec>& specs, Duration duration);

/// Parses a fleet file: {"devices": [...]}. Devices without a seed get one
/// derived from `seed` and their position.
std::vector<SimDeviceSpec> parse_fleet(const nlohmann::json& fleet, std::uint64_t seed);

/// An in-memory single-publisher marketplace on a simulated clock, with an
/// ESP wired to the broker's catalog changes.
struct SimulationWorld {
    std::shared_ptr<SimulatedClock> clock;
    std::shared_ptr<const PhenomenonTaxonomy> taxonomy;
    std::shared_ptr<const CertificateAuthority> authority;
    std::shared_ptr<Ledger> ledger;
    std::unique_ptr<Broker> broker;
    std::unique_ptr<ExtendedServiceProvider> esp;

    struct Options {
        Timestamp start{};
        PublisherId publisher_id{"easysensing"};
        EspId esp_id{"productiveanalytics"};
        CommissionRates rates{};
        std::string key_label = "simulation";
    };
    static SimulationWorld create(const Options& options);
};

/// Runs a JSON scenario script step by step against a fresh world and returns
/// the final state report. Any failed step throws scenario-failure naming it.
nlohmann::json run_scenario(const nlohmann::json& script);

/// The built-in fridge scenario script.
nlohmann::json reference_scenario();
nlohmann::json replay_reference_scenario();

/// Threshold-adopter owners: each agent's yearly return threshold is drawn so
/// `fraction_below` of them fall uniformly in [0, split) and the rest in
/// [split, upper]. An agent publishes when the offered yearly return reaches
/// its threshold.
struct AgentPopulation {
    std::size_t n = 1000;
    Cents offered_yearly_cents = 50000;
    double fraction_below = 0.67;
    Cents split_cents = 50000;
    Cents upper_cents = 200000;
    Cents device_premium_cents = 6000;
    std::uint64_t seed = 1;
};

struct AgentSummary {
    std::size_t n = 0;
    std::size_t adopters = 0;
    double adoption_fraction = 0.0;
    Cents monthly_fee_cents = 0;
    /// Over adopters that reached payback within the horizon.
    std::optional<double> median_payback_months;
    std::size_t payback_reached = 0;
};

std::vector<Cents> sample_thresholds(const AgentPopulation& population);

/// Drives the whole population through the broker: adopters announce and
/// publish a device, one consumer buys every published device for a monthly
/// fee, and fee cycles are posted for `months` months.
AgentSummary run_agents(const AgentPopulation& population, int months);

nlohmann::json to_json_report(const FleetStats& stats);
nlohmann::json to_json_report(const AgentSummary& summary);

} // namespace sensemarket
