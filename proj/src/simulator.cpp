// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "embedded_data.hpp"
#include "sensemarket/codec.hpp"

namespace sensemarket {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 sensor_rng(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

double announced_period(const SimSensorSpec& s) {
    return s.model == SimSensorSpec::Model::Periodic ? s.period_s : 3600.0 / s.rate_per_hour;
}

} // namespace

std::vector<Reading> generate_readings(const SimDeviceSpec& spec, const PublisherId& publisher, Timestamp start,
                                       Duration duration) {
    std::vector<Reading> out;
    const Timestamp end = start + duration;
    for (std::size_t i = 0; i < spec.sensors.size(); ++i) {
        const auto& s = spec.sensors[i];
        const auto id = make_sensor_id(publisher, spec.device_id, s.local_name);
        auto rng = sensor_rng(spec.seed, i);
        if (s.model == SimSensorSpec::Model::Periodic) {
            require(s.period_s > 0.0, ErrorCode::InvalidArgument, "period must be positive");
            const auto period = std::max<std::int64_t>(1, std::llround(s.period_s * 1000.0));
            std::normal_distribution<double> noise(0.0, 1.0);
            const std::int64_t count = duration.count() / period;
            for (std::int64_t k = 0; k < count; ++k)
                out.push_back({id, start + Duration(k * period), s.base + s.noise * noise(rng), std::nullopt});
        } else {
            require(s.rate_per_hour > 0.0, ErrorCode::InvalidArgument, "event rate must be positive");
            std::exponential_distribution<double> gap(s.rate_per_hour / 3'600'000.0);
            Timestamp t = start;
            bool first = true;
            for (;;) {
                auto step = std::llround(gap(rng));
                if (!first) step = std::max<long long>(step, 1);
                first = false;
                t += Duration(step);
                if (t >= end) break;
                out.push_back({id, t, s.event_token, std::nullopt});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Reading& a, const Reading& b) {
        return a.ts != b.ts ? a.ts < b.ts : a.sensor_id < b.sensor_id;
    });
    return out;
}

FleetStats run_fleet(Broker& broker, SimulatedClock& clock, const std::vector<SimDeviceSpec>& specs,
                     Duration duration) {
    FleetStats stats;
    const Timestamp start = clock.now();
    struct Live {
        const SimDeviceSpec* spec;
        std::string token;
        std::vector<Reading> readings;
        std::size_t cursor = 0;
    };
    std::vector<Live> live;
    for (const auto& spec : specs) {
        try {
            if (spec.owner_id && !broker.find_owner(*spec.owner_id)) {
                SensorOwner owner;
                owner.owner_id = *spec.owner_id;
                owner.display_name = spec.owner_id->str();
                broker.register_owner(owner);
            }
            DeviceAnnouncement a;
            a.device_id = spec.device_id;
            a.owner_hint = spec.owner_id;
            a.location = spec.location;
            a.network_info = "simulated";
            for (const auto& s : spec.sensors)
                a.sensors.push_back({s.local_name, s.phenomenon, s.unit, announced_period(s)});
            auto registration = broker.announce_device(a);
            auto readings = generate_readings(spec, broker.publisher_id(), start, duration);
            for (const auto& r : readings) ++stats.emitted[r.sensor_id];
            live.push_back({&spec, registration.device_token, std::move(readings)});
        } catch (const MarketError& e) {
            stats.device_errors[spec.device_id] = e.what();
        }
    }

    const Timestamp end = start + duration;
    for (Timestamp chunk_end = start; chunk_end < end;) {
        chunk_end = std::min(end, chunk_end + hours(1));
        clock.set(chunk_end);
        for (auto& device : live) {
            std::vector<Reading> batch;
            while (device.cursor < device.readings.size() && device.readings[device.cursor].ts < chunk_end)
                batch.push_back(device.readings[device.cursor++]);
            if (batch.empty()) continue;
            const auto result = broker.ingest(batch, device.token);
            std::set<std::size_t> rejected;
            for (const auto& r : result.rejected) rejected.insert(r.index);
            stats.rejected += rejected.size();
            for (std::size_t i = 0; i < batch.size(); ++i)
                if (!rejected.contains(i)) ++stats.accepted[batch[i].sensor_id];
        }
    }
    if (clock.now() < end) clock.set(end);
    return stats;
}

std::vector<SimDeviceSpec> parse_fleet(const json& fleet, std::uint64_t seed) {
    std::vector<SimDeviceSpec> specs;
    try {
        std::size_t index = 0;
        for (const auto& d : fleet.at("devices")) {
            SimDeviceSpec spec;
            spec.device_id = d.at("device_id").get<DeviceId>();
            spec.owner_id = get_optional<OwnerId>(d, "owner_id");
            spec.location = d.at("location").get<RegionTag>();
            spec.seed = d.contains("seed") ? d.at("seed").get<std::uint64_t>() : splitmix64(seed + index);
            for (const auto& s : d.at("sensors")) {
                SimSensorSpec sensor;
                sensor.local_name = s.at("local_name").get<std::string>();
                sensor.phenomenon = s.at("phenomenon").get<std::string>();
                sensor.unit = s.value("unit", std::string{});
                const auto model = s.value("model", std::string{"periodic"});
                if (model == "periodic") {
                    sensor.model = SimSensorSpec::Model::Periodic;
                    sensor.period_s = s.value("period_s", 60.0);
                    sensor.base = s.value("base", 0.0);
                    sensor.noise = s.value("noise", 0.0);
                } else if (model == "poisson") {
                    sensor.model = SimSensorSpec::Model::Poisson;
                    sensor.rate_per_hour = s.value("rate_per_hour", 1.0);
                    sensor.event_token = s.value("event_token", std::string{"event"});
                } else {
                    fail(ErrorCode::InvalidArgument, "unknown sensor model '" + model + "'");
                }
                spec.sensors.push_back(std::move(sensor));
            }
            specs.push_back(std::move(spec));
            ++index;
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("malformed fleet spec: ") + e.what());
    }
    return specs;
}

SimulationWorld SimulationWorld::create(const Options& options) {
    SimulationWorld w;
    w.clock = std::make_shared<SimulatedClock>(options.start);
    w.taxonomy = std::make_shared<const PhenomenonTaxonomy>(PhenomenonTaxonomy::builtin());
    w.authority = std::make_shared<const CertificateAuthority>("sensemarket-ca", seed_from_label(options.key_label + "/ca"));
    w.ledger = std::make_shared<Ledger>(options.rates);
    BrokerConfig config;
    config.publisher_id = options.publisher_id;
    w.broker = std::make_unique<Broker>(
        config, BrokerServices{w.taxonomy, w.clock, w.authority, w.ledger, seed_from_label(options.key_label + "/keys")});
    w.esp = std::make_unique<ExtendedServiceProvider>(options.esp_id, w.taxonomy, w.clock, w.authority);
    w.esp->add_publisher(std::make_shared<InProcessPublisherPort>(*w.broker));
    w.esp->set_funding_ledger(w.ledger);
    auto* esp = w.esp.get();
    w.broker->on_catalog_change([esp](const CatalogChange& change) { esp->match_interests(change); });
    return w;
}

// ---- scenario scripts ----

namespace {

class ScenarioRun {
public:
    explicit ScenarioRun(const json& script) : script_(script) {
        SimulationWorld::Options options;
        options.start = script.at("start").get<Timestamp>();
        options.publisher_id = script.value("publisher_id", PublisherId{"easysensing"});
        options.esp_id = script.value("esp_id", EspId{"productiveanalytics"});
        if (auto it = script.find("rates"); it != script.end()) {
            options.rates.sp = it->value("sp_bp", options.rates.sp);
            options.rates.esp = it->value("esp_bp", options.rates.esp);
        }
        world_ = SimulationWorld::create(options);
        origin_ = options.start;
    }

    json run() {
        const auto& steps = script_.at("steps");
        std::size_t index = 0;
        for (const auto& step : steps) {
            ++index;
            const auto op = step.value("op", std::string{"?"});
            const auto expected = get_optional<std::string>(step, "expect_error");
            try {
                execute(op, step);
            } catch (const MarketError& e) {
                if (expected && *expected == to_string(e.code())) continue;
                fail(ErrorCode::ScenarioFailure, "step " + std::to_string(index) + " (" + op + "): " + e.what());
            } catch (const std::exception& e) {
                fail(ErrorCode::ScenarioFailure, "step " + std::to_string(index) + " (" + op + "): " + e.what());
            }
            if (expected)
                fail(ErrorCode::ScenarioFailure, "step " + std::to_string(index) + " (" + op + "): expected " +
                                                     *expected + " but the step succeeded");
        }
        return report(steps.size());
    }

private:
    Broker& broker() { return *world_.broker; }

    const ConsumerIdentity& consumer(const json& step) {
        const auto alias = step.at("consumer").get<std::string>();
        auto it = consumers_.find(alias);
        require(it != consumers_.end(), ErrorCode::InvalidArgument, "unknown consumer alias '" + alias + "'");
        return it->second;
    }
    template <class Map>
    auto lookup(const Map& map, const std::string& alias, const char* what) {
        auto it = map.find(alias);
        require(it != map.end(), ErrorCode::InvalidArgument, std::string("unknown ") + what + " alias '" + alias + "'");
        return it->second;
    }
    SensorId sensor_ref(const std::string& ref) {
        // Either a full sensor id or "device/local_name".
        if (auto slash = ref.find('/'); slash != std::string::npos)
            return make_sensor_id(broker().publisher_id(), DeviceId{ref.substr(0, slash)}, ref.substr(slash + 1));
        return SensorId{ref};
    }
    std::set<SensorId> sensor_refs(const json& refs) {
        std::set<SensorId> out;
        for (const auto& r : refs) out.insert(sensor_ref(r.get<std::string>()));
        return out;
    }

    static void expect_equal(const json& actual, const json& expected, const std::string& what) {
        require(actual == expected, ErrorCode::ScenarioFailure,
                what + ": expected " + expected.dump() + ", got " + actual.dump());
    }

    void execute(const std::string& op, const json& step) {
        if (op == "register_owner") {
            broker().register_owner(step.at("owner").get<SensorOwner>());
        } else if (op == "register_consumer") {
            auto identity = broker().register_consumer(step.at("organization").get<std::string>(),
                                                       step.at("category").get<std::string>(),
                                                       get_optional<ConsumerId>(step, "consumer_id"));
            consumers_.insert_or_assign(step.at("as").get<std::string>(), std::move(identity));
        } else if (op == "announce") {
            const auto a = step.at("device").get<DeviceAnnouncement>();
            tokens_[a.device_id.str()] = broker().announce_device(a).device_token;
        } else if (op == "claim") {
            broker().claim_device(step.at("device_id").get<DeviceId>(), step.at("owner_id").get<OwnerId>());
        } else if (op == "set_policy") {
            auto policy = step.at("policy");
            if (policy.contains("sensor_ids")) policy["sensor_ids"] = sensor_refs(policy["sensor_ids"]);
            broker().set_policy(step.at("owner").get<OwnerId>(), policy.get<PublicationPolicy>());
        } else if (op == "submit_offer") {
            OfferRequest request;
            request.sensor_ids = sensor_refs(step.at("sensor_ids"));
            request.options = step.at("options").get<std::vector<CompensationOption>>();
            request.term_days = get_optional<int>(step, "term_days");
            const auto offer = broker().submit_offer(request, consumer(step).certificate);
            if (step.contains("as")) offers_[step["as"].get<std::string>()] = offer.offer_id;
        } else if (op == "esp_acquire") {
            const auto& who = consumer(step);
            Requirement requirement{RequirementId{"req-" + std::to_string(++requirements_)}, who.consumer_id,
                                    step.at("requirement").get<SensorConstraints>()};
            const auto plan = world_.esp->resolve(requirement, who.certificate);
            const auto outcomes =
                world_.esp->acquire(plan, step.at("options").get<std::vector<CompensationOption>>(),
                                    step.value("term_days", 30), who.certificate,
                                    requirement.constraints.max_monthly_budget_cents);
            std::vector<OfferId> made;
            for (const auto& o : outcomes) {
                if (o.error) fail(*o.error, o.message);
                made.push_back(o.offer->offer_id);
            }
            if (step.contains("expect_offers"))
                expect_equal(made.size(), step["expect_offers"], "offers placed by the ESP");
            if (step.contains("as")) {
                const auto& as = step["as"];
                const std::vector<std::string> aliases =
                    as.is_array() ? as.get<std::vector<std::string>>() : std::vector<std::string>{as.get<std::string>()};
                require(aliases.size() <= made.size(), ErrorCode::ScenarioFailure, "ESP placed fewer offers than aliases");
                for (std::size_t i = 0; i < aliases.size(); ++i) offers_[aliases[i]] = made[i];
            }
        } else if (op == "register_interest") {
            const auto interest =
                world_.esp->register_interest(consumer(step).certificate, step.at("constraints").get<SensorConstraints>());
            interests_[step.at("as").get<std::string>()] = interest.interest_id;
        } else if (op == "owner_decide") {
            const auto offer_id = lookup(offers_, step.at("offer").get<std::string>(), "offer");
            const auto& choice = step.at("choice");
            OwnerDecision decision = OwnerDecision::reject();
            if (choice.is_number_unsigned()) {
                decision = OwnerDecision::accept(choice.get<std::size_t>());
            } else if (choice == "preferred") {
                const auto offer = broker().find_offer(offer_id);
                const auto owner = broker().find_owner(offer->owner_id);
                decision = OwnerDecision::accept(preferred_option_index(offer->options, *owner));
            } else if (choice != "reject") {
                fail(ErrorCode::InvalidArgument, "choice must be an option index, \"preferred\" or \"reject\"");
            }
            const auto result = broker().owner_decide(offer_id, decision);
            if (result.agreement && step.contains("as")) {
                agreements_[step["as"].get<std::string>()] = result.agreement->agreement_id;
                aliases_[result.agreement->agreement_id] = step["as"].get<std::string>();
            }
        } else if (op == "resolve") {
            const auto result = broker().resolve_competition(sensor_ref(step.at("sensor").get<std::string>()),
                                                             world_.clock->now(), step.value("commit", false));
            if (result.agreement && step.contains("as")) {
                agreements_[step["as"].get<std::string>()] = result.agreement->agreement_id;
                aliases_[result.agreement->agreement_id] = step["as"].get<std::string>();
            }
        } else if (op == "advance_clock") {
            Duration by = days(step.value("days", 0)) + hours(step.value("hours", 0)) + seconds(step.value("seconds", 0));
            world_.clock->advance(by);
        } else if (op == "emit") {
            const auto device = step.at("device").get<std::string>();
            const auto token = lookup(tokens_, device, "device");
            const auto sensor = make_sensor_id(broker().publisher_id(), DeviceId{device}, step.at("sensor").get<std::string>());
            const auto count = step.at("count").get<std::int64_t>();
            const Duration every = seconds(step.at("every_s").get<std::int64_t>());
            const auto value = reading_value_from_json(step.at("value"));
            const auto t0 = world_.clock->now();
            std::vector<Reading> batch;
            for (std::int64_t k = 0; k < count; ++k) batch.push_back({sensor, t0 + every * k, value, std::nullopt});
            const auto result = broker().ingest(batch, token);
            if (!result.rejected.empty()) fail(result.rejected.front().code, result.rejected.front().reason);
            world_.clock->advance(every * count);
        } else if (op == "post_cycles") {
            const auto posted = world_.ledger->post_due_cycles(world_.clock->now());
            if (step.contains("expect_entries")) expect_equal(posted.size(), step["expect_entries"], "ledger entries posted");
        } else if (op == "purchase") {
            const auto agreement = lookup(agreements_, step.at("agreement").get<std::string>(), "agreement");
            const auto entry =
                world_.ledger->redeem_discount(agreement, step.at("amount_cents").get<Cents>(), world_.clock->now());
            if (step.contains("expect_cents")) expect_equal(entry ? entry->amount_cents : 0, step["expect_cents"], "discount credited");
        } else if (op == "query") {
            const auto readings = broker().query(consumer(step).certificate, sensor_ref(step.at("sensor").get<std::string>()),
                                                 origin_, world_.clock->now());
            if (step.contains("expect_count")) expect_equal(readings.size(), step["expect_count"], "readings delivered");
            for (const auto& r : readings)
                require(!r.owner_token.empty() && r.owner_token.starts_with("anon-"), ErrorCode::ScenarioFailure,
                        "delivered reading is not pseudonymized");
        } else if (op == "cancel") {
            broker().cancel_agreement(lookup(agreements_, step.at("agreement").get<std::string>(), "agreement"));
        } else if (op == "assert") {
            check(step);
        } else {
            fail(ErrorCode::InvalidArgument, "unknown step op '" + op + "'");
        }
    }

    void check(const json& step) {
        const auto what = step.at("check").get<std::string>();
        const auto now = world_.clock->now();
        if (what == "active_agreements") {
            std::size_t active = 0;
            for (const auto& a : broker().agreements()) active += a.status_at(now) == AgreementStatus::Active;
            expect_equal(active, step.at("count"), "active agreements");
        } else if (what == "agreement") {
            const auto id = lookup(agreements_, step.at("agreement").get<std::string>(), "agreement");
            const auto a = broker().find_agreement(id);
            if (step.contains("chosen_option")) expect_equal(json(a->chosen_option), step["chosen_option"], "chosen option");
            if (step.contains("via_esp")) expect_equal(json(a->parties.esp_id ? json(*a->parties.esp_id) : json()), step["via_esp"], "via_esp");
            if (step.contains("consumer")) expect_equal(json(a->parties.consumer_id), json(consumer(step).consumer_id), "consumer");
            if (step.contains("status")) expect_equal(json(std::string(to_string(a->status_at(now)))), step["status"], "status");
            if (step.contains("sensor_ids")) expect_equal(json(a->sensor_ids), json(sensor_refs(step["sensor_ids"])), "sensors");
        } else if (what == "balance") {
            expect_equal(world_.ledger->balance(step.at("account").get<std::string>()), step.at("cents"),
                         "balance of " + step.at("account").get<std::string>());
        } else if (what == "ledger_total") {
            expect_equal(world_.ledger->total_balance(), step.value("cents", 0), "sum of balances");
        } else if (what == "ledger_entries") {
            std::optional<AgreementId> agreement;
            if (step.contains("agreement")) agreement = lookup(agreements_, step["agreement"].get<std::string>(), "agreement");
            const auto reason = get_optional<std::string>(step, "reason");
            std::size_t n = 0;
            for (const auto& e : world_.ledger->entries())
                n += (!agreement || e.agreement_id == *agreement) && (!reason || *reason == to_string(e.reason));
            expect_equal(n, step.at("count"), "ledger entries");
        } else if (what == "inbox") {
            const auto kind = step.at("kind").get<std::string>();
            std::size_t n = 0;
            for (const auto& note : broker().inbox().list(step.at("recipient").get<std::string>())) n += note.kind == kind;
            expect_equal(n, step.at("count"), "inbox notifications of kind " + kind);
        } else if (what == "offer_status") {
            const auto offer = broker().find_offer(lookup(offers_, step.at("offer").get<std::string>(), "offer"));
            expect_equal(json(offer->status), step.at("status"), "offer status");
        } else if (what == "interest_notifications") {
            const auto id = lookup(interests_, step.at("interest").get<std::string>(), "interest");
            expect_equal(world_.esp->notifications(id).size(), step.at("count"), "interest notifications");
        } else {
            fail(ErrorCode::InvalidArgument, "unknown check '" + what + "'");
        }
    }

    json report(std::size_t steps) {
        const auto now = world_.clock->now();
        json agreements = json::array();
        std::size_t active = 0;
        for (const auto& a : broker().agreements()) {
            const auto status = a.status_at(now);
            active += status == AgreementStatus::Active;
            json entry = {{"agreement_id", a.agreement_id},
                          {"consumer_id", a.parties.consumer_id},
                          {"owner_id", a.parties.owner_id},
                          {"sensor_ids", a.sensor_ids},
                          {"chosen_option", a.chosen_option},
                          {"label", describe(a.chosen_option)},
                          {"status", std::string(to_string(status))},
                          {"window", a.window}};
            put_optional(entry, "via_esp", a.parties.esp_id);
            if (auto it = aliases_.find(a.agreement_id); it != aliases_.end()) entry["alias"] = it->second;
            agreements.push_back(std::move(entry));
        }
        json balances = json::object();
        for (const auto& account : world_.ledger->accounts()) balances[account.account_id] = account.balance_cents;
        json entries = world_.ledger->entries();
        return {{"scenario", script_.value("name", std::string{"unnamed"})},
                {"steps", steps},
                {"final_time", now},
                {"agreements", std::move(agreements)},
                {"active_agreements", active},
                {"balances", std::move(balances)},
                {"ledger_total", world_.ledger->total_balance()},
                {"ledger_entries", std::move(entries)},
                {"deliveries", broker().data_plane().audit_log().size()}};
    }

    const json& script_;
    SimulationWorld world_;
    Timestamp origin_{};
    std::map<std::string, ConsumerIdentity> consumers_;
    std::map<std::string, OfferId> offers_;
    std::map<std::string, AgreementId> agreements_;
    std::map<AgreementId, std::string> aliases_;
    std::map<std::string, InterestId> interests_;
    std::map<std::string, std::string> tokens_;
    std::uint64_t requirements_ = 0;
};

} // namespace

json run_scenario(const json& script) {
    try {
        ScenarioRun run(script);
        return run.run();
    } catch (const json::exception& e) {
        fail(ErrorCode::ScenarioFailure, std::string("malformed scenario: ") + e.what());
    }
}

json reference_scenario() { return parse_json(embedded::kReferenceScenario); }

json replay_reference_scenario() { return run_scenario(reference_scenario()); }

// ---- agents ----

std::vector<Cents> sample_thresholds(const AgentPopulation& p) {
    require(p.n > 0, ErrorCode::InvalidArgument, "population must be positive");
    require(p.fraction_below >= 0.0 && p.fraction_below <= 1.0, ErrorCode::InvalidArgument,
            "fraction_below must lie in [0, 1]");
    require(0 <= p.split_cents && p.split_cents <= p.upper_cents, ErrorCode::InvalidArgument,
            "threshold bounds out of order");
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Cents> out;
    out.reserve(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        const double u = unit(rng);
        const double v = unit(rng);
        if (u < p.fraction_below)
            out.push_back(static_cast<Cents>(std::floor(v * static_cast<double>(p.split_cents))));
        else
            out.push_back(p.split_cents +
                          static_cast<Cents>(std::floor(v * static_cast<double>(p.upper_cents - p.split_cents + 1))));
    }
    return out;
}

AgentSummary run_agents(const AgentPopulation& population, int months) {
    require(months > 0, ErrorCode::InvalidArgument, "months must be positive");
    require(population.offered_yearly_cents >= 0, ErrorCode::InvalidArgument, "offered return cannot be negative");
    const auto thresholds = sample_thresholds(population);

    SimulationWorld::Options options;
    options.start = parse_rfc3339("2026-01-01T00:00:00Z");
    options.key_label = "agents";
    auto world = SimulationWorld::create(options);
    auto& broker = *world.broker;
    const auto buyer = broker.register_consumer("MarketPanel", "food-manufacturer", ConsumerId{"market-panel"});

    AgentSummary summary;
    summary.n = population.n;
    summary.monthly_fee_cents = (population.offered_yearly_cents + 11) / 12;
    const Cents yearly_value = summary.monthly_fee_cents * 12;
    std::vector<OwnerId> adopters;
    for (std::size_t i = 0; i < population.n; ++i) {
        SensorOwner owner;
        owner.owner_id = OwnerId{"agent-" + std::to_string(i)};
        owner.display_name = owner.owner_id.str();
        broker.register_owner(owner);
        if (yearly_value < thresholds[i] || summary.monthly_fee_cents == 0) continue;

        DeviceAnnouncement a;
        a.device_id = DeviceId{owner.owner_id.str() + "-fridge"};
        a.owner_hint = owner.owner_id;
        a.location = RegionTag("au/act/canberra");
        a.sensors = {{"freezer-door", "door-open-event", "event", 60.0}};
        const auto reg = broker.announce_device(a);
        PublicationPolicy policy;
        policy.sensor_ids = {reg.sensor_ids.begin(), reg.sensor_ids.end()};
        policy.published = true;
        broker.set_policy(owner.owner_id, policy);
        OfferRequest request;
        request.sensor_ids = policy.sensor_ids;
        request.options = {MonthlyFee{summary.monthly_fee_cents}};
        request.term_days = months * 30;
        const auto offer = broker.submit_offer(request, buyer.certificate);
        broker.owner_decide(offer.offer_id, OwnerDecision::accept(0));
        adopters.push_back(owner.owner_id);
    }
    summary.adopters = adopters.size();
    summary.adoption_fraction = static_cast<double>(adopters.size()) / static_cast<double>(population.n);

    for (int m = 0; m < months; ++m) {
        world.ledger->post_due_cycles(world.clock->now());
        world.clock->advance(kBillingMonth);
    }
    const auto entries = world.ledger->entries();
    std::vector<int> paybacks;
    for (const auto& owner : adopters) {
        const auto report = payback_report(entries, owner, population.device_premium_cents, months, options.start);
        if (report.months) paybacks.push_back(*report.months);
    }
    summary.payback_reached = paybacks.size();
    if (!paybacks.empty()) {
        std::sort(paybacks.begin(), paybacks.end());
        const auto n = paybacks.size();
        summary.median_payback_months =
            n % 2 ? paybacks[n / 2] : (paybacks[n / 2 - 1] + paybacks[n / 2]) / 2.0;
    }
    return summary;
}

json to_json_report(const FleetStats& stats) {
    json sensors = json::object();
    for (const auto& [id, n] : stats.emitted)
        sensors[id.str()] = {{"emitted", n}, {"accepted", stats.accepted.contains(id) ? stats.accepted.at(id) : 0}};
    json errors = json::object();
    for (const auto& [id, msg] : stats.device_errors) errors[id.str()] = msg;
    return {{"sensors", std::move(sensors)}, {"rejected", stats.rejected}, {"device_errors", std::move(errors)}};
}

json to_json_report(const AgentSummary& s) {
    json j = {{"agents", s.n},
              {"adopters", s.adopters},
              {"adoption_fraction", s.adoption_fraction},
              {"monthly_fee_cents", s.monthly_fee_cents},
              {"payback_reached", s.payback_reached}};
    if (s.median_payback_months)
        j["median_payback_months"] = *s.median_payback_months;
    else
        j["median_payback_months"] = "not reached";
    return j;
}

} // namespace sensemarket
