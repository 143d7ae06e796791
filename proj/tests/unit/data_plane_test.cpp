// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "market_fixture.hpp"
#include "sensemarket/journal.hpp"

namespace sensemarket {
namespace {

using testing::t0;

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const MarketError& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

SensorDescriptor descriptor(const std::string& id, const std::string& owner = "mike") {
    SensorDescriptor d;
    d.sensor_id = SensorId{id};
    d.device_id = DeviceId{"dev"};
    d.owner_id = OwnerId{owner};
    d.local_name = "s";
    d.phenomenon = "temperature";
    d.unit = "Cel";
    d.location = RegionTag("au/act/canberra/mike-home");
    d.publisher_id = PublisherId{"sp"};
    return d;
}

Reading at(const std::string& sensor, Timestamp ts, double v = 1.0) { return Reading{SensorId{sensor}, ts, v, {}}; }

struct Plane : ::testing::Test {
    std::shared_ptr<SimulatedClock> clock = std::make_shared<SimulatedClock>(t0());
    DataPlane plane{PublisherId{"sp"}, clock, KeyedHasher(seed_from_label("k"))};

    void SetUp() override {
        plane.bind_sensor(descriptor("s1"));
        plane.bind_sensor(descriptor("s2"));
    }
    IngestResult put(std::vector<Reading> batch) { return plane.ingest(batch); }
    void grant(const std::string& agreement, const std::string& consumer, Timestamp start, Timestamp end,
               std::set<std::string> sensors = {"s1"}) {
        Entitlement e;
        e.agreement_id = AgreementId{agreement};
        e.consumer_id = ConsumerId{consumer};
        for (const auto& s : sensors) e.sensor_ids.insert(SensorId{s});
        e.window = {start, end};
        plane.grant(e);
    }
};

TEST_F(Plane, IngestAcceptsOrderedAndRejectsPerItem) {
    auto r = put({at("s1", t0()), at("s1", t0() + seconds(1)), at("s1", t0() + seconds(2))});
    EXPECT_EQ(r.accepted, 3u);
    r = put({at("s1", t0() + seconds(2)), at("s1", t0() + seconds(3)), at("ghost", t0()),
             Reading{SensorId{"s2"}, t0(), 1.0, 1.5}});
    EXPECT_EQ(r.accepted, 1u);
    ASSERT_EQ(r.rejected.size(), 3u);
    EXPECT_EQ(r.rejected[0].index, 0u);
    EXPECT_EQ(r.rejected[0].code, ErrorCode::InvalidArgument);
    EXPECT_EQ(r.rejected[1].index, 2u);
    EXPECT_EQ(r.rejected[1].code, ErrorCode::NotFound);
    EXPECT_EQ(r.rejected[2].index, 3u);
    EXPECT_EQ(plane.readings(SensorId{"s1"}).size(), 4u);
}

TEST_F(Plane, ForeignSensorCannotBeBound) {
    auto foreign = descriptor("x");
    foreign.publisher_id = PublisherId{"other"};
    EXPECT_EQ(code_of([&] { plane.bind_sensor(foreign); }), ErrorCode::PermissionDenied);
}

TEST_F(Plane, QueryRequiresEntitlementAndAnonymizes) {
    put({at("s1", t0() + seconds(1), 4.5)});
    EXPECT_EQ(code_of([&] { (void)plane.query(ConsumerId{"c"}, SensorId{"s1"}, t0(), t0() + days(1)); }),
              ErrorCode::PermissionDenied);
    grant("a1", "c", t0(), t0() + days(30));
    const auto out = plane.query(ConsumerId{"c"}, SensorId{"s1"}, t0(), t0() + days(1));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].region, "au/act");
    EXPECT_EQ(out[0].owner_token, plane.owner_token(OwnerId{"mike"}));
    EXPECT_NE(out[0].owner_token.find("anon-"), std::string::npos);
    EXPECT_EQ(out[0].owner_token.find("mike"), std::string::npos);
    EXPECT_EQ(std::get<double>(out[0].value), 4.5);
    // Other consumers and sensors stay closed.
    EXPECT_EQ(code_of([&] { (void)plane.query(ConsumerId{"d"}, SensorId{"s1"}, t0(), t0() + days(1)); }),
              ErrorCode::PermissionDenied);
    EXPECT_EQ(code_of([&] { (void)plane.query(ConsumerId{"c"}, SensorId{"s2"}, t0(), t0() + days(1)); }),
              ErrorCode::PermissionDenied);
}

TEST_F(Plane, OwnerTokenIsStableAndKeyed) {
    DataPlane other(PublisherId{"sp"}, clock, KeyedHasher(seed_from_label("other-key")));
    EXPECT_EQ(plane.owner_token(OwnerId{"mike"}), plane.owner_token(OwnerId{"mike"}));
    EXPECT_NE(plane.owner_token(OwnerId{"mike"}), plane.owner_token(OwnerId{"anna"}));
    EXPECT_NE(plane.owner_token(OwnerId{"mike"}), other.owner_token(OwnerId{"mike"}));
    for (const auto* raw : {"mike", "anna", "anon-mike"}) EXPECT_NE(plane.owner_token(OwnerId{raw}), raw);
}

// Oracle: keep readings with max(from, start) <= ts < min(to, end).
TEST_F(Plane, QueryRangeIsClippedToTheWindow) {
    std::vector<Reading> batch;
    for (int h = 0; h < 200; ++h) batch.push_back(at("s1", t0() + hours(h), h));
    put(batch);
    const auto start = t0() + hours(50), end = t0() + hours(120);
    grant("a1", "c", start, end);
    clock->advance(hours(60));
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> hour(-10, 210);
    for (int i = 0; i < 300; ++i) {
        auto a = t0() + hours(hour(rng)), b = t0() + hours(hour(rng));
        if (b < a) std::swap(a, b);
        std::vector<Timestamp> oracle;
        for (const auto& r : batch)
            if (std::max(a, start) <= r.ts && r.ts < std::min(b, end)) oracle.push_back(r.ts);
        std::vector<Timestamp> got;
        for (const auto& r : plane.query(ConsumerId{"c"}, SensorId{"s1"}, a, b)) got.push_back(r.ts);
        ASSERT_EQ(got, oracle);
    }
}

TEST_F(Plane, RevocationClosesQueriesAndStreams) {
    grant("a1", "c", t0(), t0() + days(30));
    auto sub = plane.subscribe(ConsumerId{"c"}, SensorId{"s1"});
    put({at("s1", t0() + seconds(1))});
    plane.revoke(AgreementId{"a1"}, clock->now());
    put({at("s1", t0() + seconds(2))});
    EXPECT_TRUE(sub->closed());
    EXPECT_EQ(sub->drain().size(), 1u);
    EXPECT_TRUE(sub->finished());
    EXPECT_EQ(code_of([&] { (void)plane.query(ConsumerId{"c"}, SensorId{"s1"}, t0(), t0() + days(1)); }),
              ErrorCode::PermissionDenied);
    EXPECT_EQ(code_of([&] { (void)plane.subscribe(ConsumerId{"c"}, SensorId{"s1"}); }), ErrorCode::PermissionDenied);
}

TEST_F(Plane, StreamDeliversInOrderAndClosesAtWindowEnd) {
    grant("a1", "c", t0(), t0() + hours(1));
    auto sub = plane.subscribe(ConsumerId{"c"}, SensorId{"s1"});
    for (int m = 1; m <= 5; ++m) {
        clock->advance(std::chrono::minutes(10));
        put({at("s1", clock->now(), m)});
    }
    clock->advance(std::chrono::minutes(15));
    put({at("s1", clock->now(), 99)}); // 75 min: outside the window
    EXPECT_TRUE(sub->closed());
    const auto got = sub->drain();
    ASSERT_EQ(got.size(), 5u);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(std::get<double>(got[i].value), static_cast<double>(i + 1));
}

TEST_F(Plane, SweepClosesExpiredSubscriptions) {
    grant("a1", "c", t0(), t0() + hours(1));
    auto sub = plane.subscribe(ConsumerId{"c"}, SensorId{"s1"});
    clock->advance(hours(2));
    plane.sweep();
    EXPECT_TRUE(sub->finished());
    EXPECT_FALSE(sub->next(std::chrono::milliseconds(1)));
}

TEST_F(Plane, BlockingNextWakesOnIngest) {
    grant("a1", "c", t0(), t0() + days(1));
    auto sub = plane.subscribe(ConsumerId{"c"}, SensorId{"s1"});
    std::thread writer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        put({at("s1", t0() + seconds(1), 7)});
    });
    const auto got = sub->next(std::chrono::seconds(5));
    writer.join();
    ASSERT_TRUE(got);
    EXPECT_EQ(std::get<double>(got->value), 7.0);
}

// Readings streamed to a subscriber equal a query over the same interval.
TEST_F(Plane, StreamAndQueryAgree) {
    grant("a1", "c", t0(), t0() + days(30), {"s1", "s2"});
    auto sub = plane.subscribe(ConsumerId{"c"}, SensorId{"s2"});
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> gap(1, 3600);
    Timestamp ts = t0();
    for (int i = 0; i < 200; ++i) {
        ts += seconds(gap(rng));
        clock->set(std::max(clock->now(), ts));
        put({at(i % 3 ? "s2" : "s1", ts, i)});
    }
    const auto streamed = sub->drain();
    const auto queried = plane.query(ConsumerId{"c"}, SensorId{"s2"}, t0(), t0() + days(30));
    EXPECT_EQ(streamed, queried);
}

TEST_F(Plane, EveryDeliveryIsAudited) {
    grant("a1", "c", t0(), t0() + days(1));
    auto sub = plane.subscribe(ConsumerId{"c"}, SensorId{"s1"});
    put({at("s1", t0() + seconds(1)), at("s1", t0() + seconds(2))});
    (void)plane.query(ConsumerId{"c"}, SensorId{"s1"}, t0(), t0() + days(1));
    const auto audit = plane.audit_log();
    ASSERT_EQ(audit.size(), 4u);
    const auto entitlements = plane.entitlements();
    for (const auto& record : audit) {
        EXPECT_EQ(record.agreement_id, AgreementId{"a1"});
        EXPECT_TRUE(entitlements[0].covers(record.consumer_id, record.sensor_id, record.reading_ts, record.delivered_at));
    }
}

TEST(PlaneStorage, PersistsPerSensorAndSurvivesTornTail) {
    const auto dir = testing::temp_dir("plane");
    auto clock = std::make_shared<SimulatedClock>(t0());
    {
        DataPlane plane(PublisherId{"sp"}, clock, KeyedHasher(seed_from_label("k")), dir);
        plane.bind_sensor(descriptor("s1"));
        std::vector<Reading> batch{at("s1", t0() + seconds(1), 1), Reading{SensorId{"s1"}, t0() + seconds(2),
                                                                           std::string("open"), 0.5}};
        plane.ingest(batch);
    }
    ASSERT_TRUE(std::filesystem::exists(dir / "s1.jsonl"));
    {
        std::ofstream torn(dir / "s1.jsonl", std::ios::app);
        torn << R"({"sensor_id":"s1","ts":"2026-01-05T09:)";
    }
    DataPlane again(PublisherId{"sp"}, clock, KeyedHasher(seed_from_label("k")), dir);
    again.bind_sensor(descriptor("s1"));
    const auto readings = again.readings(SensorId{"s1"});
    ASSERT_EQ(readings.size(), 2u);
    EXPECT_EQ(std::get<std::string>(readings[1].value), "open");
    EXPECT_EQ(readings[1].quality, 0.5);
    std::filesystem::remove_all(dir);
}

TEST(PlaneStorage, RetentionCapKeepsNewest) {
    auto clock = std::make_shared<SimulatedClock>(t0());
    DataPlane plane(PublisherId{"sp"}, clock, KeyedHasher(seed_from_label("k")), std::nullopt, 3);
    plane.bind_sensor(descriptor("s1"));
    std::vector<Reading> batch;
    for (int i = 1; i <= 5; ++i) batch.push_back(at("s1", t0() + seconds(i), i));
    EXPECT_EQ(plane.ingest(batch).accepted, 5u);
    const auto kept = plane.readings(SensorId{"s1"});
    ASSERT_EQ(kept.size(), 3u);
    EXPECT_EQ(std::get<double>(kept.front().value), 3.0);
}

TEST(Journal, TornTailDroppedButMidFileCorruptionFails) {
    const auto dir = testing::temp_dir("journal");
    const auto path = dir / "j.jsonl";
    {
        JsonLinesLog log(path);
        log.append({{"n", 1}});
        log.append({{"n", 2}});
    }
    { std::ofstream(path, std::ios::app) << "{\"n\":"; }
    EXPECT_EQ(JsonLinesLog::read_all(path).size(), 2u);
    { std::ofstream(path, std::ios::app) << "\n{\"n\":3}\n"; }
    EXPECT_EQ(code_of([&] { (void)JsonLinesLog::read_all(path); }), ErrorCode::Internal);
    EXPECT_TRUE(JsonLinesLog::read_all(dir / "missing.jsonl").empty());
    std::filesystem::remove_all(dir);
}

TEST(InboxTest, ListAfterAndLongPoll) {
    Inbox inbox;
    inbox.post("mike", "a", t0(), {});
    inbox.post("anna", "b", t0(), {});
    inbox.post("mike", "c", t0(), {});
    const auto all = inbox.list("mike");
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(inbox.list("mike", all[0].seq).size(), 1u);
    EXPECT_TRUE(inbox.wait("mike", all[1].seq, std::chrono::milliseconds(10)).empty());
    std::thread poster([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        inbox.post("mike", "d", t0(), {});
    });
    const auto woke = inbox.wait("mike", all[1].seq, std::chrono::seconds(5));
    poster.join();
    ASSERT_EQ(woke.size(), 1u);
    EXPECT_EQ(woke[0].kind, "d");
}

TEST(BrokerData, DeviceTokenGuardsIngest) {
    testing::Market m;
    m.owner("mike");
    const auto fridge = m.device("mike", "fridge", "au/act/canberra", {{"door", "door-open-event"}});
    const auto meter = m.device("mike", "meter", "au/act/canberra", {{"power", "power-consumption"}});
    EXPECT_FALSE(fridge.device_token.empty());
    EXPECT_NE(fridge.device_token, meter.device_token);
    std::vector<Reading> batch{Reading{fridge.sensor_ids[0], t0(), std::string("open"), {}},
                               Reading{meter.sensor_ids[0], t0(), 3.0, {}}};
    auto r = m.broker->ingest(batch, fridge.device_token);
    EXPECT_EQ(r.accepted, 1u);
    ASSERT_EQ(r.rejected.size(), 1u);
    EXPECT_EQ(r.rejected[0].index, 1u);
    EXPECT_EQ(r.rejected[0].code, ErrorCode::PermissionDenied);
    r = m.broker->ingest(batch, std::string("bogus"));
    EXPECT_EQ(r.accepted, 0u);
    EXPECT_EQ(r.rejected.size(), 2u);
    EXPECT_EQ(r.rejected[0].code, ErrorCode::Unauthenticated);
}

} // namespace
} // namespace sensemarket
