// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <httplib.h>

#include <fstream>
#include <map>
#include <thread>

#include "market_fixture.hpp"
#include "sensemarket/codec.hpp"
#include "sensemarket/gateway.hpp"

namespace sensemarket {
namespace {

using nlohmann::json;

TEST(DeploymentConfigTest, ParsesKeyValueLinesWithComments) {
    const auto config = DeploymentConfig::parse(R"(
# publisher side
publisher_id = westsense
listen=0.0.0.0:9090
r_sp=0.12
r_esp = 0.03
mode=simulation
role=sp
credit_floor_cents=-500
simulation_start=2026-03-01T00:00:00Z
)");
    EXPECT_EQ(config.publisher_id.str(), "westsense");
    EXPECT_EQ(config.listen_host, "0.0.0.0");
    EXPECT_EQ(config.listen_port, 9090);
    EXPECT_EQ(config.rates.sp, 1200);
    EXPECT_EQ(config.rates.esp, 300);
    EXPECT_EQ(config.mode, DeploymentMode::Simulation);
    EXPECT_EQ(config.role, DeploymentRole::Sp);
    EXPECT_EQ(config.credit_floor_cents, Cents{-500});
    EXPECT_EQ(config.simulation_start, parse_rfc3339("2026-03-01T00:00:00Z"));
    EXPECT_NO_THROW(config.validate());
}

TEST(DeploymentConfigTest, RejectsBadInput) {
    auto code_of = [](const std::string& text) {
        try {
            DeploymentConfig::parse(text);
        } catch (const MarketError& e) {
            return e.code();
        }
        return ErrorCode::Internal;
    };
    EXPECT_EQ(code_of("colour=blue"), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of("listen=8080"), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of("r_sp=1.5"), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of("r_sp=ten"), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of("mode=production"), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of("just words"), ErrorCode::InvalidArgument);
}

TEST(DeploymentConfigTest, RatesSummingToOneAreRefused) {
    auto config = DeploymentConfig::parse("r_sp=0.6\nr_esp=0.4\nmode=simulation\n");
    EXPECT_THROW(config.validate(), MarketError);
    EXPECT_THROW(Deployment{config}, MarketError);
}

TEST(DeploymentConfigTest, EnvironmentOverridesFile) {
    auto config = DeploymentConfig::parse("r_sp=0.10\npublisher_id=easysensing\n");
    const std::map<std::string, std::string> env = {{"MKT_R_SP", "0.2"}, {"MKT_OFFER_TTL_DAYS", "3"}};
    config.apply_env([&](const std::string& name) -> std::optional<std::string> {
        auto it = env.find(name);
        return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
    });
    EXPECT_EQ(config.rates.sp, 2000);
    EXPECT_EQ(config.offer_ttl_days, 3);
    EXPECT_EQ(config.publisher_id.str(), "easysensing");
}

TEST(DeploymentConfigTest, ParsesPeers) {
    const auto peers = parse_peers("# peers\n\nwestsense, http://127.0.0.1:9001\neastsense,http://10.0.0.2:80\n");
    ASSERT_EQ(peers.size(), 2U);
    EXPECT_EQ(peers[0].publisher_id.str(), "westsense");
    EXPECT_EQ(peers[0].base_url, "http://127.0.0.1:9001");
    EXPECT_EQ(peers[1].publisher_id.str(), "eastsense");
    EXPECT_THROW(parse_peers("westsense http://x"), MarketError);
    EXPECT_THROW(parse_peers("Bad Id,http://x"), MarketError);
}

TEST(DeploymentTest, SimulationKeysAreStableWithoutAFile) {
    DeploymentConfig config;
    config.mode = DeploymentMode::Simulation;
    Deployment a(config);
    Deployment b(config);
    const auto cert = a.authority().issue(ConsumerId{"c"}, "Org", "research", a.clock().now() + days(1));
    EXPECT_TRUE(b.authority().is_valid(cert, b.clock().now()));
}

TEST(DeploymentTest, KeysFileIsCreatedOnceAndShared) {
    const auto dir = testing::temp_dir("keys");
    DeploymentConfig config;
    config.keys_file = dir / "keys.json";
    Deployment first(config);
    ASSERT_TRUE(std::filesystem::exists(dir / "keys.json"));
    Deployment second(config);
    const auto cert = first.authority().issue(ConsumerId{"c"}, "Org", "research", first.clock().now() + days(1));
    EXPECT_TRUE(second.authority().is_valid(cert, second.clock().now()));
    std::filesystem::remove_all(dir);
}

TEST(DeploymentTest, SimulatedClockResumesAfterRestart) {
    const auto dir = testing::temp_dir("clock");
    DeploymentConfig config;
    config.mode = DeploymentMode::Simulation;
    config.data_dir = dir;
    Timestamp reached{};
    {
        Deployment first(config);
        reached = first.advance_clock(days(40) + hours(3));
        EXPECT_EQ(reached, config.simulation_start + days(40) + hours(3));
    }
    Deployment second(config);
    EXPECT_EQ(second.clock().now(), reached);

    DeploymentConfig live;
    Deployment service(live);
    EXPECT_THROW(service.advance_clock(days(1)), MarketError);
    std::filesystem::remove_all(dir);
}

/// A deployment served on an ephemeral port for the lifetime of the object.
struct Served {
    Deployment deployment;
    HttpGateway gateway;
    int port = 0;
    std::thread thread;

    explicit Served(DeploymentConfig config) : deployment(std::move(config)), gateway(deployment) {
        port = gateway.bind("127.0.0.1", 0);
        thread = std::thread([this] { gateway.serve(); });
        httplib::Client probe(url());
        for (int i = 0; i < 200; ++i) {
            if (auto r = probe.Get("/v1/health"); r && r->status == 200) break;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    }
    ~Served() {
        gateway.stop();
        thread.join();
    }
    [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

DeploymentConfig simulation(const std::string& publisher) {
    DeploymentConfig config;
    config.mode = DeploymentMode::Simulation;
    config.publisher_id = PublisherId{publisher};
    return config;
}

json post(httplib::Client& c, const std::string& path, const json& body, int expect,
          const httplib::Headers& headers = {}) {
    auto r = c.Post(path, headers, body.dump(), "application/json");
    EXPECT_TRUE(r) << path;
    if (!r) return {};
    EXPECT_EQ(r->status, expect) << path << ": " << r->body;
    return json::parse(r->body);
}

json get(httplib::Client& c, const std::string& path, int expect, const httplib::Headers& headers = {}) {
    auto r = c.Get(path, headers);
    EXPECT_TRUE(r) << path;
    if (!r) return {};
    EXPECT_EQ(r->status, expect) << path << ": " << r->body;
    return json::parse(r->body);
}

httplib::Headers bearer(const json& identity) {
    return {{"Authorization", "Bearer " + identity.at("certificate_token").get<std::string>()}};
}

/// Registers mike with a published two-sensor fridge device.
void seed_fridge(httplib::Client& c) {
    post(c, "/v1/owners",
         {{"owner_id", "mike"},
          {"vendor_affinities", {"dairyicecream"}},
          {"expected_monthly_spend_cents", {{"dairyicecream", 4000}}}},
         201);
    const auto reg = post(c, "/v1/devices/announce",
                          {{"device_id", "mike-fridge"},
                           {"owner_hint", "mike"},
                           {"location", "au/act/canberra/turner"},
                           {"sensors",
                            {{{"local_name", "rfid-reader"}, {"phenomenon", "rfid-read-event"}},
                             {{"local_name", "door"}, {"phenomenon", "door-open-event"}}}}},
                          201);
    EXPECT_EQ(reg.at("sensor_ids").size(), 2U);
    post(c, "/v1/owners/mike/policies", {{"sensor_ids", reg.at("sensor_ids")}, {"published", true}}, 201);
}

TEST(HttpGatewayTest, OfferDecisionRoundTrip) {
    Served sp(simulation("easysensing"));
    httplib::Client c(sp.url());

    const auto health = get(c, "/v1/health", 200);
    EXPECT_EQ(health.at("publisher_id"), "easysensing");
    EXPECT_EQ(health.at("mode"), "simulation");

    seed_fridge(c);
    const auto consumer = post(c, "/v1/consumers/register",
                               {{"organization_name", "Dairy Ice Cream"}, {"consumer_category", "retail"}}, 201);
    EXPECT_EQ(consumer.at("consumer_id"), "dairy-ice-cream");

    const auto found = get(c, "/v1/catalog/search?phenomenon=rfid-read-event", 200, bearer(consumer));
    ASSERT_EQ(found.at("sensors").size(), 1U);
    EXPECT_EQ(found.at("sensors")[0].at("sensor_id"), "easysensing.mike-fridge.rfid-reader");

    const auto offer = post(c, "/v1/offers",
                            {{"sensor_ids", {"easysensing.mike-fridge.rfid-reader", "easysensing.mike-fridge.door"}},
                             {"options",
                              {{{"type", "purchase_discount"}, {"basis_points", 300}, {"vendor_id", "dairyicecream"}},
                               {{"type", "monthly_fee"}, {"amount_cents", 100}}}}},
                            201, bearer(consumer));
    EXPECT_EQ(offer.at("status"), "pending");
    const auto offer_id = offer.at("offer_id").get<std::string>();

    const auto inbox = get(c, "/v1/owners/mike/inbox", 200);
    ASSERT_FALSE(inbox.at("notifications").empty());

    const auto decided = post(c, "/v1/offers/" + offer_id + "/decision", {{"decision", "accept"}, {"option_index", 0}}, 200);
    EXPECT_EQ(decided.at("offer").at("status"), "accepted");
    const auto agreement_id = decided.at("agreement").at("agreement_id").get<std::string>();

    const auto listed = get(c, "/v1/agreements?owner=mike", 200);
    ASSERT_EQ(listed.at("agreements").size(), 1U);
    EXPECT_EQ(listed.at("agreements")[0].at("status"), "active");
    EXPECT_EQ(listed.at("agreements")[0].at("agreement_id"), agreement_id);

    const auto redeemed = post(c, "/v1/ledger/redeem", {{"agreement_id", agreement_id}, {"purchase_cents", 4000}}, 200);
    EXPECT_EQ(redeemed.at("entry").at("amount_cents"), 120);
    EXPECT_EQ(get(c, "/v1/ledger/accounts", 200).at("total_cents"), 0);

    // A decided offer stays decided; the error body is machine-readable.
    const auto again = post(c, "/v1/offers/" + offer_id + "/decision", {{"decision", "reject"}}, 412);
    EXPECT_EQ(again.at("error").at("code"), "failed-precondition");
}

TEST(HttpGatewayTest, ErrorsCarryCodeAndStatus) {
    Served sp(simulation("easysensing"));
    httplib::Client c(sp.url());

    EXPECT_EQ(get(c, "/v1/owners/nobody", 404).at("error").at("code"), "not-found");
    EXPECT_EQ(get(c, "/v1/catalog/search", 401).at("error").at("code"), "unauthenticated");
    EXPECT_EQ(get(c, "/v1/nothing-here", 404).at("error").at("code"), "not-found");
    EXPECT_EQ(post(c, "/v1/owners", json::object(), 400).at("error").at("code"), "invalid-argument");

    auto r = c.Post("/v1/owners", "{not json", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 400);

    json forged = post(c, "/v1/consumers/register",
                       {{"organization_name", "Forger"}, {"consumer_category", "retail"}}, 201);
    auto cert = forged.at("certificate").get<Certificate>();
    cert.consumer_category = "government";
    const httplib::Headers tampered = {{"Authorization", "Bearer " + encode_certificate_token(cert)}};
    EXPECT_EQ(get(c, "/v1/catalog/search", 401, tampered).at("error").at("code"), "unauthenticated");

    EXPECT_EQ(post(c, "/v1/ledger/post-cycles", {{"as_of", "2030-01-01T00:00:00Z"}}, 412).at("error").at("code"),
              "failed-precondition");
}

TEST(HttpGatewayTest, ClockAdvanceOnlyInSimulation) {
    Served sim(simulation("easysensing"));
    httplib::Client c(sim.url());
    const auto before = get(c, "/v1/health", 200).at("time").get<Timestamp>();
    const auto after = post(c, "/v1/admin/clock/advance", {{"days", 2}}, 200).at("time").get<Timestamp>();
    EXPECT_EQ(after - before, days(2));

    auto service = simulation("easysensing");
    service.mode = DeploymentMode::Service;
    Served live(service);
    httplib::Client l(live.url());
    post(l, "/v1/admin/clock/advance", {{"days", 2}}, 412);
}

TEST(HttpGatewayTest, EspReachesRemotePublisherOverHttp) {
    const auto dir = testing::temp_dir("gateway-peers");
    auto sp_config = simulation("westsense");
    sp_config.role = DeploymentRole::Sp;
    sp_config.keys_file = dir / "keys.json";
    Served sp(sp_config);
    httplib::Client c(sp.url());
    seed_fridge(c);

    {
        std::ofstream peers(dir / "peers.txt");
        peers << "westsense," << sp.url() << "\n";
        peers << "ghostsense,http://127.0.0.1:1\n";
    }
    auto esp_config = simulation("easysensing");
    esp_config.role = DeploymentRole::Esp;
    esp_config.keys_file = dir / "keys.json";
    esp_config.peers_file = dir / "peers.txt";
    Served esp(esp_config);
    httplib::Client e(esp.url());

    // The ESP has no publisher role of its own, so publisher routes are not mounted.
    EXPECT_EQ(get(e, "/v1/owners/mike", 404).at("error").at("code"), "not-found");

    const auto consumer = post(c, "/v1/consumers/register",
                               {{"organization_name", "Productive Analytics"}, {"consumer_category", "research"}}, 201);
    const auto plan = post(e, "/v1/requirements/resolve", {{"phenomenon_group", "household-appliance-usage"}}, 200,
                           bearer(consumer));
    EXPECT_TRUE(plan.at("degraded").get<bool>());
    EXPECT_EQ(plan.at("unreachable"), json::array({"ghostsense"}));
    ASSERT_EQ(plan.at("entries").size(), 1U);
    EXPECT_EQ(plan.at("entries")[0].at("publisher_id"), "westsense");
    EXPECT_EQ(plan.at("entries")[0].at("sensors").size(), 2U);

    const auto acquired = post(e, "/v1/requirements/acquire",
                               {{"plan", plan}, {"options", {{{"type", "monthly_fee"}, {"amount_cents", 100}}}}}, 200,
                               bearer(consumer));
    ASSERT_EQ(acquired.at("outcomes").size(), 1U);
    const auto& outcome = acquired.at("outcomes")[0];
    ASSERT_TRUE(outcome.contains("offer")) << outcome.dump();
    EXPECT_EQ(outcome.at("offer").at("via_esp"), "productiveanalytics");
    EXPECT_EQ(outcome.at("offer").at("publisher_id"), "westsense");

    const auto offers = get(c, "/v1/owners/mike/offers?status=pending", 200);
    EXPECT_EQ(offers.at("offers").size(), 1U);

    std::filesystem::remove_all(dir);
}

TEST(HttpGatewayTest, HttpPortMapsRemoteErrors) {
    Served sp(simulation("easysensing"));
    httplib::Client c(sp.url());
    seed_fridge(c);
    const auto identity = post(c, "/v1/consumers/register",
                               {{"organization_name", "Golden Cheese"}, {"consumer_category", "retail"}}, 201)
                              .get<ConsumerIdentity>();

    HttpPublisherPort port(PublisherId{"easysensing"}, sp.url());
    CatalogQuery query;
    query.group = "household-appliance-usage";
    EXPECT_EQ(port.search(query, identity.certificate).size(), 2U);

    OfferRequest request;
    request.sensor_ids = {SensorId{"easysensing.nowhere.x"}};
    request.options = {MonthlyFee{100}};
    try {
        port.submit_offer(request, identity.certificate);
        FAIL() << "expected not-found";
    } catch (const MarketError& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
    }

    HttpPublisherPort dead(PublisherId{"ghostsense"}, "http://127.0.0.1:1");
    try {
        (void)dead.search(query, identity.certificate);
        FAIL() << "expected unavailable";
    } catch (const MarketError& e) {
        EXPECT_EQ(e.code(), ErrorCode::Unavailable);
    }
}

} // namespace
} // namespace sensemarket
