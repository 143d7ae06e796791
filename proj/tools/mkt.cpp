// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

// mkt: runs the marketplace server and talks to it over /v1.

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ranges.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "sensemarket/codec.hpp"
#include "sensemarket/gateway.hpp"

using namespace sensemarket;
using namespace sensemarket::cli;
using nlohmann::json;

namespace {

HttpGateway* g_gateway = nullptr;

void on_signal(int) {
    if (g_gateway) g_gateway->stop();
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, sep);)
        if (!item.empty()) out.push_back(item);
    return out;
}

json options_json(const std::vector<std::int64_t>& fees, const std::vector<std::string>& discounts) {
    json options = json::array();
    for (const auto& d : discounts) {
        const auto colon = d.find(':');
        if (colon == std::string::npos) throw MarketError(ErrorCode::InvalidArgument, "--discount takes BP:VENDOR");
        options.push_back({{"type", "purchase_discount"},
                           {"basis_points", std::stoi(d.substr(0, colon))},
                           {"vendor_id", d.substr(colon + 1)}});
    }
    for (auto f : fees) options.push_back({{"type", "monthly_fee"}, {"amount_cents", f}});
    return options;
}

std::string option_label(const json& option) {
    return describe(option.get<CompensationOption>());
}

void print_sensors(const json& sensors) {
    fmt::print("{:<44} {:<18} {:<8} {:<28} {}\n", "SENSOR", "PHENOMENON", "UNIT", "LOCATION", "OWNER");
    for (const auto& s : sensors)
        fmt::print("{:<44} {:<18} {:<8} {:<28} {}\n", s.value("sensor_id", ""), s.value("phenomenon", ""),
                   s.value("unit", ""), s.value("location", ""), s.value("owner_id", ""));
    fmt::print("{} sensor(s)\n", sensors.size());
}

void print_offer(const json& o) {
    fmt::print("{}  {}  from {}{}  status {}\n", o.value("offer_id", ""), fmt::format("{}", fmt::join(o["sensor_ids"].get<std::vector<std::string>>(), ",")),
               o.value("consumer_id", ""), o.contains("via_esp") ? " via " + o["via_esp"].get<std::string>() : "",
               o.value("status", ""));
    std::size_t i = 0;
    for (const auto& opt : o["options"]) fmt::print("    [{}] {}\n", i++, option_label(opt));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensing marketplace server and client"};
    app.require_subcommand(1);
    std::string url = default_url();
    bool as_json = false;
    std::string cert_value, cert_file;
    app.add_option("--url", url, "Server base URL ($MKT_URL)");
    app.add_flag("--json", as_json, "Print raw JSON responses");
    app.add_option("--cert", cert_value, "Consumer certificate token ($MKT_CERT)");
    app.add_option("--cert-file", cert_file, "File holding the certificate token");

    auto client = [&] {
        ApiClient c(url);
        if (auto token = certificate_token(cert_value, cert_file)) c.set_certificate(*token);
        return c;
    };
    auto emit = [&](const json& body, const std::function<void()>& human) {
        if (as_json)
            std::cout << body.dump(2) << '\n';
        else
            human();
        return kExitOk;
    };
    std::function<int()> action;

    // serve
    auto* serve = app.add_subcommand("serve", "Run the marketplace HTTP server");
    std::string config_file, role, mode, listen, data_dir, peers;
    serve->add_option("--config", config_file, "key=value configuration file");
    serve->add_option("--role", role, "sp, esp or all");
    serve->add_option("--mode", mode, "service or simulation");
    serve->add_option("--listen", listen, "host:port");
    serve->add_option("--data-dir", data_dir, "Persistence directory");
    serve->add_option("--peers", peers, "Peers file for the ESP role");
    serve->callback([&] {
        action = [&] {
            auto config = config_file.empty() ? DeploymentConfig{} : DeploymentConfig::load(config_file);
            config.apply_process_env();
            if (!role.empty()) config.set("role", role);
            if (!mode.empty()) config.set("mode", mode);
            if (!listen.empty()) config.set("listen", listen);
            if (!data_dir.empty()) config.set("data_dir", data_dir);
            if (!peers.empty()) config.set("peers_file", peers);
            Deployment deployment(config);
            HttpGateway gateway(deployment);
            const int port = gateway.bind(config.listen_host, config.listen_port);
            g_gateway = &gateway;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on " << config.listen_host << ':' << port << " role="
                      << to_string(config.role) << " mode=" << to_string(config.mode) << std::endl;
            gateway.serve();
            g_gateway = nullptr;
            return kExitOk;
        };
    });

    auto* health = app.add_subcommand("health", "GET /v1/health");
    health->callback([&] {
        action = [&] {
            const auto h = client().get("/v1/health");
            return emit(h, [&] { fmt::print("{} publisher={} role={} mode={} time={}\n", h.value("status", ""),
                                            h.value("publisher_id", ""), h.value("role", ""), h.value("mode", ""),
                                            h.value("time", "")); });
        };
    });

    // owners and devices
    auto* owner = app.add_subcommand("owner", "Owner registration")->require_subcommand(1);
    auto* owner_reg = owner->add_subcommand("register", "POST /v1/owners");
    std::string owner_id, owner_name, owner_category = "personal-household", owner_address;
    std::vector<std::string> affinities, spends;
    owner_reg->add_option("--id", owner_id)->required();
    owner_reg->add_option("--name", owner_name);
    owner_reg->add_option("--category", owner_category);
    owner_reg->add_option("--address", owner_address);
    owner_reg->add_option("--affinity", affinities, "Vendor the owner prefers (repeatable)");
    owner_reg->add_option("--spend", spends, "VENDOR=CENTS expected monthly spend (repeatable)");
    owner_reg->callback([&] {
        action = [&] {
            json spend = json::object();
            for (const auto& s : spends) {
                const auto eq = s.find('=');
                if (eq == std::string::npos) throw MarketError(ErrorCode::InvalidArgument, "--spend takes VENDOR=CENTS");
                spend[s.substr(0, eq)] = std::stoll(s.substr(eq + 1));
            }
            const auto r = client().post("/v1/owners", {{"owner_id", owner_id},
                                                        {"display_name", owner_name.empty() ? owner_id : owner_name},
                                                        {"category", owner_category},
                                                        {"vendor_affinities", affinities},
                                                        {"expected_monthly_spend_cents", spend},
                                                        {"notification_address", owner_address}});
            return emit(r, [&] { fmt::print("owner {} registered\n", r.value("owner_id", "")); });
        };
    });

    auto* device = app.add_subcommand("device", "Device handshake")->require_subcommand(1);
    auto* announce = device->add_subcommand("announce", "POST /v1/devices/announce");
    std::string announce_file;
    announce->add_option("--file", announce_file, "Announcement JSON")->required();
    announce->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/devices/announce", read_json_file(announce_file));
            return emit(r, [&] {
                fmt::print("device {} announced; token {}\n", r.value("device_id", ""), r.value("device_token", ""));
                for (const auto& s : r["sensor_ids"]) fmt::print("  {}\n", s.get<std::string>());
            });
        };
    });
    auto* claim = device->add_subcommand("claim", "POST /v1/devices/{id}/claim");
    std::string claim_device, claim_owner;
    claim->add_option("--device", claim_device)->required();
    claim->add_option("--owner", claim_owner)->required();
    claim->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/devices/" + claim_device + "/claim", {{"owner_id", claim_owner}});
            return emit(r, [&] { fmt::print("device {} claimed by {}\n", claim_device, claim_owner); });
        };
    });

    auto* policy = app.add_subcommand("policy", "POST /v1/owners/{id}/policies");
    std::string policy_owner, policy_file, policy_id;
    std::string policy_sensors, policy_allow;
    std::int64_t reserve = 0;
    bool publish = false, auto_accept = false;
    policy->add_option("--owner", policy_owner)->required();
    policy->add_option("--file", policy_file, "Policy JSON (overrides the flags)");
    policy->add_option("--id", policy_id);
    policy->add_option("--sensors", policy_sensors, "Comma-separated sensor ids");
    policy->add_option("--allow", policy_allow, "Comma-separated consumer categories");
    policy->add_option("--reserve", reserve, "Reserve in cents per month");
    policy->add_flag("--publish", publish);
    policy->add_flag("--auto-accept", auto_accept);
    policy->callback([&] {
        action = [&] {
            json body = policy_file.empty() ? json{{"sensor_ids", split(policy_sensors, ',')},
                                                   {"allowed_consumer_categories", split(policy_allow, ',')},
                                                   {"reserve_cents", reserve},
                                                   {"auto_accept", auto_accept},
                                                   {"published", publish}}
                                            : read_json_file(policy_file);
            if (!policy_id.empty()) body["policy_id"] = policy_id;
            const auto r = client().post("/v1/owners/" + policy_owner + "/policies", body);
            return emit(r, [&] {
                fmt::print("policy {} {} {} sensor(s)\n", r.value("policy_id", ""),
                           r.value("published", false) ? "publishes" : "withholds", r["sensor_ids"].size());
            });
        };
    });

    auto* consumer = app.add_subcommand("consumer", "Consumer registration")->require_subcommand(1);
    auto* consumer_reg = consumer->add_subcommand("register", "POST /v1/consumers/register");
    std::string org, category, consumer_id, save;
    consumer_reg->add_option("--org", org)->required();
    consumer_reg->add_option("--category", category)->required();
    consumer_reg->add_option("--id", consumer_id);
    consumer_reg->add_option("--save", save, "Write the certificate token to this file");
    consumer_reg->callback([&] {
        action = [&] {
            json body = {{"organization_name", org}, {"consumer_category", category}};
            if (!consumer_id.empty()) body["consumer_id"] = consumer_id;
            const auto r = client().post("/v1/consumers/register", body);
            if (!save.empty()) std::ofstream(save) << r.value("certificate_token", "") << '\n';
            return emit(r, [&] {
                fmt::print("consumer {} ({})\ncertificate {}\n", r.value("consumer_id", ""),
                           r.value("consumer_category", ""), r.value("certificate_token", ""));
            });
        };
    });

    auto* search = app.add_subcommand("search", "GET /v1/catalog/search");
    std::string phenomenon, group, region;
    search->add_option("--phenomenon", phenomenon);
    search->add_option("--group", group);
    search->add_option("--region", region);
    search->callback([&] {
        action = [&] {
            std::map<std::string, std::string> params;
            if (!phenomenon.empty()) params["phenomenon"] = phenomenon;
            if (!group.empty()) params["group"] = group;
            if (!region.empty()) params["region"] = region;
            const auto r = client().get("/v1/catalog/search", params);
            return emit(r, [&] { print_sensors(r["sensors"]); });
        };
    });

    // offers and agreements
    auto* offer = app.add_subcommand("offer", "Offers")->require_subcommand(1);
    auto* submit = offer->add_subcommand("submit", "POST /v1/offers");
    std::string offer_sensors;
    std::vector<std::int64_t> fees;
    std::vector<std::string> discounts;
    int term_days = 30;
    std::string via_esp;
    submit->add_option("--sensors", offer_sensors, "Comma-separated sensor ids")->required();
    submit->add_option("--fee", fees, "Monthly fee option in cents (repeatable)");
    submit->add_option("--discount", discounts, "Discount option BP:VENDOR (repeatable)");
    submit->add_option("--term-days", term_days);
    submit->add_option("--via-esp", via_esp);
    submit->callback([&] {
        action = [&] {
            json body = {{"sensor_ids", split(offer_sensors, ',')}, {"options", options_json(fees, discounts)},
                         {"term_days", term_days}};
            if (!via_esp.empty()) body["via_esp"] = via_esp;
            const auto r = client().post("/v1/offers", body);
            return emit(r, [&] { print_offer(r); });
        };
    });
    auto* offers = app.add_subcommand("offers", "GET /v1/owners/{id}/offers");
    std::string offers_owner, offers_status;
    offers->add_option("--owner", offers_owner)->required();
    offers->add_option("--status", offers_status);
    offers->callback([&] {
        action = [&] {
            std::map<std::string, std::string> params;
            if (!offers_status.empty()) params["status"] = offers_status;
            const auto r = client().get("/v1/owners/" + offers_owner + "/offers", params);
            return emit(r, [&] {
                for (const auto& o : r["offers"]) print_offer(o);
            });
        };
    });
    auto* decide = app.add_subcommand("decide", "POST /v1/offers/{id}/decision");
    std::string decide_offer;
    std::optional<std::size_t> accept_index;
    bool reject = false;
    decide->add_option("--offer", decide_offer)->required();
    auto* accept_opt = decide->add_option("--accept", accept_index, "Option index to accept");
    decide->add_flag("--reject", reject)->excludes(accept_opt);
    decide->callback([&] {
        action = [&] {
            if (!accept_index && !reject) throw MarketError(ErrorCode::InvalidArgument, "give --accept N or --reject");
            json body = reject ? json{{"decision", "reject"}}
                               : json{{"decision", "accept"}, {"option_index", *accept_index}};
            const auto r = client().post("/v1/offers/" + decide_offer + "/decision", body);
            return emit(r, [&] {
                if (r.contains("agreement"))
                    fmt::print("agreement {} ({})\n", r["agreement"].value("agreement_id", ""),
                               option_label(r["agreement"]["chosen_option"]));
                else
                    fmt::print("offer {} {}\n", decide_offer, r["offer"].value("status", ""));
            });
        };
    });
    auto* resolve = app.add_subcommand("resolve", "POST /v1/sensors/{id}/resolve");
    std::string resolve_sensor;
    bool commit = false;
    resolve->add_option("--sensor", resolve_sensor)->required();
    resolve->add_flag("--commit", commit, "Accept the winner and mark the rest outbid");
    resolve->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/sensors/" + resolve_sensor + "/resolve", {{"commit", commit}});
            return emit(r, [&] {
                const auto& outcome = r["outcome"];
                if (outcome.contains("winner") && !outcome["winner"].is_null())
                    fmt::print("winner {} value {}/month\n", outcome["winner"].value("offer_id", ""),
                               money(outcome["winner"].value("best_value_cents", std::int64_t{0})));
                else
                    fmt::print("no offer meets the reserve\n");
                if (r.contains("agreement")) fmt::print("agreement {}\n", r["agreement"].value("agreement_id", ""));
            });
        };
    });
    auto* inbox = app.add_subcommand("inbox", "GET /v1/owners/{id}/inbox");
    std::string inbox_owner;
    std::uint64_t inbox_after = 0;
    int wait_ms = 0;
    inbox->add_option("--owner", inbox_owner)->required();
    inbox->add_option("--after", inbox_after);
    inbox->add_option("--wait-ms", wait_ms, "Long-poll up to this long");
    inbox->callback([&] {
        action = [&] {
            const auto r = client().get("/v1/owners/" + inbox_owner + "/inbox",
                                        {{"after", std::to_string(inbox_after)}, {"wait_ms", std::to_string(wait_ms)}});
            return emit(r, [&] {
                for (const auto& n : r["notifications"])
                    fmt::print("#{} {} {} {}\n", n.value("seq", 0), n.value("at", ""), n.value("kind", ""),
                               n["payload"].dump());
            });
        };
    });
    auto* agreements = app.add_subcommand("agreements", "GET /v1/agreements");
    std::string ag_owner, ag_consumer;
    agreements->add_option("--owner", ag_owner);
    agreements->add_option("--consumer", ag_consumer);
    agreements->callback([&] {
        action = [&] {
            std::map<std::string, std::string> params;
            if (!ag_owner.empty()) params["owner"] = ag_owner;
            if (!ag_consumer.empty()) params["consumer"] = ag_consumer;
            const auto r = client().get("/v1/agreements", params);
            return emit(r, [&] {
                for (const auto& a : r["agreements"])
                    fmt::print("{} {} -> {} {} [{}]\n", a.value("agreement_id", ""), a["parties"].value("consumer_id", ""),
                               a["parties"].value("owner_id", ""), option_label(a["chosen_option"]),
                               a.value("status", ""));
            });
        };
    });
    auto* cancel = app.add_subcommand("cancel", "POST /v1/agreements/{id}/cancel");
    std::string cancel_id;
    cancel->add_option("--agreement", cancel_id)->required();
    cancel->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/agreements/" + cancel_id + "/cancel");
            return emit(r, [&] { fmt::print("agreement {} cancelled at {}\n", cancel_id, r.value("cancelled_at", "")); });
        };
    });

    // data plane
    auto* ingest = app.add_subcommand("ingest", "POST /v1/ingest");
    std::string device_token, readings_file;
    ingest->add_option("--token", device_token, "Device token")->required();
    ingest->add_option("--file", readings_file, "JSON array of readings")->required();
    ingest->callback([&] {
        action = [&] {
            auto c = client();
            c.set_header("X-Device-Token", device_token);
            const auto r = c.post("/v1/ingest", read_json_file(readings_file));
            return emit(r, [&] { fmt::print("accepted {} rejected {}\n", r.value("accepted", 0), r["rejected"].size()); });
        };
    });
    auto* data = app.add_subcommand("data", "GET /v1/data/{sensor}");
    std::string data_sensor, from, to;
    data->add_option("--sensor", data_sensor)->required();
    data->add_option("--from", from);
    data->add_option("--to", to);
    data->callback([&] {
        action = [&] {
            std::map<std::string, std::string> params;
            if (!from.empty()) params["from"] = from;
            if (!to.empty()) params["to"] = to;
            const auto r = client().get("/v1/data/" + data_sensor, params);
            return emit(r, [&] {
                for (const auto& x : r["readings"])
                    fmt::print("{} {} {} {}\n", x.value("ts", ""), x["value"].dump(), x.value("region", ""),
                               x.value("owner_token", ""));
            });
        };
    });

    // ESP
    auto* require_cmd = app.add_subcommand("require", "ESP requirements")->require_subcommand(1);
    std::string req_group, req_terms, req_region;
    std::optional<std::int64_t> budget;
    std::optional<double> min_period;
    auto constraints = [&] {
        json c = {{"terms", split(req_terms, ',')}, {"region", req_region}};
        if (!req_group.empty()) c["phenomenon_group"] = req_group;
        if (budget) c["max_monthly_budget_cents"] = *budget;
        if (min_period) c["min_sampling_period_s"] = *min_period;
        return c;
    };
    for (auto* sub : {require_cmd->add_subcommand("resolve", "POST /v1/requirements/resolve"),
                      require_cmd->add_subcommand("acquire", "POST /v1/requirements/acquire")}) {
        sub->add_option("--group", req_group);
        sub->add_option("--terms", req_terms, "Comma-separated phenomenon terms");
        sub->add_option("--region", req_region);
        sub->add_option("--budget", budget, "Monthly budget in cents");
        sub->add_option("--min-period", min_period, "Minimum sampling period in seconds");
    }
    auto* req_resolve = require_cmd->get_subcommand("resolve");
    auto* req_acquire = require_cmd->get_subcommand("acquire");
    req_acquire->add_option("--fee", fees, "Monthly fee option in cents (repeatable)");
    req_acquire->add_option("--discount", discounts, "Discount option BP:VENDOR (repeatable)");
    req_acquire->add_option("--term-days", term_days);
    req_resolve->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/requirements/resolve", constraints());
            return emit(r, [&] {
                for (const auto& e : r["entries"]) {
                    fmt::print("publisher {}\n", e.value("publisher_id", ""));
                    print_sensors(e["sensors"]);
                }
                if (r.value("degraded", false)) fmt::print("DEGRADED: unreachable {}\n", r["unreachable"].dump());
            });
        };
    });
    req_acquire->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/requirements/acquire", {{"constraints", constraints()},
                                                                      {"options", options_json(fees, discounts)},
                                                                      {"term_days", term_days}});
            return emit(r, [&] {
                for (const auto& o : r["outcomes"])
                    fmt::print("{} owner {}: {}\n", o.value("publisher_id", ""), o.value("owner_id", ""),
                               o.contains("offer") ? o["offer"].value("offer_id", "") : "failed: " + o.value("message", ""));
            });
        };
    });
    auto* interest = app.add_subcommand("interest", "ESP interest registry")->require_subcommand(1);
    auto* interest_reg = interest->add_subcommand("register", "POST /v1/interests");
    interest_reg->add_option("--group", req_group);
    interest_reg->add_option("--terms", req_terms);
    interest_reg->add_option("--region", req_region);
    interest_reg->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/interests", constraints());
            return emit(r, [&] { fmt::print("interest {}\n", r.value("interest_id", "")); });
        };
    });
    auto* interest_notes = interest->add_subcommand("notifications", "GET /v1/interests/{id}/notifications");
    std::string interest_id;
    interest_notes->add_option("--id", interest_id)->required();
    interest_notes->callback([&] {
        action = [&] {
            const auto r = client().get("/v1/interests/" + interest_id + "/notifications");
            return emit(r, [&] {
                for (const auto& n : r["notifications"])
                    fmt::print("#{} {} {}\n", n.value("seq", 0), n.value("publisher_id", ""),
                               n["sensor"].value("sensor_id", ""));
            });
        };
    });

    // reports and admin
    auto* report = app.add_subcommand("report", "Reports")->require_subcommand(1);
    auto* cost = report->add_subcommand("cost-comparison", "GET /v1/reports/cost-comparison");
    std::int64_t respondents = 1000, total = 800000, per_response = 10;
    cost->add_option("--respondents", respondents);
    cost->add_option("--total-cents", total);
    cost->add_option("--per-response-cents", per_response);
    cost->callback([&] {
        action = [&] {
            const auto r = client().get("/v1/reports/cost-comparison",
                                        {{"respondents", std::to_string(respondents)},
                                         {"traditional_total_cents", std::to_string(total)},
                                         {"per_response_cents", std::to_string(per_response)}});
            return emit(r, [&] {
                fmt::print("{:<28} {:>12} {:>14}\n", "", "per response", "total");
                fmt::print("{:<28} {:>12} {:>14}\n", "traditional survey",
                           money(r.value("traditional_per_response_cents", std::int64_t{0})),
                           money(r.value("traditional_total_cents", std::int64_t{0})));
                fmt::print("{:<28} {:>12} {:>14}\n", "marketplace data",
                           money(r.value("automated_per_response_cents", std::int64_t{0})),
                           money(r.value("automated_total_cents", std::int64_t{0})));
                fmt::print("ratio {}/{} ({}x) over {} respondents\n", r.value("ratio_numerator", std::int64_t{0}),
                           r.value("ratio_denominator", std::int64_t{1}), r.value("ratio", 0.0), respondents);
            });
        };
    });
    auto* payback = report->add_subcommand("payback", "GET /v1/reports/payback");
    std::string payback_owner;
    std::int64_t premium = 6000;
    int horizon = 12;
    payback->add_option("--owner", payback_owner)->required();
    payback->add_option("--premium", premium, "Device premium in cents");
    payback->add_option("--horizon", horizon, "Months to look ahead");
    payback->callback([&] {
        action = [&] {
            const auto r = client().get("/v1/reports/payback", {{"owner", payback_owner},
                                                                {"premium", std::to_string(premium)},
                                                                {"horizon", std::to_string(horizon)}});
            return emit(r, [&] {
                fmt::print("owner {} premium {}: payback {} months, within threshold: {}\n", payback_owner,
                           money(premium), r["months"].is_number() ? std::to_string(r["months"].get<int>()) : "not reached",
                           r.value("within_threshold", false) ? "yes" : "no");
            });
        };
    });
    auto* clock = app.add_subcommand("clock", "Simulated clock control")->require_subcommand(1);
    auto* advance = clock->add_subcommand("advance", "POST /v1/admin/clock/advance");
    int adv_days = 0, adv_hours = 0;
    advance->add_option("--days", adv_days);
    advance->add_option("--hours", adv_hours);
    advance->callback([&] {
        action = [&] {
            const auto r = client().post("/v1/admin/clock/advance", {{"days", adv_days}, {"hours", adv_hours}});
            return emit(r, [&] { fmt::print("time {}\n", r.value("time", "")); });
        };
    });
    auto* snapshot = app.add_subcommand("snapshot", "GET /v1/admin/snapshot");
    snapshot->callback([&] {
        action = [&] {
            std::cout << client().get("/v1/admin/snapshot").dump(2) << '\n';
            return kExitOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    return guarded(action);
}
