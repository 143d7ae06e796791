// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

// ledger: cycle posting and reports, from a server or a ledger file.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <iostream>

#include "cli_common.hpp"
#include "sensemarket/codec.hpp"
#include "sensemarket/ledger.hpp"

using namespace sensemarket;
using namespace sensemarket::cli;
using nlohmann::json;

namespace {

void print_payback(const json& r) {
    fmt::print("owner {}  premium {}  horizon {} months\n", r.value("owner_id", ""),
               money(r.value("premium_cents", std::int64_t{0})), r.value("horizon_months", 0));
    int m = 1;
    std::int64_t running = 0;
    for (const auto& c : r["monthly_credits_cents"]) {
        running += c.get<std::int64_t>();
        fmt::print("  month {:>2}  {:>10}  cumulative {:>10}\n", m++, money(c.get<std::int64_t>()), money(running));
    }
    fmt::print("payback: {}  within {} months: {}\n",
               r["months"].is_number() ? std::to_string(r["months"].get<int>()) + " months" : "not reached",
               r.value("threshold_months", kPaybackThresholdMonths), r.value("within_threshold", false) ? "yes" : "no");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Marketplace ledger operations"};
    app.require_subcommand(1);
    std::string url = default_url();
    bool as_json = false;
    app.add_option("--url", url, "Server base URL ($MKT_URL)");
    app.add_flag("--json", as_json);
    std::function<int()> action;

    auto* post = app.add_subcommand("post-cycles", "Post every fee cycle due by a date");
    std::string as_of;
    post->add_option("--as-of", as_of, "RFC 3339 date or timestamp (defaults to now)");
    post->callback([&] {
        action = [&] {
            json body = json::object();
            if (!as_of.empty()) body["as_of"] = to_rfc3339(parse_rfc3339(as_of));
            const auto r = ApiClient(url).post("/v1/ledger/post-cycles", body);
            if (as_json) {
                std::cout << r.dump(2) << '\n';
            } else {
                for (const auto& e : r["posted"])
                    fmt::print("{} {} {} -> {} {} ({})\n", e.value("ts", ""), e.value("agreement_id", ""),
                               e.value("debit_account", ""), e.value("credit_account", ""),
                               money(e.value("amount_cents", std::int64_t{0})), e.value("reason", ""));
                fmt::print("{} entries posted\n", r["posted"].size());
            }
            return kExitOk;
        };
    });

    auto* report = app.add_subcommand("report", "Reports")->require_subcommand(1);
    auto* payback = report->add_subcommand("payback", "Months until earnings cover a device premium");
    std::string owner, ledger_file, origin;
    std::int64_t premium = 6000;
    int horizon = 12;
    payback->add_option("--owner", owner)->required();
    payback->add_option("--premium", premium, "Premium in cents");
    payback->add_option("--horizon", horizon, "Months");
    payback->add_option("--ledger-file", ledger_file, "Read a JSON-lines ledger instead of the server");
    payback->add_option("--origin", origin, "Month 1 starts here (default: first credit)");
    payback->callback([&] {
        action = [&] {
            json r;
            if (!ledger_file.empty()) {
                const auto entries = read_ledger_file(ledger_file);
                std::optional<Timestamp> from;
                if (!origin.empty()) from = parse_rfc3339(origin);
                r = payback_report(entries, OwnerId{owner}, premium, horizon, from);
            } else {
                std::map<std::string, std::string> params{
                    {"owner", owner}, {"premium", std::to_string(premium)}, {"horizon", std::to_string(horizon)}};
                if (!origin.empty()) params["origin"] = origin;
                r = ApiClient(url).get("/v1/reports/payback", params);
            }
            if (as_json)
                std::cout << r.dump(2) << '\n';
            else
                print_payback(r);
            return kExitOk;
        };
    });
    auto* cost = report->add_subcommand("cost-comparison", "Survey cost against marketplace data cost");
    std::int64_t respondents = 1000, total = 800000, per_response = 10;
    cost->add_option("--respondents", respondents);
    cost->add_option("--total-cents", total, "Traditional survey total");
    cost->add_option("--per-response-cents", per_response, "Marketplace cost per response");
    cost->callback([&] {
        action = [&] {
            const auto c = cost_comparison_report(respondents, total, per_response);
            if (as_json) {
                std::cout << json(c).dump(2) << '\n';
            } else {
                fmt::print("{:<22} {:>14} {:>14}\n", "", "per response", "total");
                fmt::print("{:<22} {:>14} {:>14}\n", "traditional survey", money(c.traditional_per_response_cents),
                           money(c.traditional_total_cents));
                fmt::print("{:<22} {:>14} {:>14}\n", "marketplace data", money(c.automated_per_response_cents),
                           money(c.automated_total_cents));
                fmt::print("ratio {}/{} = {}x over {} respondents\n", c.ratio_numerator, c.ratio_denominator,
                           c.ratio(), c.respondents);
            }
            return kExitOk;
        };
    });
    auto* balances = app.add_subcommand("balances", "Account balances");
    std::string bal_file;
    balances->add_option("--ledger-file", bal_file, "Read a JSON-lines ledger instead of the server");
    balances->callback([&] {
        action = [&] {
            json accounts = json::array();
            std::int64_t sum = 0;
            if (!bal_file.empty()) {
                std::map<std::string, std::int64_t> totals;
                for (const auto& e : read_ledger_file(bal_file)) {
                    totals[e.debit_account] -= e.amount_cents;
                    totals[e.credit_account] += e.amount_cents;
                }
                for (const auto& [id, cents] : totals) {
                    accounts.push_back({{"account_id", id}, {"balance_cents", cents}});
                    sum += cents;
                }
            } else {
                const auto r = ApiClient(url).get("/v1/ledger/accounts");
                accounts = r["accounts"];
                sum = r.value("total_cents", std::int64_t{0});
            }
            if (as_json) {
                std::cout << json{{"accounts", accounts}, {"total_cents", sum}}.dump(2) << '\n';
            } else {
                for (const auto& a : accounts)
                    fmt::print("{:<36} {:>12}\n", a.value("account_id", ""), money(a.value("balance_cents", std::int64_t{0})));
                fmt::print("{:<36} {:>12}\n", "total", money(sum));
            }
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
