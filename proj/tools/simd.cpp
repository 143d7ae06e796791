// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

// simd: scenario replay, simulated fleets and adopter agents.

#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli_common.hpp"
#include "sensemarket/codec.hpp"
#include "sensemarket/simulator.hpp"

using namespace sensemarket;
using namespace sensemarket::cli;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MarketError(ErrorCode::InvalidArgument, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str());
}

void print_scenario(const json& report) {
    fmt::print("scenario {}: {} steps, finished at {}\n", report.value("scenario", ""), report.value("steps", 0),
               report.value("final_time", ""));
    for (const auto& a : report["agreements"])
        fmt::print("  {:<4} {:<16} {:<14} -> {:<8} {:<34} {}{}\n", a.value("alias", ""), a.value("agreement_id", ""),
                   a.value("consumer_id", ""), a.value("owner_id", ""), a.value("label", ""), a.value("status", ""),
                   a.contains("via_esp") ? " via " + a["via_esp"].get<std::string>() : "");
    fmt::print("active agreements: {}\n", report.value("active_agreements", 0));
    for (const auto& [account, cents] : report["balances"].items())
        fmt::print("  {:<32} {:>10}\n", account, money(cents.get<std::int64_t>()));
    fmt::print("ledger total: {}  readings delivered: {}\n", money(report.value("ledger_total", std::int64_t{0})),
               report.value("deliveries", 0));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic marketplace simulator"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Print JSON reports");
    std::function<int()> action;

    auto* run = app.add_subcommand("run", "Replay a scenario script");
    std::string scenario_file;
    int repeat = 1;
    run->add_option("--scenario", scenario_file, "Scenario JSON (built-in reference when omitted)");
    run->add_option("--repeat", repeat, "Run N times and require identical reports")->check(CLI::PositiveNumber);
    run->callback([&] {
        action = [&] {
            const json script = scenario_file.empty() ? reference_scenario() : read_json_file(scenario_file);
            const auto started = std::chrono::steady_clock::now();
            json first;
            for (int i = 0; i < repeat; ++i) {
                auto report = run_scenario(script);
                if (i == 0)
                    first = std::move(report);
                else if (report != first)
                    throw MarketError(ErrorCode::ScenarioFailure, "run " + std::to_string(i + 1) + " diverged from run 1");
            }
            const auto ms =
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
            if (as_json)
                std::cout << first.dump(2) << '\n';
            else {
                print_scenario(first);
                fmt::print("{} run(s) identical, {} ms\n", repeat, ms);
            }
            return kExitOk;
        };
    });

    auto* fleet = app.add_subcommand("fleet", "Announce a simulated fleet and stream its readings");
    std::string spec_file, start = "2026-01-01T00:00:00Z";
    double hours_run = 1;
    std::uint64_t seed = 1;
    fleet->add_option("--spec", spec_file, "Fleet JSON")->required();
    fleet->add_option("--hours", hours_run)->check(CLI::PositiveNumber);
    fleet->add_option("--seed", seed);
    fleet->add_option("--start", start, "Simulated start time");
    fleet->callback([&] {
        action = [&] {
            SimulationWorld::Options options;
            options.start = parse_rfc3339(start);
            auto world = SimulationWorld::create(options);
            const auto specs = parse_fleet(read_json_file(spec_file), seed);
            const auto stats = run_fleet(*world.broker, *world.clock, specs,
                                         Duration(static_cast<std::int64_t>(hours_run * 3'600'000.0)));
            const auto report = to_json_report(stats);
            if (as_json) {
                std::cout << report.dump(2) << '\n';
            } else {
                fmt::print("{:<48} {:>9} {:>9}\n", "SENSOR", "EMITTED", "ACCEPTED");
                for (const auto& [id, s] : report["sensors"].items())
                    fmt::print("{:<48} {:>9} {:>9}\n", id, s["emitted"].get<std::size_t>(), s["accepted"].get<std::size_t>());
                for (const auto& [id, msg] : report["device_errors"].items())
                    fmt::print("device {} rejected: {}\n", id, msg.get<std::string>());
            }
            return stats.device_errors.empty() ? kExitOk : kExitLocal;
        };
    });

    auto* agents = app.add_subcommand("agents", "Threshold-adopter owner agents");
    AgentPopulation population;
    int months = 12;
    agents->add_option("--n", population.n)->check(CLI::PositiveNumber);
    agents->add_option("--months", months)->check(CLI::PositiveNumber);
    agents->add_option("--seed", population.seed);
    agents->add_option("--offered-yearly-cents", population.offered_yearly_cents);
    agents->add_option("--fraction-below", population.fraction_below);
    agents->add_option("--split-cents", population.split_cents);
    agents->add_option("--premium-cents", population.device_premium_cents);
    agents->callback([&] {
        action = [&] {
            const auto summary = run_agents(population, months);
            if (as_json) {
                std::cout << to_json_report(summary).dump(2) << '\n';
            } else {
                fmt::print("agents {}  adopters {}  adoption {:.3f}\n", summary.n, summary.adopters,
                           summary.adoption_fraction);
                fmt::print("monthly fee {}  payback reached by {}  median payback {}\n",
                           money(summary.monthly_fee_cents), summary.payback_reached,
                           summary.median_payback_months ? fmt::format("{:.1f} months", *summary.median_payback_months)
                                                         : std::string("not reached"));
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
