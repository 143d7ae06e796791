// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "market_fixture.hpp"
#include "oracles.hpp"
#include "sensemarket/ledger.hpp"

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

Agreement agreement(const std::string& id, CompensationOption option, std::optional<std::string> esp = std::nullopt,
                    int term_days = 90, const std::string& consumer = "goldencheese",
                    const std::string& owner = "mike") {
    Agreement a;
    a.agreement_id = AgreementId{id};
    a.offer_id = OfferId{"offer-" + id};
    a.chosen_option = std::move(option);
    a.term_days = term_days;
    a.window = {t0(), t0() + days(term_days)};
    a.parties = {OwnerId{owner}, ConsumerId{consumer}, PublisherId{"easysensing"},
                 esp ? std::optional<EspId>(EspId{*esp}) : std::nullopt};
    return a;
}

TEST(FeeSplit, DirectAndViaEsp) {
    const CommissionRates rates{1000, 500};
    const auto direct = split_fee(200, rates, false);
    EXPECT_EQ(direct.owner, 180);
    EXPECT_EQ(direct.sp, 20);
    EXPECT_EQ(direct.esp, 0);
    const auto via = split_fee(100, rates, true);
    EXPECT_EQ(via.owner, 85);
    EXPECT_EQ(via.sp, 10);
    EXPECT_EQ(via.esp, 5);
    const auto cent = split_fee(1, rates, true);
    EXPECT_EQ(cent.owner, 1);
    EXPECT_EQ(cent.sp, 0);
    EXPECT_EQ(cent.esp, 0);
}

TEST(FeeSplit, RatesValidated) {
    EXPECT_EQ(code_of([] { validate(CommissionRates{10000, 0}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(CommissionRates{6000, 4000}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(CommissionRates{-1, 0}); }), ErrorCode::InvalidArgument);
    validate(CommissionRates{5000, 4999});
    EXPECT_EQ(code_of([] { Ledger bad(CommissionRates{9000, 1000}); }), ErrorCode::InvalidArgument);
}

TEST(FeeSplit, CycleArithmetic) {
    EXPECT_EQ(cycle_count(1), 1u);
    EXPECT_EQ(cycle_count(30), 1u);
    EXPECT_EQ(cycle_count(31), 2u);
    EXPECT_EQ(cycle_count(360), 12u);
    const auto a = agreement("a", MonthlyFee{100});
    EXPECT_EQ(cycle_start(a, 2), t0() + days(60));
}

TEST(LedgerTest, PostCycleWithoutEsp) {
    Ledger ledger;
    ledger.track(agreement("a1", MonthlyFee{200}));
    const auto entries = ledger.post_cycle(AgreementId{"a1"}, 0, t0());
    ASSERT_EQ(entries.size(), 2u);
    EXPECT_EQ(ledger.balance("consumer:goldencheese"), -200);
    EXPECT_EQ(ledger.balance("owner:mike"), 180);
    EXPECT_EQ(ledger.balance("sp:easysensing"), 20);
    EXPECT_EQ(ledger.total_balance(), 0);
    for (const auto& e : entries) {
        EXPECT_EQ(e.ts, t0());
        EXPECT_EQ(e.debit_account, "consumer:goldencheese");
        EXPECT_EQ(e.cycle_index, 0u);
    }
}

TEST(LedgerTest, PostCycleViaEsp) {
    Ledger ledger;
    ledger.track(agreement("a2", MonthlyFee{100}, "productiveanalytics"));
    const auto entries = ledger.post_cycle(AgreementId{"a2"}, 0, t0());
    ASSERT_EQ(entries.size(), 3u);
    EXPECT_EQ(entries[2].reason, EntryReason::EspCommission);
    EXPECT_EQ(ledger.balance("owner:mike"), 85);
    EXPECT_EQ(ledger.balance("sp:easysensing"), 10);
    EXPECT_EQ(ledger.balance("esp:productiveanalytics"), 5);
}

TEST(LedgerTest, OneCentCycleSkipsZeroCommissions) {
    Ledger ledger;
    ledger.track(agreement("a", MonthlyFee{1}, "productiveanalytics"));
    const auto entries = ledger.post_cycle(AgreementId{"a"}, 0, t0());
    ASSERT_EQ(entries.size(), 1u);
    EXPECT_EQ(ledger.balance("owner:mike"), 1);
    EXPECT_EQ(ledger.balance("sp:easysensing"), 0);
}

TEST(LedgerTest, DuplicateCycleConflictsAndChangesNothing) {
    Ledger ledger;
    ledger.track(agreement("a", MonthlyFee{200}));
    ledger.post_cycle(AgreementId{"a"}, 0, t0());
    const auto before = ledger.entries();
    EXPECT_EQ(code_of([&] { ledger.post_cycle(AgreementId{"a"}, 0, t0() + days(1)); }), ErrorCode::Conflict);
    EXPECT_EQ(ledger.entries(), before);
    EXPECT_TRUE(ledger.post_due_cycles(t0() + days(1)).empty());
}

TEST(LedgerTest, CycleGuards) {
    Ledger ledger;
    auto a = agreement("a", MonthlyFee{200}, std::nullopt, 60);
    ledger.track(a);
    ledger.track(agreement("d", PurchaseDiscount{300, VendorId{"dairyicecream"}}));
    EXPECT_EQ(code_of([&] { ledger.post_cycle(AgreementId{"a"}, 1, t0() + days(29)); }), ErrorCode::FailedPrecondition);
    EXPECT_EQ(code_of([&] { ledger.post_cycle(AgreementId{"a"}, 2, t0() + days(90)); }), ErrorCode::FailedPrecondition);
    EXPECT_EQ(code_of([&] { ledger.post_cycle(AgreementId{"d"}, 0, t0()); }), ErrorCode::FailedPrecondition);
    EXPECT_EQ(code_of([&] { ledger.post_cycle(AgreementId{"x"}, 0, t0()); }), ErrorCode::NotFound);
    a.cancelled_at = t0() + days(10);
    ledger.track(a);
    ledger.post_cycle(AgreementId{"a"}, 0, t0());
    EXPECT_EQ(code_of([&] { ledger.post_cycle(AgreementId{"a"}, 1, t0() + days(40)); }), ErrorCode::FailedPrecondition);
}

TEST(LedgerTest, PostDueCyclesStopsAtAsOfAndCancellation) {
    Ledger ledger;
    ledger.track(agreement("a", MonthlyFee{200}, std::nullopt, 360));
    auto b = agreement("b", MonthlyFee{100}, "productiveanalytics", 360);
    b.cancelled_at = t0() + days(45);
    ledger.track(b);
    const auto posted = ledger.post_due_cycles(t0() + days(61));
    // a: cycles 0,1,2 (2 entries each); b: cycles 0,1 (3 entries each).
    EXPECT_EQ(posted.size(), 12u);
    EXPECT_TRUE(ledger.cycle_posted(AgreementId{"a"}, 2));
    EXPECT_FALSE(ledger.cycle_posted(AgreementId{"b"}, 2));
    EXPECT_EQ(ledger.total_balance(), 0);
}

TEST(LedgerTest, DiscountRedemption) {
    Ledger ledger;
    ledger.track(agreement("d", PurchaseDiscount{300, VendorId{"dairyicecream"}}, std::nullopt, 360, "dairyicecream"));
    ledger.track(agreement("f", MonthlyFee{100}));
    const auto e = ledger.redeem_discount(AgreementId{"d"}, 4000, t0() + days(3));
    ASSERT_TRUE(e);
    EXPECT_EQ(e->amount_cents, 120);
    EXPECT_EQ(e->reason, EntryReason::DiscountRedemption);
    EXPECT_EQ(e->debit_account, "consumer:dairyicecream");
    EXPECT_EQ(e->credit_account, "owner:mike");
    EXPECT_FALSE(ledger.redeem_discount(AgreementId{"d"}, 0, t0()));
    EXPECT_FALSE(ledger.redeem_discount(AgreementId{"d"}, 33, t0())); // 0.99 floors to 0
    EXPECT_EQ(code_of([&] { ledger.redeem_discount(AgreementId{"f"}, 4000, t0()); }), ErrorCode::FailedPrecondition);
    EXPECT_EQ(code_of([&] { ledger.redeem_discount(AgreementId{"d"}, -1, t0()); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { ledger.redeem_discount(AgreementId{"d"}, 4000, t0() + days(400)); }),
              ErrorCode::FailedPrecondition);
}

// Redemptions accumulate per purchase: sum of per-purchase floors, never the
// floor of the summed purchases.
TEST(LedgerTest, RedemptionsAccumulatePerPurchase) {
    Ledger ledger;
    ledger.track(agreement("d", PurchaseDiscount{300, VendorId{"v"}}, std::nullopt, 360));
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<Cents> purchase(0, 5000);
    Cents expected = 0, total_purchases = 0;
    for (int i = 0; i < 500; ++i) {
        const Cents p = purchase(rng);
        total_purchases += p;
        Cents owed = 0;
        for (Cents step = 0; step + 10000 <= p * 300; step += 10000) ++owed; // floor by counting
        expected += owed;
        ledger.redeem_discount(AgreementId{"d"}, p, t0());
    }
    EXPECT_EQ(ledger.balance("owner:mike"), expected);
    EXPECT_LE(expected, total_purchases * 300 / 10000);
}

TEST(LedgerTest, CreditFloorBlocksPostings) {
    Ledger ledger(CommissionRates{}, -250);
    ledger.track(agreement("a", MonthlyFee{200}, std::nullopt, 90));
    ledger.post_cycle(AgreementId{"a"}, 0, t0());
    EXPECT_TRUE(ledger.can_fund(ConsumerId{"goldencheese"}, 50));
    EXPECT_FALSE(ledger.can_fund(ConsumerId{"goldencheese"}, 51));
    EXPECT_EQ(code_of([&] { ledger.post_cycle(AgreementId{"a"}, 1, t0() + days(30)); }), ErrorCode::FailedPrecondition);
    EXPECT_FALSE(ledger.cycle_posted(AgreementId{"a"}, 1));
    EXPECT_TRUE(Ledger().can_fund(ConsumerId{"x"}, 1'000'000'000));
}

TEST(LedgerTest, FileReloadReproducesBalances) {
    const auto dir = testing::temp_dir("ledger");
    const auto file = dir / "ledger.jsonl";
    const auto a = agreement("a", MonthlyFee{100}, "productiveanalytics", 360);
    const auto d = agreement("d", PurchaseDiscount{300, VendorId{"v"}}, std::nullopt, 360, "dairyicecream");
    std::vector<LedgerEntry> before;
    std::vector<Account> accounts;
    {
        Ledger ledger(CommissionRates{}, std::nullopt, file);
        ledger.track(a);
        ledger.track(d);
        ledger.post_due_cycles(t0() + days(100));
        ledger.redeem_discount(AgreementId{"d"}, 4000, t0() + days(1));
        before = ledger.entries();
        accounts = ledger.accounts();
    }
    { std::ofstream(file, std::ios::app) << "{\"entry_id\":99,"; }
    Ledger again(CommissionRates{}, std::nullopt, file);
    again.track(a);
    again.track(d);
    again.load();
    EXPECT_EQ(again.entries(), before);
    EXPECT_EQ(again.accounts(), accounts);
    EXPECT_EQ(read_ledger_file(file), before);
    // The reloaded ledger knows which cycles are done and appends after the torn line.
    EXPECT_EQ(code_of([&] { again.post_cycle(AgreementId{"a"}, 0, t0() + days(100)); }), ErrorCode::Conflict);
    again.post_due_cycles(t0() + days(130));
    EXPECT_EQ(read_ledger_file(file).size(), before.size() + 3);
    std::filesystem::remove_all(dir);
}

// Σ balances is zero after every posting and each account matches the oracle.
TEST(LedgerProperty, ConservationAgainstOracle) {
    std::mt19937_64 rng(31);
    Ledger ledger;
    testing::BalanceOracle oracle;
    std::vector<Agreement> agreements;
    for (int i = 0; i < 40; ++i) {
        const bool fee = rng() % 3 != 0;
        const auto consumer = "c" + std::to_string(rng() % 6), owner = "o" + std::to_string(rng() % 8);
        const std::optional<std::string> esp = rng() % 2 ? std::optional<std::string>("e" + std::to_string(rng() % 2))
                                                          : std::nullopt;
        CompensationOption option = fee ? CompensationOption{MonthlyFee{static_cast<Cents>(rng() % 1000 + 1)}}
                                        : CompensationOption{PurchaseDiscount{static_cast<int>(rng() % 2000 + 1),
                                                                              VendorId{"v"}}};
        agreements.push_back(agreement("a" + std::to_string(i), option, esp, 360, consumer, owner));
        ledger.track(agreements.back());
    }
    for (int op = 0; op < 3000; ++op) {
        const auto& a = agreements[rng() % agreements.size()];
        const auto now = t0() + days(static_cast<int>(rng() % 360));
        if (const auto* fee = std::get_if<MonthlyFee>(&a.chosen_option)) {
            const auto cycle = static_cast<std::uint32_t>(rng() % 12);
            const bool due = cycle_start(a, cycle) <= now;
            const bool fresh = !ledger.cycle_posted(a.agreement_id, cycle);
            try {
                ledger.post_cycle(a.agreement_id, cycle, now);
                ASSERT_TRUE(due && fresh);
                oracle.fee_cycle("consumer:" + a.parties.consumer_id.str(), "owner:" + a.parties.owner_id.str(),
                                 "sp:easysensing",
                                 a.parties.esp_id ? std::optional<std::string>("esp:" + a.parties.esp_id->str())
                                                  : std::nullopt,
                                 fee->amount_cents);
            } catch (const MarketError& e) {
                ASSERT_FALSE(due && fresh) << e.what();
            }
        } else {
            const Cents purchase = static_cast<Cents>(rng() % 10000);
            ledger.redeem_discount(a.agreement_id, purchase, now);
            oracle.redemption("consumer:" + a.parties.consumer_id.str(), "owner:" + a.parties.owner_id.str(), purchase,
                              std::get<PurchaseDiscount>(a.chosen_option).basis_points);
        }
        ASSERT_EQ(ledger.total_balance(), 0);
    }
    for (const auto& account : ledger.accounts()) EXPECT_EQ(account.balance_cents, oracle.get(account.account_id));
    for (const auto& [account, balance] : oracle.balances) EXPECT_EQ(ledger.balance(account), balance);
}

// More active fee agreements never lower an owner's monthly earnings.
TEST(LedgerProperty, OwnerEarningsMonotoneInAgreements) {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 50; ++round) {
        std::vector<Cents> fees(rng() % 8 + 1);
        std::vector<bool> via_esp;
        for (auto& f : fees) {
            f = static_cast<Cents>(rng() % 500 + 1);
            via_esp.push_back(rng() % 2 == 0);
        }
        Cents previous = 0;
        for (std::size_t k = 0; k <= fees.size(); ++k) {
            Ledger ledger;
            for (std::size_t i = 0; i < k; ++i) {
                ledger.track(agreement("a" + std::to_string(i), MonthlyFee{fees[i]}, via_esp[i] ? "e" : std::optional<std::string>{},
                                       30, "c" + std::to_string(i)));
            }
            ledger.post_due_cycles(t0());
            const Cents earned = ledger.balance("owner:mike");
            ASSERT_GE(earned, previous);
            previous = earned;
        }
    }
}

TEST(CostReport, SurveyFigures) {
    const auto r = cost_comparison_report(1000, 800000, 10);
    EXPECT_EQ(r.traditional_per_response_cents, 800);
    EXPECT_EQ(r.traditional_remainder_cents, 0);
    EXPECT_EQ(r.automated_per_response_cents, 10);
    EXPECT_EQ(r.automated_total_cents, 10000);
    EXPECT_EQ(r.ratio_numerator, 80);
    EXPECT_EQ(r.ratio_denominator, 1);
    const auto identity = cost_comparison_report(1, 7, 7);
    EXPECT_EQ(identity.ratio_numerator, 1);
    EXPECT_EQ(identity.ratio_denominator, 1);
    EXPECT_EQ(code_of([] { (void)cost_comparison_report(0, 800000, 10); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)cost_comparison_report(10, 0, 10); }), ErrorCode::InvalidArgument);
}

// Spreadsheet-style recomputation: per-response = total / n with remainder,
// ratio reduced by repeated common-factor division.
TEST(CostReport, MatchesIndependentArithmetic) {
    std::mt19937_64 rng(44);
    for (int i = 0; i < 2000; ++i) {
        const std::int64_t n = static_cast<std::int64_t>(rng() % 5000 + 1);
        const Cents total = static_cast<Cents>(rng() % 2'000'000 + 1), per = static_cast<Cents>(rng() % 500 + 1);
        const auto r = cost_comparison_report(n, total, per);
        EXPECT_EQ(r.traditional_per_response_cents * n + r.traditional_remainder_cents, total);
        EXPECT_LT(r.traditional_remainder_cents, n);
        EXPECT_EQ(r.automated_total_cents, per * n);
        // Same fraction, and no common factor left (trial division).
        EXPECT_EQ(r.ratio_numerator * per * n, r.ratio_denominator * total);
        const auto small = std::min(r.ratio_numerator, r.ratio_denominator);
        const auto large = std::max(r.ratio_numerator, r.ratio_denominator);
        auto common = [&](std::int64_t f) { return f > 1 && small % f == 0 && large % f == 0; };
        ASSERT_FALSE(common(small));
        for (std::int64_t f = 2; f * f <= small; ++f)
            if (small % f == 0) ASSERT_FALSE(common(f) || common(small / f)) << f;
    }
}

TEST(Payback, ThreeMonthsAtTwentyDollars) {
    const std::vector<Cents> credits{2000, 2000, 2000, 2000};
    EXPECT_EQ(payback_months(credits, 6000), 3);
    EXPECT_EQ(payback_months(credits, 6001), 4);
    EXPECT_EQ(payback_months(std::vector<Cents>(12, 0), 6000), std::nullopt);
    EXPECT_EQ(payback_months(credits, 0), 0);
}

TEST(Payback, ReportFromLedgerEntries) {
    Ledger ledger(CommissionRates{0, 0});
    ledger.track(agreement("a", MonthlyFee{2000}, std::nullopt, 360));
    ledger.post_due_cycles(t0() + days(200));
    const auto entries = ledger.entries();
    const auto report = payback_report(entries, OwnerId{"mike"}, 6000, 12);
    EXPECT_EQ(report.origin, t0());
    EXPECT_EQ(report.months, 3);
    EXPECT_TRUE(report.within_threshold);
    EXPECT_EQ(report.monthly_credits[0], 2000);
    EXPECT_EQ(report.monthly_credits[6], 2000);
    EXPECT_EQ(report.monthly_credits[7], 0);
    const auto slow = payback_report(entries, OwnerId{"mike"}, 8000, 12);
    EXPECT_EQ(slow.months, 4);
    EXPECT_FALSE(slow.within_threshold);
    const auto none = payback_report(entries, OwnerId{"anna"}, 6000, 12);
    EXPECT_FALSE(none.months);
    EXPECT_FALSE(none.within_threshold);
    // An explicit origin a month early costs one extra month.
    EXPECT_EQ(payback_report(entries, OwnerId{"mike"}, 6000, 12, t0() - days(30)).months, 4);
}

TEST(PaybackProperty, MatchesPrefixSumOracleAndIsMonotone) {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 2000; ++i) {
        std::vector<Cents> credits(rng() % 24 + 1);
        for (auto& c : credits) c = static_cast<Cents>(rng() % 3000);
        const Cents premium = static_cast<Cents>(rng() % 20000);
        const auto got = payback_months(credits, premium);
        ASSERT_EQ(got, testing::oracle_payback(credits, premium));
        auto richer = credits;
        for (auto& c : richer) c += static_cast<Cents>(rng() % 500);
        const auto faster = payback_months(richer, premium);
        if (got) {
            ASSERT_TRUE(faster);
            ASSERT_LE(*faster, *got);
        }
    }
}

} // namespace
} // namespace sensemarket
