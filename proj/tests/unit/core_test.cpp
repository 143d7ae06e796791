// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "sensemarket/authority.hpp"
#include "sensemarket/codec.hpp"
#include "sensemarket/domain.hpp"
#include "sensemarket/error.hpp"
#include "sensemarket/taxonomy.hpp"
#include "sensemarket/time.hpp"

namespace sensemarket {
namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const MarketError& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

TEST(Time, Rfc3339RoundTrip) {
    const auto ts = parse_rfc3339("2026-01-05T09:00:00Z");
    EXPECT_EQ(to_rfc3339(ts), "2026-01-05T09:00:00Z");
    EXPECT_EQ(to_rfc3339(ts + Duration(250)), "2026-01-05T09:00:00.250Z");
    EXPECT_EQ(parse_rfc3339("2026-01-05T19:00:00+10:00"), ts);
    EXPECT_EQ(parse_rfc3339("2026-01-05"), ts - hours(9));
    EXPECT_EQ(from_millis(to_millis(ts)), ts);
}

TEST(Time, MalformedTimestampIsInvalidArgument) {
    EXPECT_EQ(code_of([] { (void)parse_rfc3339("yesterday"); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)parse_rfc3339("2026-13-01T00:00:00Z"); }), ErrorCode::InvalidArgument);
}

TEST(Time, SimulatedClockOnlyMovesForward) {
    SimulatedClock clock(parse_rfc3339("2026-01-01"));
    clock.advance(days(2));
    EXPECT_EQ(clock.now(), parse_rfc3339("2026-01-03"));
    clock.set(clock.now());
    EXPECT_EQ(code_of([&] { clock.set(parse_rfc3339("2026-01-02")); }), ErrorCode::FailedPrecondition);
    EXPECT_EQ(clock.now(), parse_rfc3339("2026-01-03"));
}

TEST(Ids, IdentifierAlphabet) {
    EXPECT_TRUE(is_valid_identifier("easysensing.mike-fridge.rfid_reader"));
    EXPECT_FALSE(is_valid_identifier(""));
    EXPECT_FALSE(is_valid_identifier("a/b"));
    EXPECT_FALSE(is_valid_identifier("has space"));
    EXPECT_FALSE(is_valid_identifier(std::string(129, 'a')));
    EXPECT_TRUE(is_valid_identifier(std::string(128, 'a')));
}

TEST(Errors, WireNamesAndStatuses) {
    for (auto code : {ErrorCode::InvalidArgument, ErrorCode::NotFound, ErrorCode::Conflict,
                      ErrorCode::PermissionDenied, ErrorCode::Unauthenticated, ErrorCode::FailedPrecondition,
                      ErrorCode::Unavailable, ErrorCode::ScenarioFailure, ErrorCode::Internal})
        EXPECT_EQ(error_code_from_string(to_string(code)), code);
    EXPECT_EQ(http_status(ErrorCode::InvalidArgument), 400);
    EXPECT_EQ(http_status(ErrorCode::Unauthenticated), 401);
    EXPECT_EQ(http_status(ErrorCode::PermissionDenied), 403);
    EXPECT_EQ(http_status(ErrorCode::NotFound), 404);
    EXPECT_EQ(http_status(ErrorCode::Conflict), 409);
}

TEST(Region, SegmentwiseContainment) {
    RegionTag act("au/act");
    EXPECT_TRUE(act.contains(RegionTag("au/act/canberra")));
    EXPECT_TRUE(act.contains(act));
    EXPECT_FALSE(RegionTag("au/ac").contains(RegionTag("au/act/canberra")));
    EXPECT_FALSE(RegionTag("au/act/canberra").contains(act));
    EXPECT_TRUE(RegionTag().contains(act));
    EXPECT_EQ(RegionTag("/AU/Act/Canberra/").str(), "au/act/canberra");
    EXPECT_EQ(RegionTag("au/act/canberra/mike-home").truncated(2).str(), "au/act");
    EXPECT_EQ(RegionTag("au/act/canberra").depth(), 3u);
    EXPECT_EQ(code_of([] { RegionTag bad("au//act"); }), ErrorCode::InvalidArgument);
}

SensorOwner mike(Cents dairy_spend = 4000, bool affinity = true) {
    SensorOwner o;
    o.owner_id = OwnerId{"mike"};
    if (affinity) o.vendor_affinities = {VendorId{"dairyicecream"}};
    o.expected_monthly_spend_cents[VendorId{"dairyicecream"}] = dairy_spend;
    return o;
}

TEST(Compensation, NormalizedMonthlyValue) {
    const auto owner = mike();
    EXPECT_EQ(normalized_monthly_value(MonthlyFee{200}, owner), 200);
    EXPECT_EQ(normalized_monthly_value(PurchaseDiscount{300, VendorId{"dairyicecream"}}, owner), 120);
    EXPECT_EQ(normalized_monthly_value(PurchaseDiscount{400, VendorId{"goldencheese"}}, owner), 0);
}

TEST(Compensation, OwnerPicksFavouredDiscountThenValue) {
    const auto owner = mike();
    const std::vector<CompensationOption> dairy{PurchaseDiscount{300, VendorId{"dairyicecream"}}, MonthlyFee{200}};
    EXPECT_EQ(preferred_option_index(dairy, owner), 0u);
    const std::vector<CompensationOption> golden{PurchaseDiscount{400, VendorId{"goldencheese"}}, MonthlyFee{100}};
    EXPECT_EQ(preferred_option_index(golden, owner), 1u);
    const std::vector<CompensationOption> single{MonthlyFee{200}};
    EXPECT_EQ(preferred_option(single, owner), CompensationOption{MonthlyFee{200}});
    EXPECT_EQ(code_of([&] { (void)preferred_option_index(std::vector<CompensationOption>{}, owner); }),
              ErrorCode::InvalidArgument);
}

TEST(Compensation, WithoutAffinityTheFeeWinsBelowBreakEvenSpend) {
    // 300 bp of 6666 floors to 199 < 200; at 6667 it floors to 200 and ties go to index 0.
    const std::vector<CompensationOption> dairy{PurchaseDiscount{300, VendorId{"dairyicecream"}}, MonthlyFee{200}};
    EXPECT_EQ(preferred_option_index(dairy, mike(4000, false)), 1u);
    EXPECT_EQ(preferred_option_index(dairy, mike(6666, false)), 1u);
    EXPECT_EQ(preferred_option_index(dairy, mike(6667, false)), 0u);
    EXPECT_EQ(preferred_option_index(dairy, mike(6700, false)), 0u);
}

TEST(Compensation, DescribeIsLossless) {
    EXPECT_EQ(describe(MonthlyFee{200}), "$2.00/month");
    EXPECT_EQ(describe(MonthlyFee{5}), "$0.05/month");
    EXPECT_EQ(describe(PurchaseDiscount{300, VendorId{"DairyIceCream"}}), "3% discount at DairyIceCream");
    EXPECT_EQ(describe(PurchaseDiscount{325, VendorId{"x"}}), "3.25% discount at x");
    EXPECT_EQ(describe(PurchaseDiscount{5, VendorId{"x"}}), "0.05% discount at x");
}

TEST(Compensation, ValidationRejectsNonPositive) {
    EXPECT_EQ(code_of([] { validate(CompensationOption{MonthlyFee{0}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(CompensationOption{PurchaseDiscount{0, VendorId{"v"}}}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(CompensationOption{PurchaseDiscount{10001, VendorId{"v"}}}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { validate(CompensationOption{PurchaseDiscount{100, VendorId{}}}); }),
              ErrorCode::InvalidArgument);
    validate(CompensationOption{PurchaseDiscount{10000, VendorId{"v"}}});
}

std::vector<CompensationOption> random_options(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 6), kind(0, 1), vendor(0, 3), amount(1, 500), bp(1, 2000);
    std::vector<CompensationOption> out(static_cast<std::size_t>(count(rng)));
    for (auto& o : out) {
        if (kind(rng) == 0)
            o = MonthlyFee{amount(rng)};
        else
            o = PurchaseDiscount{bp(rng), VendorId{"v" + std::to_string(vendor(rng))}};
    }
    return out;
}

SensorOwner random_owner(std::mt19937_64& rng) {
    SensorOwner o;
    o.owner_id = OwnerId{"o"};
    std::uniform_int_distribution<int> coin(0, 2), spend(0, 20000);
    for (int v = 0; v < 4; ++v) {
        VendorId id{"v" + std::to_string(v)};
        if (coin(rng) == 0) o.vendor_affinities.insert(id);
        if (coin(rng) != 0) o.expected_monthly_spend_cents[id] = spend(rng);
    }
    return o;
}

// Independent restatement of the choice rule: a favoured discount beats
// everything, otherwise value; equal candidates compare by index.
std::size_t oracle_choice(const std::vector<CompensationOption>& options, const SensorOwner& owner) {
    auto key = [&](std::size_t i) {
        const auto* d = std::get_if<PurchaseDiscount>(&options[i]);
        const bool favoured = d && owner.vendor_affinities.contains(d->vendor_id);
        Cents value = 0;
        if (const auto* f = std::get_if<MonthlyFee>(&options[i])) value = f->amount_cents;
        else if (auto it = owner.expected_monthly_spend_cents.find(d->vendor_id);
                 it != owner.expected_monthly_spend_cents.end())
            value = (d->basis_points * it->second) / 10000;
        return std::tuple{favoured, value, -static_cast<long>(i)};
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < options.size(); ++i)
        if (key(i) > key(best)) best = i;
    return best;
}

TEST(CompensationProperty, ChoiceMatchesOracleAndIsPermutationInvariant) {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 2000; ++round) {
        auto options = random_options(rng);
        const auto owner = random_owner(rng);
        const auto chosen = preferred_option_index(options, owner);
        ASSERT_LT(chosen, options.size());
        ASSERT_EQ(chosen, oracle_choice(options, owner));

        const Cents chosen_value = normalized_monthly_value(options[chosen], owner);
        const bool chosen_favoured = [&] {
            const auto* d = std::get_if<PurchaseDiscount>(&options[chosen]);
            return d && owner.vendor_affinities.contains(d->vendor_id);
        }();
        std::shuffle(options.begin(), options.end(), rng);
        const auto& again = options[preferred_option_index(options, owner)];
        EXPECT_EQ(normalized_monthly_value(again, owner), chosen_value);
        const auto* d = std::get_if<PurchaseDiscount>(&again);
        EXPECT_EQ(d && owner.vendor_affinities.contains(d->vendor_id), chosen_favoured);
    }
}

TEST(CompensationProperty, ValueMonotoneInRateAndSpend) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> bp(1, 9999), spend(0, 1'000'000);
    for (int i = 0; i < 2000; ++i) {
        const int b = bp(rng);
        const Cents s = spend(rng);
        SensorOwner lo, hi;
        lo.expected_monthly_spend_cents[VendorId{"v"}] = s;
        hi.expected_monthly_spend_cents[VendorId{"v"}] = s + 1;
        const PurchaseDiscount d{b, VendorId{"v"}}, d2{b + 1, VendorId{"v"}};
        EXPECT_LE(normalized_monthly_value(d, lo), normalized_monthly_value(d, hi));
        EXPECT_LE(normalized_monthly_value(d, lo), normalized_monthly_value(d2, lo));
    }
}

TEST(Taxonomy, BuiltinGroupsExpand) {
    const auto& tax = PhenomenonTaxonomy::builtin();
    EXPECT_EQ(tax.expand("environmental-pollution"),
              (std::set<std::string>{"co2", "humidity", "ph", "temperature"}));
    EXPECT_EQ(tax.expand("temperature"), std::set<std::string>{"temperature"});
    EXPECT_TRUE(tax.has_term("rfid-read-event"));
    EXPECT_TRUE(tax.has_term("door-open-event"));
    EXPECT_TRUE(tax.has_term("coffee-machine-usage"));
    EXPECT_EQ(code_of([&] { (void)tax.expand("telepathy"); }), ErrorCode::InvalidArgument);
}

TEST(Taxonomy, ParseRules) {
    const auto tax = PhenomenonTaxonomy::parse("# comment\n\na\nb\ngroup:g=a,b\n");
    EXPECT_EQ(tax.expand("g"), (std::set<std::string>{"a", "b"}));
    EXPECT_EQ(code_of([] { (void)PhenomenonTaxonomy::parse("a\ngroup:g=a,zz\n"); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)PhenomenonTaxonomy::parse("a\ngroup:g=\n"); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { (void)PhenomenonTaxonomy::parse("a\ngroup:a=a\n"); }), ErrorCode::InvalidArgument);
}

TEST(Authority, IssuedCertificateVerifies) {
    CertificateAuthority ca("ca", seed_from_label("x"));
    const auto now = parse_rfc3339("2026-01-01");
    const auto cert = ca.issue(ConsumerId{"dairyicecream"}, "DairyIceCream", "food-manufacturer", now + days(365));
    ca.verify(cert, now);
    EXPECT_TRUE(ca.is_valid(cert, now + days(364)));
    EXPECT_FALSE(ca.is_valid(cert, now + days(365)));
}

TEST(Authority, TamperingIsUnauthenticated) {
    CertificateAuthority ca("ca", seed_from_label("x"));
    const auto now = parse_rfc3339("2026-01-01");
    const auto cert = ca.issue(ConsumerId{"c"}, "Org", "research", now + days(1));

    auto category = cert;
    category.consumer_category = "government";
    EXPECT_EQ(code_of([&] { ca.verify(category, now); }), ErrorCode::Unauthenticated);
    auto signature = cert;
    signature.signature[0] ^= 1;
    EXPECT_EQ(code_of([&] { ca.verify(signature, now); }), ErrorCode::Unauthenticated);
    auto expiry = cert;
    expiry.expires_at += days(100);
    EXPECT_EQ(code_of([&] { ca.verify(expiry, now); }), ErrorCode::Unauthenticated);

    CertificateAuthority other("ca", seed_from_label("y"));
    EXPECT_EQ(code_of([&] { other.verify(cert, now); }), ErrorCode::Unauthenticated);
}

TEST(Authority, BearerTokenRoundTrip) {
    CertificateAuthority ca("ca", seed_from_label("x"));
    const auto cert = ca.issue(ConsumerId{"c"}, "Org", "research", parse_rfc3339("2027-01-01"));
    const auto token = encode_certificate_token(cert);
    EXPECT_EQ(token.find_first_of("+/= "), std::string::npos);
    EXPECT_EQ(decode_certificate_token(token), cert);
    EXPECT_EQ(code_of([] { (void)decode_certificate_token("@@@"); }), ErrorCode::Unauthenticated);
}

TEST(Authority, HexAndSeeds) {
    const std::vector<std::uint8_t> bytes{0x00, 0xab, 0xff};
    EXPECT_EQ(to_hex(bytes), "00abff");
    EXPECT_EQ(from_hex("00abff"), bytes);
    EXPECT_EQ(seed_from_label("a"), seed_from_label("a"));
    EXPECT_NE(seed_from_label("a"), seed_from_label("b"));
    EXPECT_NE(random_seed(), random_seed());
}

TEST(Authority, KeyedHasherIsKeyed) {
    KeyedHasher a(seed_from_label("a")), b(seed_from_label("b"));
    EXPECT_EQ(a.digest_hex("mike"), a.digest_hex("mike"));
    EXPECT_NE(a.digest_hex("mike"), b.digest_hex("mike"));
    EXPECT_NE(a.digest_hex("mike"), "mike");
}

TEST(Codec, OptionsRoundTrip) {
    for (const CompensationOption& o :
         {CompensationOption{MonthlyFee{200}}, CompensationOption{PurchaseDiscount{300, VendorId{"dairyicecream"}}}}) {
        json j = o;
        EXPECT_EQ(j.get<CompensationOption>(), o);
    }
    EXPECT_EQ(json(CompensationOption{MonthlyFee{200}}), json::parse(R"({"type":"monthly_fee","amount_cents":200})"));
    EXPECT_EQ(code_of([] { (void)decode<CompensationOption>(json::parse(R"({"type":"barter"})")); }),
              ErrorCode::InvalidArgument);
}

} // namespace
} // namespace sensemarket
