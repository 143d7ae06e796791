// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sensemarket/domain.hpp"
#include "sensemarket/negotiation.hpp"

namespace sensemarket {

enum class AccountRole { Owner, Consumer, SpCommission, EspCommission };
enum class EntryReason { MonthlyFee, SpCommission, EspCommission, DiscountRedemption };

std::string_view to_string(AccountRole role) noexcept;
std::string_view to_string(EntryReason reason) noexcept;
EntryReason entry_reason_from_string(std::string_view name);

std::string owner_account(const OwnerId& owner);
std::string consumer_account(const ConsumerId& consumer);
std::string sp_account(const PublisherId& publisher);
std::string esp_account(const EspId& esp);
/// Role encoded in the account id prefix.
AccountRole account_role(std::string_view account_id);

/// Money moves from debit_account to credit_account.
struct LedgerEntry {
    std::uint64_t entry_id = 0;
    Timestamp ts{};
    std::string debit_account;
    std::string credit_account;
    Cents amount_cents = 0;
    EntryReason reason = EntryReason::MonthlyFee;
    AgreementId agreement_id;
    std::optional<std::uint32_t> cycle_index;

    friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct Account {
    std::string account_id;
    AccountRole role = AccountRole::Owner;
    Cents balance_cents = 0;

    friend bool operator==(const Account&, const Account&) = default;
};

/// Commission shares in basis points. Both in [0, 10000) and summing below 10000.
struct CommissionRates {
    BasisPoints sp = 1000;
    BasisPoints esp = 500;
};
void validate(const CommissionRates& rates);

/// Split of one fee cycle. Commissions are floored; the owner receives the
/// remainder so the three parts sum to the fee exactly.
struct FeeSplit {
    Cents owner = 0;
    Cents sp = 0;
    Cents esp = 0;
};
FeeSplit split_fee(Cents amount, const CommissionRates& rates, bool via_esp);

/// Number of billing cycles in a term: ceil(term_days / 30), at least 1.
std::uint32_t cycle_count(int term_days);
Timestamp cycle_start(const Agreement& agreement, std::uint32_t cycle);

/// Double-entry ledger over integer cents. Postings form a single serialized
/// stream; every entry refers to a tracked agreement.
class Ledger {
public:
    explicit Ledger(CommissionRates rates = {}, std::optional<Cents> consumer_credit_floor = std::nullopt,
                    std::optional<std::filesystem::path> file = std::nullopt);

    /// Registers or refreshes an agreement so entries may reference it.
    void track(const Agreement& agreement);

    /// Posts fee cycle `cycle` of a MonthlyFee agreement.
    ///
    /// Throws failed-precondition when the agreement is not a fee agreement,
    /// cancelled before the cycle, the cycle is out of range or not yet due,
    /// or the consumer would drop below the credit floor. Throws conflict when
    /// the cycle was already posted; the ledger is left unchanged.
    std::vector<LedgerEntry> post_cycle(const AgreementId& agreement, std::uint32_t cycle, Timestamp now);

    /// Posts every due, unposted cycle of every fee agreement up to `as_of`.
    std::vector<LedgerEntry> post_due_cycles(Timestamp as_of);

    /// Records a purchase made under a PurchaseDiscount agreement. A zero
    /// purchase (or one whose discount floors to zero) produces no entry.
    std::optional<LedgerEntry> redeem_discount(const AgreementId& agreement, Cents purchase_cents, Timestamp now);

    /// Replays the JSON-lines file. A torn final line is dropped.
    void load();

    [[nodiscard]] std::vector<LedgerEntry> entries() const;
    [[nodiscard]] std::vector<Account> accounts() const;
    [[nodiscard]] Cents balance(const std::string& account_id) const;
    [[nodiscard]] Cents total_balance() const;
    [[nodiscard]] bool cycle_posted(const AgreementId& agreement, std::uint32_t cycle) const;
    [[nodiscard]] const CommissionRates& rates() const noexcept { return rates_; }
    /// True when the consumer can absorb `commitment` more without crossing the floor.
    [[nodiscard]] bool can_fund(const ConsumerId& consumer, Cents commitment) const;

private:
    std::vector<LedgerEntry> post_cycle_locked(const Agreement& agreement, std::uint32_t cycle, Timestamp now);
    void append_locked(LedgerEntry entry);
    void check_locked(const LedgerEntry& entry) const;
    void apply_locked(const LedgerEntry& entry);

    CommissionRates rates_;
    std::optional<Cents> credit_floor_;
    std::optional<std::filesystem::path> file_;
    std::ofstream out_;

    mutable std::mutex mutex_;
    std::map<AgreementId, Agreement> agreements_;
    std::vector<LedgerEntry> entries_;
    std::map<std::string, Cents> balances_;
    std::set<std::pair<AgreementId, std::uint32_t>> posted_cycles_;
    std::uint64_t next_entry_id_ = 1;
};

std::vector<LedgerEntry> read_ledger_file(const std::filesystem::path& file);

struct CostComparison {
    std::int64_t respondents = 0;
    Cents traditional_total_cents = 0;
    Cents traditional_per_response_cents = 0;
    /// traditional_total mod respondents, so the per-response figure stays exact.
    Cents traditional_remainder_cents = 0;
    Cents automated_per_response_cents = 0;
    Cents automated_total_cents = 0;
    /// traditional_total / automated_total as a reduced fraction.
    std::int64_t ratio_numerator = 0;
    std::int64_t ratio_denominator = 1;

    [[nodiscard]] double ratio() const noexcept {
        return static_cast<double>(ratio_numerator) / static_cast<double>(ratio_denominator);
    }
};

/// Throws invalid-argument unless all inputs are positive.
CostComparison cost_comparison_report(std::int64_t respondents, Cents traditional_total_cents,
                                      Cents per_response_cents);

/// Months an owner may wait for a device premium to be covered before most
/// buyers would decline the smart device.
inline constexpr int kPaybackThresholdMonths = 3;

/// Smallest m >= 1 with credits[0] + ... + credits[m-1] >= premium; 0 when the
/// premium is not positive; nullopt when the horizon runs out first.
std::optional<int> payback_months(std::span<const Cents> monthly_credits, Cents premium_cents);

/// Credits to `account` bucketed into 30-day months from `origin`.
std::vector<Cents> monthly_credits(std::span<const LedgerEntry> entries, const std::string& account,
                                   Timestamp origin, int horizon_months);

struct PaybackReport {
    OwnerId owner_id;
    Cents premium_cents = 0;
    int horizon_months = 0;
    Timestamp origin{};
    std::vector<Cents> monthly_credits;
    std::optional<int> months;
    bool within_threshold = false;
};

/// Months are counted from `origin`, or from the owner's first credit.
PaybackReport payback_report(std::span<const LedgerEntry> entries, const OwnerId& owner, Cents premium_cents,
                             int horizon_months, std::optional<Timestamp> origin = std::nullopt);

} // namespace sensemarket
