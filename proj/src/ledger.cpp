// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/ledger.hpp"

#include <algorithm>
#include <numeric>

#include "sensemarket/codec.hpp"
#include "sensemarket/journal.hpp"

namespace sensemarket {

std::string_view to_string(AccountRole role) noexcept {
    switch (role) {
    case AccountRole::Owner: return "owner";
    case AccountRole::Consumer: return "consumer";
    case AccountRole::SpCommission: return "sp_commission";
    case AccountRole::EspCommission: return "esp_commission";
    }
    return "owner";
}

std::string_view to_string(EntryReason reason) noexcept {
    switch (reason) {
    case EntryReason::MonthlyFee: return "monthly_fee";
    case EntryReason::SpCommission: return "sp_commission";
    case EntryReason::EspCommission: return "esp_commission";
    case EntryReason::DiscountRedemption: return "discount_redemption";
    }
    return "monthly_fee";
}

EntryReason entry_reason_from_string(std::string_view name) {
    for (auto r : {EntryReason::MonthlyFee, EntryReason::SpCommission, EntryReason::EspCommission,
                   EntryReason::DiscountRedemption})
        if (to_string(r) == name) return r;
    fail(ErrorCode::InvalidArgument, "unknown entry reason: " + std::string(name));
}

std::string owner_account(const OwnerId& owner) { return "owner:" + owner.str(); }
std::string consumer_account(const ConsumerId& consumer) { return "consumer:" + consumer.str(); }
std::string sp_account(const PublisherId& publisher) { return "sp:" + publisher.str(); }
std::string esp_account(const EspId& esp) { return "esp:" + esp.str(); }

AccountRole account_role(std::string_view account_id) {
    if (account_id.starts_with("owner:")) return AccountRole::Owner;
    if (account_id.starts_with("consumer:")) return AccountRole::Consumer;
    if (account_id.starts_with("sp:")) return AccountRole::SpCommission;
    if (account_id.starts_with("esp:")) return AccountRole::EspCommission;
    fail(ErrorCode::InvalidArgument, "unrecognized account id: " + std::string(account_id));
}

void validate(const CommissionRates& rates) {
    require(rates.sp >= 0 && rates.sp < kFullBasisPoints, ErrorCode::InvalidArgument, "r_sp must lie in [0, 1)");
    require(rates.esp >= 0 && rates.esp < kFullBasisPoints, ErrorCode::InvalidArgument, "r_esp must lie in [0, 1)");
    require(rates.sp + rates.esp < kFullBasisPoints, ErrorCode::InvalidArgument, "r_sp + r_esp must be below 1");
}

FeeSplit split_fee(Cents amount, const CommissionRates& rates, bool via_esp) {
    FeeSplit split;
    split.sp = amount * rates.sp / kFullBasisPoints;
    split.esp = via_esp ? amount * rates.esp / kFullBasisPoints : 0;
    split.owner = amount - split.sp - split.esp;
    return split;
}

std::uint32_t cycle_count(int term_days) {
    const auto month_days = static_cast<int>(std::chrono::duration_cast<std::chrono::hours>(kBillingMonth).count() / 24);
    return static_cast<std::uint32_t>(std::max(1, (term_days + month_days - 1) / month_days));
}

Timestamp cycle_start(const Agreement& agreement, std::uint32_t cycle) {
    return agreement.window.start + kBillingMonth * static_cast<std::int64_t>(cycle);
}

Ledger::Ledger(CommissionRates rates, std::optional<Cents> consumer_credit_floor,
               std::optional<std::filesystem::path> file)
    : rates_(rates), credit_floor_(consumer_credit_floor), file_(std::move(file)) {
    validate(rates_);
}

void Ledger::track(const Agreement& agreement) {
    std::lock_guard lock(mutex_);
    agreements_.insert_or_assign(agreement.agreement_id, agreement);
}

std::vector<LedgerEntry> Ledger::post_cycle(const AgreementId& agreement, std::uint32_t cycle, Timestamp now) {
    std::lock_guard lock(mutex_);
    auto it = agreements_.find(agreement);
    require(it != agreements_.end(), ErrorCode::NotFound, "ledger does not know agreement " + agreement.str());
    return post_cycle_locked(it->second, cycle, now);
}

std::vector<LedgerEntry> Ledger::post_cycle_locked(const Agreement& agreement, std::uint32_t cycle, Timestamp now) {
    const auto* fee = std::get_if<MonthlyFee>(&agreement.chosen_option);
    require(fee != nullptr, ErrorCode::FailedPrecondition,
            "agreement " + agreement.agreement_id.str() + " is not a monthly-fee agreement");
    require(cycle < cycle_count(agreement.term_days), ErrorCode::FailedPrecondition,
            "cycle " + std::to_string(cycle) + " lies outside the agreement term");
    const Timestamp due = cycle_start(agreement, cycle);
    require(due <= now, ErrorCode::FailedPrecondition, "cycle " + std::to_string(cycle) + " is not due before " +
                                                           to_rfc3339(due));
    require(!agreement.cancelled_at || *agreement.cancelled_at > due, ErrorCode::FailedPrecondition,
            "agreement " + agreement.agreement_id.str() + " was cancelled before cycle " + std::to_string(cycle));
    require(!posted_cycles_.contains({agreement.agreement_id, cycle}), ErrorCode::Conflict,
            "cycle " + std::to_string(cycle) + " of " + agreement.agreement_id.str() + " already posted");

    const auto consumer = consumer_account(agreement.parties.consumer_id);
    if (credit_floor_) {
        const auto bal = balances_.contains(consumer) ? balances_.at(consumer) : 0;
        require(bal - fee->amount_cents >= *credit_floor_, ErrorCode::FailedPrecondition,
                "consumer " + agreement.parties.consumer_id.str() + " would exceed its credit floor");
    }

    const auto split = split_fee(fee->amount_cents, rates_, agreement.parties.esp_id.has_value());
    std::vector<LedgerEntry> posted;
    auto emit = [&](std::string credit, Cents amount, EntryReason reason) {
        if (amount <= 0) return;
        LedgerEntry e;
        e.ts = due;
        e.debit_account = consumer;
        e.credit_account = std::move(credit);
        e.amount_cents = amount;
        e.reason = reason;
        e.agreement_id = agreement.agreement_id;
        e.cycle_index = cycle;
        append_locked(e);
        posted.push_back(entries_.back());
    };
    emit(owner_account(agreement.parties.owner_id), split.owner, EntryReason::MonthlyFee);
    emit(sp_account(agreement.parties.publisher_id), split.sp, EntryReason::SpCommission);
    if (agreement.parties.esp_id) emit(esp_account(*agreement.parties.esp_id), split.esp, EntryReason::EspCommission);
    posted_cycles_.insert({agreement.agreement_id, cycle});
    return posted;
}

std::vector<LedgerEntry> Ledger::post_due_cycles(Timestamp as_of) {
    std::lock_guard lock(mutex_);
    std::vector<LedgerEntry> posted;
    for (const auto& [id, agreement] : agreements_) {
        if (!std::holds_alternative<MonthlyFee>(agreement.chosen_option)) continue;
        for (std::uint32_t c = 0; c < cycle_count(agreement.term_days); ++c) {
            const Timestamp due = cycle_start(agreement, c);
            if (due > as_of) break;
            if (agreement.cancelled_at && *agreement.cancelled_at <= due) break;
            if (posted_cycles_.contains({id, c})) continue;
            auto entries = post_cycle_locked(agreement, c, as_of);
            posted.insert(posted.end(), entries.begin(), entries.end());
        }
    }
    return posted;
}

std::optional<LedgerEntry> Ledger::redeem_discount(const AgreementId& agreement_id, Cents purchase_cents,
                                                   Timestamp now) {
    require(purchase_cents >= 0, ErrorCode::InvalidArgument, "purchase amount cannot be negative");
    std::lock_guard lock(mutex_);
    auto it = agreements_.find(agreement_id);
    require(it != agreements_.end(), ErrorCode::NotFound, "ledger does not know agreement " + agreement_id.str());
    const auto& agreement = it->second;
    const auto* discount = std::get_if<PurchaseDiscount>(&agreement.chosen_option);
    require(discount != nullptr, ErrorCode::FailedPrecondition,
            "agreement " + agreement_id.str() + " is not a purchase-discount agreement");
    require(agreement.status_at(now) == AgreementStatus::Active, ErrorCode::FailedPrecondition,
            "agreement " + agreement_id.str() + " is not active");

    const Cents amount = purchase_cents * discount->basis_points / kFullBasisPoints;
    if (amount <= 0) return std::nullopt;
    const auto consumer = consumer_account(agreement.parties.consumer_id);
    if (credit_floor_) {
        const auto bal = balances_.contains(consumer) ? balances_.at(consumer) : 0;
        require(bal - amount >= *credit_floor_, ErrorCode::FailedPrecondition,
                "consumer " + agreement.parties.consumer_id.str() + " would exceed its credit floor");
    }
    LedgerEntry e;
    e.ts = now;
    e.debit_account = consumer;
    e.credit_account = owner_account(agreement.parties.owner_id);
    e.amount_cents = amount;
    e.reason = EntryReason::DiscountRedemption;
    e.agreement_id = agreement_id;
    append_locked(e);
    return entries_.back();
}

void Ledger::append_locked(LedgerEntry entry) {
    entry.entry_id = next_entry_id_;
    check_locked(entry);
    if (file_) {
        if (!out_.is_open()) {
            JsonLinesLog trim(*file_); // truncates a torn tail before we append
            out_.open(*file_, std::ios::app | std::ios::binary);
            require(out_.good(), ErrorCode::Internal, "cannot open ledger file " + file_->string());
        }
        out_ << json(entry).dump() << '\n';
        out_.flush();
        require(out_.good(), ErrorCode::Internal, "ledger write failed");
    }
    apply_locked(entry);
}

void Ledger::check_locked(const LedgerEntry& entry) const {
    require(entry.debit_account != entry.credit_account, ErrorCode::InvalidArgument,
            "ledger entry debits and credits the same account");
    require(entry.amount_cents > 0, ErrorCode::InvalidArgument, "ledger entry amount must be positive");
    require(agreements_.contains(entry.agreement_id), ErrorCode::FailedPrecondition,
            "ledger entry references unknown agreement " + entry.agreement_id.str());
    account_role(entry.debit_account);
    account_role(entry.credit_account);
}

void Ledger::apply_locked(const LedgerEntry& entry) {
    check_locked(entry);
    balances_[entry.debit_account] -= entry.amount_cents;
    balances_[entry.credit_account] += entry.amount_cents;
    if (entry.cycle_index) posted_cycles_.insert({entry.agreement_id, *entry.cycle_index});
    next_entry_id_ = std::max(next_entry_id_, entry.entry_id + 1);
    entries_.push_back(entry);
}

void Ledger::load() {
    if (!file_) return;
    auto records = JsonLinesLog::read_all(*file_);
    std::lock_guard lock(mutex_);
    for (const auto& record : records) apply_locked(record.get<LedgerEntry>());
}

std::vector<LedgerEntry> Ledger::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::vector<Account> Ledger::accounts() const {
    std::lock_guard lock(mutex_);
    std::vector<Account> out;
    for (const auto& [id, bal] : balances_) out.push_back(Account{id, account_role(id), bal});
    return out;
}

Cents Ledger::balance(const std::string& account_id) const {
    std::lock_guard lock(mutex_);
    auto it = balances_.find(account_id);
    return it == balances_.end() ? 0 : it->second;
}

Cents Ledger::total_balance() const {
    std::lock_guard lock(mutex_);
    Cents sum = 0;
    for (const auto& [id, bal] : balances_) sum += bal;
    return sum;
}

bool Ledger::cycle_posted(const AgreementId& agreement, std::uint32_t cycle) const {
    std::lock_guard lock(mutex_);
    return posted_cycles_.contains({agreement, cycle});
}

bool Ledger::can_fund(const ConsumerId& consumer, Cents commitment) const {
    if (!credit_floor_) return true;
    return balance(consumer_account(consumer)) - commitment >= *credit_floor_;
}

std::vector<LedgerEntry> read_ledger_file(const std::filesystem::path& file) {
    require(std::filesystem::exists(file), ErrorCode::NotFound, "no ledger file at " + file.string());
    std::vector<LedgerEntry> out;
    for (const auto& record : JsonLinesLog::read_all(file)) out.push_back(record.get<LedgerEntry>());
    return out;
}

CostComparison cost_comparison_report(std::int64_t respondents, Cents traditional_total_cents,
                                      Cents per_response_cents) {
    require(respondents > 0, ErrorCode::InvalidArgument, "respondents must be positive");
    require(traditional_total_cents > 0, ErrorCode::InvalidArgument, "traditional total must be positive");
    require(per_response_cents > 0, ErrorCode::InvalidArgument, "per-response cost must be positive");
    CostComparison r;
    r.respondents = respondents;
    r.traditional_total_cents = traditional_total_cents;
    r.traditional_per_response_cents = traditional_total_cents / respondents;
    r.traditional_remainder_cents = traditional_total_cents % respondents;
    r.automated_per_response_cents = per_response_cents;
    r.automated_total_cents = per_response_cents * respondents;
    const auto g = std::gcd(r.traditional_total_cents, r.automated_total_cents);
    r.ratio_numerator = r.traditional_total_cents / g;
    r.ratio_denominator = r.automated_total_cents / g;
    return r;
}

std::optional<int> payback_months(std::span<const Cents> monthly_credits, Cents premium_cents) {
    if (premium_cents <= 0) return 0;
    Cents cumulative = 0;
    for (std::size_t m = 0; m < monthly_credits.size(); ++m) {
        cumulative += monthly_credits[m];
        if (cumulative >= premium_cents) return static_cast<int>(m + 1);
    }
    return std::nullopt;
}

std::vector<Cents> monthly_credits(std::span<const LedgerEntry> entries, const std::string& account,
                                   Timestamp origin, int horizon_months) {
    std::vector<Cents> months(static_cast<std::size_t>(std::max(0, horizon_months)), 0);
    for (const auto& e : entries) {
        if (e.ts < origin) continue;
        const auto index = (e.ts - origin) / kBillingMonth;
        if (index >= horizon_months) continue;
        if (e.credit_account == account) months[static_cast<std::size_t>(index)] += e.amount_cents;
        if (e.debit_account == account) months[static_cast<std::size_t>(index)] -= e.amount_cents;
    }
    return months;
}

PaybackReport payback_report(std::span<const LedgerEntry> entries, const OwnerId& owner, Cents premium_cents,
                             int horizon_months, std::optional<Timestamp> origin) {
    require(horizon_months > 0, ErrorCode::InvalidArgument, "horizon must be at least one month");
    require(premium_cents >= 0, ErrorCode::InvalidArgument, "premium cannot be negative");
    const auto account = owner_account(owner);
    PaybackReport report;
    report.owner_id = owner;
    report.premium_cents = premium_cents;
    report.horizon_months = horizon_months;
    if (origin) {
        report.origin = *origin;
    } else {
        std::optional<Timestamp> first;
        for (const auto& e : entries)
            if (e.credit_account == account && (!first || e.ts < *first)) first = e.ts;
        report.origin = first.value_or(Timestamp{});
    }
    report.monthly_credits = monthly_credits(entries, account, report.origin, horizon_months);
    report.months = payback_months(report.monthly_credits, premium_cents);
    report.within_threshold = report.months && *report.months <= kPaybackThresholdMonths;
    return report;
}

} // namespace sensemarket
