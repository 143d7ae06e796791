// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/esp.hpp"

#include <algorithm>

#include "sensemarket/broker.hpp"
#include "sensemarket/codec.hpp"
#include "sensemarket/ledger.hpp"

namespace sensemarket {

PublisherId InProcessPublisherPort::publisher_id() const { return broker_.publisher_id(); }

std::vector<SensorDescriptor> InProcessPublisherPort::search(const CatalogQuery& query, const Certificate& requester) {
    return broker_.search_catalog(query, requester);
}

Offer InProcessPublisherPort::submit_offer(const OfferRequest& request, const Certificate& consumer) {
    return broker_.submit_offer(request, consumer);
}

std::size_t Plan::sensor_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.sensors.size();
    return n;
}

std::set<SensorId> Plan::sensor_ids() const {
    std::set<SensorId> ids;
    for (const auto& e : entries)
        for (const auto& s : e.sensors) ids.insert(s.sensor_id);
    return ids;
}

std::set<std::string> expand_terms(const SensorConstraints& constraints, const PhenomenonTaxonomy& taxonomy) {
    std::set<std::string> terms;
    if (constraints.phenomenon_group) terms = taxonomy.expand(*constraints.phenomenon_group);
    for (const auto& t : constraints.terms) terms.merge(taxonomy.expand(t));
    return terms;
}

bool matches(const SensorConstraints& constraints, const std::set<std::string>& terms, const SensorDescriptor& sensor) {
    if (!terms.empty() && !terms.contains(sensor.phenomenon)) return false;
    if (!constraints.region_prefix.contains(sensor.location)) return false;
    if (constraints.min_sampling_period_s && sensor.sampling_period_s < *constraints.min_sampling_period_s) return false;
    return true;
}

namespace {

void check_constraints(const SensorConstraints& c) {
    require(c.has_selection(), ErrorCode::InvalidArgument, "requirement names no phenomenon, group or region");
    if (c.max_monthly_budget_cents)
        require(*c.max_monthly_budget_cents >= 0, ErrorCode::InvalidArgument, "budget cannot be negative");
    if (c.min_sampling_period_s)
        require(*c.min_sampling_period_s > 0.0, ErrorCode::InvalidArgument, "sampling period must be positive");
}

/// Smallest monthly cash commitment among the options. Discounts cost the
/// consumer nothing up front.
Cents cheapest_commitment(const std::vector<CompensationOption>& options) {
    Cents best = 0;
    bool first = true;
    for (const auto& option : options) {
        const Cents c = std::holds_alternative<MonthlyFee>(option) ? std::get<MonthlyFee>(option).amount_cents : 0;
        best = first ? c : std::min(best, c);
        first = false;
    }
    return best;
}

} // namespace

ExtendedServiceProvider::ExtendedServiceProvider(EspId id, std::shared_ptr<const PhenomenonTaxonomy> taxonomy,
                                                 std::shared_ptr<const Clock> clock,
                                                 std::shared_ptr<const CertificateAuthority> authority,
                                                 std::optional<std::filesystem::path> data_dir)
    : id_(std::move(id)), taxonomy_(std::move(taxonomy)), clock_(std::move(clock)), authority_(std::move(authority)) {
    require(is_valid_identifier(id_.str()), ErrorCode::InvalidArgument, "invalid ESP id '" + id_.str() + "'");
    if (data_dir) {
        const auto path = *data_dir / "esp-journal.jsonl";
        std::lock_guard lock(interests_mutex_);
        for (const auto& event : JsonLinesLog::read_all(path)) apply(event);
        journal_ = std::make_unique<JsonLinesLog>(path);
    }
}

void ExtendedServiceProvider::add_publisher(std::shared_ptr<PublisherPort> port) {
    std::lock_guard lock(ports_mutex_);
    ports_.push_back(std::move(port));
}

void ExtendedServiceProvider::apply(const json& event) {
    const auto type = event.at("type").get<std::string>();
    if (type == "interest_registered") {
        auto interest = event.at("interest").get<InterestRegistration>();
        ++next_interest_;
        interests_.insert_or_assign(interest.interest_id, std::move(interest));
    } else if (type == "interest_deactivated") {
        interests_.at(event.at("interest_id").get<InterestId>()).active = false;
    } else if (type == "interest_notified") {
        auto n = event.at("notification").get<InterestNotification>();
        next_seq_ = std::max(next_seq_, n.seq + 1);
        notified_.emplace(n.interest_id, n.sensor.sensor_id);
        sent_.push_back(std::move(n));
    } else {
        fail(ErrorCode::Internal, "unknown ESP journal event type: " + type);
    }
}

Plan ExtendedServiceProvider::resolve(const Requirement& requirement, const Certificate& consumer) {
    authority_->verify(consumer, clock_->now());
    check_constraints(requirement.constraints);
    const auto terms = expand_terms(requirement.constraints, *taxonomy_);

    std::vector<std::shared_ptr<PublisherPort>> ports;
    {
        std::lock_guard lock(ports_mutex_);
        ports = ports_;
    }
    Plan plan;
    for (const auto& port : ports) {
        std::map<SensorId, SensorDescriptor> found;
        try {
            auto collect = [&](std::optional<std::string> phenomenon) {
                CatalogQuery query{std::move(phenomenon), std::nullopt, requirement.constraints.region_prefix};
                for (auto& s : port->search(query, consumer))
                    if (matches(requirement.constraints, terms, s)) found.emplace(s.sensor_id, std::move(s));
            };
            if (terms.empty())
                collect(std::nullopt);
            else
                for (const auto& term : terms) collect(term);
        } catch (const MarketError& e) {
            if (e.code() != ErrorCode::Unavailable) throw;
            plan.degraded = true;
            plan.unreachable.push_back(port->publisher_id());
            continue;
        }
        if (found.empty()) continue;
        PlanEntry entry{port->publisher_id(), {}};
        for (auto& [id, s] : found) entry.sensors.push_back(std::move(s));
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

std::vector<AcquireOutcome> ExtendedServiceProvider::acquire(const Plan& plan,
                                                             const std::vector<CompensationOption>& options,
                                                             int term_days, const Certificate& consumer,
                                                             std::optional<Cents> max_monthly_budget_cents) {
    authority_->verify(consumer, clock_->now());
    require(!options.empty(), ErrorCode::InvalidArgument, "no compensation options");
    for (const auto& o : options) validate(o);
    require(term_days > 0, ErrorCode::InvalidArgument, "term_days must be positive");

    std::map<PublisherId, std::shared_ptr<PublisherPort>> by_id;
    {
        std::lock_guard lock(ports_mutex_);
        for (const auto& p : ports_) by_id.emplace(p->publisher_id(), p);
    }

    const Cents commitment = cheapest_commitment(options);
    Cents committed = 0;
    std::vector<AcquireOutcome> outcomes;
    for (const auto& entry : plan.entries) {
        std::map<OwnerId, std::set<SensorId>> by_owner;
        for (const auto& s : entry.sensors) by_owner[s.owner_id].insert(s.sensor_id);
        for (auto& [owner, sensors] : by_owner) {
            AcquireOutcome outcome{entry.publisher_id, owner, sensors, std::nullopt, std::nullopt, {}};
            auto port = by_id.find(entry.publisher_id);
            if (port == by_id.end()) {
                outcome.error = ErrorCode::Unavailable;
                outcome.message = "no route to publisher " + entry.publisher_id.str();
            } else if (max_monthly_budget_cents && committed + commitment > *max_monthly_budget_cents) {
                outcome.error = ErrorCode::FailedPrecondition;
                outcome.message = "monthly budget exhausted";
            } else if (ledger_ && !ledger_->can_fund(consumer.subject, committed + commitment)) {
                outcome.error = ErrorCode::FailedPrecondition;
                outcome.message = "consumer account cannot fund this offer";
            } else {
                OfferRequest request;
                request.sensor_ids = sensors;
                request.options = options;
                request.term_days = term_days;
                request.via_esp = id_;
                try {
                    outcome.offer = port->second->submit_offer(request, consumer);
                    committed += commitment;
                } catch (const MarketError& e) {
                    outcome.error = e.code();
                    outcome.message = e.what();
                }
            }
            outcomes.push_back(std::move(outcome));
        }
    }
    return outcomes;
}

InterestRegistration ExtendedServiceProvider::register_interest(const Certificate& consumer,
                                                                SensorConstraints constraints) {
    authority_->verify(consumer, clock_->now());
    check_constraints(constraints);
    (void)expand_terms(constraints, *taxonomy_);
    std::lock_guard lock(interests_mutex_);
    InterestRegistration interest{InterestId{id_.str() + "-i" + std::to_string(next_interest_)}, consumer.subject,
                                  consumer.consumer_category, std::move(constraints), true};
    const json event = {{"type", "interest_registered"}, {"interest", interest}};
    apply(event);
    if (journal_) journal_->append(event);
    return interest;
}

void ExtendedServiceProvider::deactivate_interest(const InterestId& id) {
    std::lock_guard lock(interests_mutex_);
    require(interests_.contains(id), ErrorCode::NotFound, "unknown interest " + id.str());
    const json event = {{"type", "interest_deactivated"}, {"interest_id", id}};
    apply(event);
    if (journal_) journal_->append(event);
}

std::vector<InterestNotification> ExtendedServiceProvider::match_interests(const CatalogChange& change) {
    std::lock_guard lock(interests_mutex_);
    std::vector<InterestNotification> sent;
    for (const auto& published : change.newly_visible) {
        for (const auto& [id, interest] : interests_) {
            if (!interest.active || notified_.contains({id, published.descriptor.sensor_id})) continue;
            if (!published.allowed_consumer_categories.empty() &&
                !published.allowed_consumer_categories.contains(interest.consumer_category))
                continue;
            if (!matches(interest.constraints, expand_terms(interest.constraints, *taxonomy_), published.descriptor))
                continue;
            InterestNotification n{next_seq_, id, interest.consumer_id, change.publisher_id, published.descriptor,
                                   clock_->now()};
            const json event = {{"type", "interest_notified"}, {"notification", n}};
            apply(event);
            if (journal_) journal_->append(event);
            sent.push_back(std::move(n));
        }
    }
    return sent;
}

std::vector<InterestNotification> ExtendedServiceProvider::notifications(const InterestId& id,
                                                                         std::uint64_t after_seq) const {
    std::lock_guard lock(interests_mutex_);
    require(interests_.contains(id), ErrorCode::NotFound, "unknown interest " + id.str());
    std::vector<InterestNotification> out;
    for (const auto& n : sent_)
        if (n.interest_id == id && n.seq > after_seq) out.push_back(n);
    return out;
}

std::vector<InterestRegistration> ExtendedServiceProvider::interests() const {
    std::lock_guard lock(interests_mutex_);
    std::vector<InterestRegistration> out;
    for (const auto& [id, i] : interests_) out.push_back(i);
    return out;
}

std::optional<InterestRegistration> ExtendedServiceProvider::find_interest(const InterestId& id) const {
    std::lock_guard lock(interests_mutex_);
    auto it = interests_.find(id);
    return it == interests_.end() ? std::nullopt : std::optional<InterestRegistration>(it->second);
}

} // namespace sensemarket
