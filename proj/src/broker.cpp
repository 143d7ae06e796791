// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/broker.hpp"

#include <algorithm>
#include <cctype>

#include "sensemarket/codec.hpp"

namespace sensemarket {
namespace {

std::string slug(std::string_view text) {
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c))
            out.push_back(static_cast<char>(std::tolower(c)));
        else if (!out.empty() && out.back() != '-')
            out.push_back('-');
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out.empty() ? "consumer" : out.substr(0, 64);
}

json offer_notice(const Offer& offer) {
    json options = json::array();
    for (std::size_t i = 0; i < offer.options.size(); ++i)
        options.push_back({{"index", i}, {"option", offer.options[i]}, {"label", describe(offer.options[i])}});
    json notice = {{"offer_id", offer.offer_id},
                   {"consumer_id", offer.consumer_id},
                   {"consumer_category", offer.consumer_category},
                   {"publisher_id", offer.publisher_id},
                   {"sensor_ids", offer.sensor_ids},
                   {"options", std::move(options)},
                   {"term_days", offer.term_days},
                   {"expires_at", offer.expires_at}};
    put_optional(notice, "via_esp", offer.via_esp);
    return notice;
}

} // namespace

Broker::Broker(BrokerConfig config, BrokerServices services)
    : config_(std::move(config)),
      services_(std::move(services)),
      device_keys_(services_.deployment_key),
      registry_(config_.publisher_id) {
    require(is_valid_identifier(config_.publisher_id.str()), ErrorCode::InvalidArgument,
            "invalid publisher id '" + config_.publisher_id.str() + "'");
    require(services_.taxonomy && services_.clock && services_.authority && services_.ledger,
            ErrorCode::InvalidArgument, "broker services are incomplete");
    require(config_.default_term_days > 0, ErrorCode::InvalidArgument, "default term must be positive");
    require(config_.offer_ttl > Duration::zero(), ErrorCode::InvalidArgument, "offer TTL must be positive");

    std::optional<std::filesystem::path> readings_dir;
    if (config_.data_dir) readings_dir = *config_.data_dir / "readings";
    data_plane_ = std::make_unique<DataPlane>(config_.publisher_id, services_.clock, KeyedHasher(services_.deployment_key),
                                              readings_dir, config_.reading_retention_cap);

    if (config_.data_dir) {
        const auto path = *config_.data_dir / "journal.jsonl";
        std::lock_guard lock(mutex_);
        for (const auto& event : JsonLinesLog::read_all(path)) apply(event, false);
        journal_ = std::make_unique<JsonLinesLog>(path);
    }
}

Broker::~Broker() = default;

void Broker::record(const json& event) {
    if (journal_) journal_->append(event);
}

void Broker::apply(const json& event, bool live) {
    const auto type = event.at("type").get<std::string>();
    if (type == "owner_registered") {
        registry_.put_owner(event.at("owner").get<SensorOwner>());
    } else if (type == "device_announced") {
        auto registration = event.at("registration").get<PendingRegistration>();
        auto sensors = event.at("sensors").get<std::vector<SensorDescriptor>>();
        for (const auto& s : sensors) data_plane_->bind_sensor(s);
        if (registration.owner_id)
            inbox_.post(registration.owner_id->str(), "publish_request", registration.announced_at,
                        {{"device_id", registration.device_id}, {"sensors", sensors}});
        registry_.add_device(std::move(registration), std::move(sensors));
    } else if (type == "device_claimed") {
        const auto device = event.at("device_id").get<DeviceId>();
        const auto owner = event.at("owner_id").get<OwnerId>();
        registry_.claim_device(device, owner);
        std::vector<SensorDescriptor> sensors;
        for (const auto& id : registry_.find_device(device)->sensor_ids) {
            data_plane_->bind_sensor(*registry_.find_sensor(id));
            sensors.push_back(*registry_.find_sensor(id));
        }
        inbox_.post(owner.str(), "publish_request", event.at("at").get<Timestamp>(),
                    {{"device_id", device}, {"sensors", sensors}});
    } else if (type == "policy_set") {
        auto policy = event.at("policy").get<PublicationPolicy>();
        if (policy.policy_id.str().starts_with(config_.publisher_id.str() + "-p")) ++next_policy_;
        registry_.put_policy(policy);
        if (live && policy.published) {
            CatalogChange change{config_.publisher_id, {}};
            for (const auto& id : policy.sensor_ids)
                change.newly_visible.push_back(
                    PublishedSensor{*registry_.find_sensor(id), policy.allowed_consumer_categories});
            pending_changes_.push_back(std::move(change));
        }
    } else if (type == "consumer_registered") {
        auto identity = event.at("identity").get<ConsumerIdentity>();
        ++next_consumer_;
        consumers_.insert_or_assign(identity.consumer_id, std::move(identity));
    } else if (type == "offer_submitted") {
        auto offer = event.at("offer").get<Offer>();
        next_offer_ = std::max(next_offer_, offer.sequence + 1);
        inbox_.post(offer.owner_id.str(), "offer_received", offer.submitted_at, offer_notice(offer));
        book_.put_offer(std::move(offer));
    } else if (type == "offer_status") {
        const auto id = event.at("offer_id").get<OfferId>();
        const auto status = event.at("status").get<OfferStatus>();
        book_.set_status(id, status);
        const auto* offer = book_.find_offer(id);
        if (status == OfferStatus::Outbid || status == OfferStatus::Expired)
            inbox_.post(offer->owner_id.str(), "offer_" + std::string(to_string(status)), event.at("at").get<Timestamp>(),
                        {{"offer_id", id}});
    } else if (type == "agreement_created") {
        auto agreement = event.at("agreement").get<Agreement>();
        ++next_agreement_;
        data_plane_->grant(Entitlement{agreement.agreement_id, agreement.parties.consumer_id, agreement.sensor_ids,
                                       agreement.window, config_.anonymization, std::nullopt});
        services_.ledger->track(agreement);
        inbox_.post(agreement.parties.owner_id.str(), "agreement_created", agreement.window.start,
                    {{"agreement_id", agreement.agreement_id},
                     {"offer_id", agreement.offer_id},
                     {"chosen_option", agreement.chosen_option},
                     {"label", describe(agreement.chosen_option)},
                     {"window", agreement.window}});
        book_.put_agreement(std::move(agreement));
    } else if (type == "agreement_cancelled") {
        const auto id = event.at("agreement_id").get<AgreementId>();
        const auto at = event.at("at").get<Timestamp>();
        book_.cancel_agreement(id, at);
        data_plane_->revoke(id, at);
        services_.ledger->track(*book_.find_agreement(id));
    } else {
        fail(ErrorCode::Internal, "unknown journal event type: " + type);
    }
}

void Broker::dispatch_changes() {
    std::lock_guard dispatch(dispatch_mutex_);
    std::vector<CatalogChange> changes;
    {
        std::lock_guard lock(mutex_);
        changes.swap(pending_changes_);
    }
    for (const auto& change : changes)
        for (const auto& listener : listeners_) listener(change);
}

void Broker::on_catalog_change(CatalogListener listener) {
    std::lock_guard dispatch(dispatch_mutex_);
    listeners_.push_back(std::move(listener));
}

std::string Broker::device_token(const DeviceId& device) const {
    return device_keys_.digest_hex("device-token:" + device.str());
}

void Broker::verify(const Certificate& certificate) const {
    services_.authority->verify(certificate, services_.clock->now());
}

SensorOwner Broker::register_owner(const SensorOwner& owner) {
    validate(owner);
    std::lock_guard lock(mutex_);
    if (const auto* existing = registry_.find_owner(owner.owner_id)) {
        require(*existing == owner, ErrorCode::Conflict, "owner " + owner.owner_id.str() + " is already registered");
        return *existing;
    }
    const json event = {{"type", "owner_registered"}, {"owner", owner}};
    apply(event, true);
    record(event);
    return owner;
}

PendingRegistration Broker::announce_device(const DeviceAnnouncement& a) {
    require(is_valid_identifier(a.device_id.str()), ErrorCode::InvalidArgument,
            "invalid device id '" + a.device_id.str() + "'");
    require(!a.sensors.empty(), ErrorCode::InvalidArgument, "device announcement lists no sensors");
    require(!a.location.empty(), ErrorCode::InvalidArgument, "device announcement lacks a location");
    std::set<std::string> names;
    for (const auto& s : a.sensors) {
        require(is_valid_identifier(s.local_name), ErrorCode::InvalidArgument,
                "invalid sensor name '" + s.local_name + "'");
        require(names.insert(s.local_name).second, ErrorCode::InvalidArgument,
                "duplicate sensor name '" + s.local_name + "'");
        require(taxonomy().has_term(s.phenomenon), ErrorCode::InvalidArgument,
                "unknown phenomenon '" + s.phenomenon + "'");
        require(s.sampling_period_s > 0.0, ErrorCode::InvalidArgument, "sampling period must be positive");
    }

    std::unique_lock lock(mutex_);
    require(registry_.find_device(a.device_id) == nullptr, ErrorCode::Conflict,
            "device " + a.device_id.str() + " is already active");
    if (a.owner_hint)
        require(registry_.find_owner(*a.owner_hint) != nullptr, ErrorCode::NotFound,
                "owner " + a.owner_hint->str() + " is not registered");

    PendingRegistration registration;
    registration.device_id = a.device_id;
    registration.owner_id = a.owner_hint;
    registration.announced_at = clock().now();
    registration.device_token = device_token(a.device_id);
    std::vector<SensorDescriptor> sensors;
    for (const auto& s : a.sensors) {
        SensorDescriptor d;
        d.sensor_id = make_sensor_id(config_.publisher_id, a.device_id, s.local_name);
        d.device_id = a.device_id;
        d.owner_id = a.owner_hint.value_or(OwnerId{});
        d.local_name = s.local_name;
        d.phenomenon = s.phenomenon;
        d.unit = s.unit;
        d.location = a.location;
        d.coordinates = a.coordinates;
        d.sampling_period_s = s.sampling_period_s;
        d.publisher_id = config_.publisher_id;
        registration.sensor_ids.push_back(d.sensor_id);
        sensors.push_back(std::move(d));
    }
    const json event = {{"type", "device_announced"}, {"registration", registration}, {"sensors", sensors}};
    apply(event, true);
    record(event);
    return registration;
}

void Broker::claim_device(const DeviceId& device, const OwnerId& owner) {
    std::lock_guard lock(mutex_);
    const auto* registration = registry_.find_device(device);
    require(registration != nullptr, ErrorCode::NotFound, "unknown device " + device.str());
    require(registry_.find_owner(owner) != nullptr, ErrorCode::NotFound, "owner " + owner.str() + " is not registered");
    if (registration->owner_id == owner) return;
    require(!registration->owner_id, ErrorCode::Conflict, "device " + device.str() + " already has an owner");
    const json event = {{"type", "device_claimed"}, {"device_id", device}, {"owner_id", owner}, {"at", clock().now()}};
    apply(event, true);
    record(event);
}

PublicationPolicy Broker::set_policy(const OwnerId& owner, PublicationPolicy policy) {
    {
        std::lock_guard lock(mutex_);
        require(registry_.find_owner(owner) != nullptr, ErrorCode::NotFound, "owner " + owner.str() + " is not registered");
        if (policy.owner_id.empty()) policy.owner_id = owner;
        require(policy.owner_id == owner, ErrorCode::PermissionDenied, "policy names a different owner");
        require(!policy.sensor_ids.empty(), ErrorCode::InvalidArgument, "policy covers no sensors");
        require(policy.reserve_cents >= 0, ErrorCode::InvalidArgument, "reserve cannot be negative");
        for (const auto& id : policy.sensor_ids) {
            const auto* sensor = registry_.find_sensor(id);
            require(sensor != nullptr, ErrorCode::NotFound, "sensor " + id.str() + " is not registered here");
            require(sensor->owner_id == owner, ErrorCode::PermissionDenied,
                    "sensor " + id.str() + " does not belong to " + owner.str());
        }
        if (policy.policy_id.empty()) {
            do {
                policy.policy_id = PolicyId{config_.publisher_id.str() + "-p" + std::to_string(next_policy_++)};
            } while (registry_.find_policy(policy.policy_id) != nullptr);
            --next_policy_; // apply() counts the generated id
        } else {
            require(is_valid_identifier(policy.policy_id.str()), ErrorCode::InvalidArgument, "invalid policy id");
            if (const auto* existing = registry_.find_policy(policy.policy_id))
                require(existing->owner_id == owner, ErrorCode::PermissionDenied,
                        "policy " + policy.policy_id.str() + " belongs to another owner");
        }
        const json event = {{"type", "policy_set"}, {"policy", policy}, {"at", clock().now()}};
        apply(event, true);
        record(event);
    }
    dispatch_changes();
    return policy;
}

std::vector<SensorDescriptor> Broker::search_catalog(const CatalogQuery& query, const Certificate& requester) {
    verify(requester);
    std::lock_guard lock(mutex_);
    return registry_.search(query, requester.consumer_category, taxonomy());
}

ConsumerIdentity Broker::register_consumer(const std::string& organization_name, const std::string& consumer_category,
                                           std::optional<ConsumerId> consumer_id) {
    require(!organization_name.empty(), ErrorCode::InvalidArgument, "organization name is empty");
    require(!consumer_category.empty(), ErrorCode::InvalidArgument, "consumer category is empty");
    std::lock_guard lock(mutex_);
    ConsumerId id;
    if (consumer_id) {
        require(is_valid_identifier(consumer_id->str()), ErrorCode::InvalidArgument, "invalid consumer id");
        require(!consumers_.contains(*consumer_id), ErrorCode::Conflict,
                "consumer " + consumer_id->str() + " is already registered");
        id = *consumer_id;
    } else {
        const auto base = slug(organization_name);
        id = ConsumerId{base};
        for (int n = 2; consumers_.contains(id); ++n) id = ConsumerId{base + "-" + std::to_string(n)};
    }
    const auto now = clock().now();
    ConsumerIdentity identity{id, organization_name, consumer_category,
                              services_.authority->issue(id, organization_name, consumer_category,
                                                         now + config_.certificate_ttl)};
    const json event = {{"type", "consumer_registered"}, {"identity", identity}};
    apply(event, true);
    record(event);
    return identity;
}

Offer Broker::submit_offer(const OfferRequest& request, const Certificate& consumer) {
    verify(consumer);
    require(!request.sensor_ids.empty(), ErrorCode::InvalidArgument, "offer targets no sensors");
    require(!request.options.empty(), ErrorCode::InvalidArgument, "offer carries no compensation options");
    for (const auto& option : request.options) validate(option);
    const int term_days = request.term_days.value_or(config_.default_term_days);
    require(term_days > 0, ErrorCode::InvalidArgument, "term_days must be positive");
    if (request.via_esp)
        require(is_valid_identifier(request.via_esp->str()), ErrorCode::InvalidArgument, "invalid ESP id");

    std::lock_guard lock(mutex_);
    const auto now = clock().now();
    const auto expires_at = request.expires_at.value_or(now + config_.offer_ttl);
    require(expires_at > now, ErrorCode::InvalidArgument, "offer would already be expired");

    std::optional<OwnerId> owner;
    for (const auto& id : request.sensor_ids) {
        const auto* sensor = registry_.find_sensor(id);
        require(sensor != nullptr && registry_.is_visible(id), ErrorCode::NotFound,
                "sensor " + id.str() + " is not published");
        if (!owner) owner = sensor->owner_id;
        require(*owner == sensor->owner_id, ErrorCode::InvalidArgument, "offer spans sensors of more than one owner");
    }
    for (const auto& id : request.sensor_ids)
        require(registry_.policy_for(id)->admits(consumer.consumer_category), ErrorCode::PermissionDenied,
                "consumer category '" + consumer.consumer_category + "' may not bid on " + id.str());

    Offer offer;
    offer.sequence = next_offer_;
    offer.offer_id = OfferId{config_.publisher_id.str() + "-o" + std::to_string(offer.sequence)};
    offer.consumer_id = consumer.subject;
    offer.consumer_category = consumer.consumer_category;
    offer.via_esp = request.via_esp;
    offer.sensor_ids = request.sensor_ids;
    offer.options = request.options;
    offer.term_days = term_days;
    offer.submitted_at = now;
    offer.expires_at = expires_at;
    offer.owner_id = *owner;
    offer.publisher_id = config_.publisher_id;
    const json event = {{"type", "offer_submitted"}, {"offer", offer}};
    apply(event, true);
    record(event);
    return offer;
}

void Broker::check_acceptable_locked(const Offer& offer, Timestamp now) const {
    for (const auto& id : offer.sensor_ids) {
        require(registry_.is_visible(id), ErrorCode::FailedPrecondition, "sensor " + id.str() + " is no longer published");
        require(book_.active_agreement(id, offer.consumer_id, now) == nullptr, ErrorCode::Conflict,
                "consumer " + offer.consumer_id.str() + " already holds an active agreement for " + id.str());
    }
}

Agreement Broker::accept_locked(const Offer& offer, std::size_t option_index, Timestamp now) {
    Agreement agreement;
    agreement.agreement_id = AgreementId{config_.publisher_id.str() + "-a" + std::to_string(next_agreement_)};
    agreement.offer_id = offer.offer_id;
    agreement.chosen_index = option_index;
    agreement.chosen_option = offer.options.at(option_index);
    agreement.sensor_ids = offer.sensor_ids;
    agreement.term_days = offer.term_days;
    agreement.window = Window{now, now + days(offer.term_days)};
    agreement.parties = AgreementParties{offer.owner_id, offer.consumer_id, offer.publisher_id, offer.via_esp};

    const json status = {{"type", "offer_status"}, {"offer_id", offer.offer_id}, {"status", OfferStatus::Accepted}, {"at", now}};
    const json created = {{"type", "agreement_created"}, {"agreement", agreement}};
    apply(status, true);
    apply(created, true);
    record(status);
    record(created);
    return agreement;
}

DecisionResult Broker::owner_decide(const OfferId& offer_id, const OwnerDecision& decision) {
    std::lock_guard lock(mutex_);
    const auto* offer = book_.find_offer(offer_id);
    require(offer != nullptr, ErrorCode::NotFound, "unknown offer " + offer_id.str());
    require(offer->status == OfferStatus::Pending, ErrorCode::FailedPrecondition,
            "offer " + offer_id.str() + " is " + std::string(to_string(offer->status)));
    const auto now = clock().now();
    if (now >= offer->expires_at) {
        const json expired = {{"type", "offer_status"}, {"offer_id", offer_id}, {"status", OfferStatus::Expired}, {"at", now}};
        apply(expired, true);
        record(expired);
        fail(ErrorCode::FailedPrecondition, "offer " + offer_id.str() + " expired at " + to_rfc3339(offer->expires_at));
    }
    if (decision.kind == OwnerDecision::Kind::Reject) {
        const json rejected = {{"type", "offer_status"}, {"offer_id", offer_id}, {"status", OfferStatus::Rejected}, {"at", now}};
        apply(rejected, true);
        record(rejected);
        return {*book_.find_offer(offer_id), std::nullopt};
    }
    require(decision.option_index < offer->options.size(), ErrorCode::InvalidArgument,
            "option index " + std::to_string(decision.option_index) + " out of range");
    check_acceptable_locked(*offer, now);
    auto agreement = accept_locked(*offer, decision.option_index, now);
    return {*book_.find_offer(offer_id), std::move(agreement)};
}

Resolution Broker::resolve_competition(const SensorId& sensor_id, Timestamp at, bool commit) {
    std::lock_guard lock(mutex_);
    const auto* sensor = registry_.find_sensor(sensor_id);
    require(sensor != nullptr, ErrorCode::NotFound, "unknown sensor " + sensor_id.str());
    Resolution resolution;
    resolution.sensor_id = sensor_id;
    const auto* owner = registry_.find_owner(sensor->owner_id);
    if (owner == nullptr) return resolution;
    const auto* policy = registry_.policy_for(sensor_id);
    const Cents reserve = policy ? policy->reserve_cents : 0;
    const bool auto_commit = commit || (policy != nullptr && policy->auto_accept);
    const auto now = clock().now();

    std::vector<Bid> bids;
    for (const auto* offer : book_.pending_for_sensor(sensor_id)) {
        if (offer->expires_at <= at) continue;
        try {
            check_acceptable_locked(*offer, now);
        } catch (const MarketError&) {
            continue;
        }
        bids.push_back(make_bid(*offer, *owner));
    }
    resolution.outcome = rank_first_price(bids, reserve);
    if (!auto_commit || !resolution.outcome.winner) return resolution;

    const auto& winner = *resolution.outcome.winner;
    resolution.agreement = accept_locked(*book_.find_offer(winner.offer_id), winner.best_option, now);
    for (const auto& bid : bids) {
        if (bid.offer_id == winner.offer_id) continue;
        const json outbid = {{"type", "offer_status"}, {"offer_id", bid.offer_id}, {"status", OfferStatus::Outbid}, {"at", now}};
        apply(outbid, true);
        record(outbid);
        resolution.outbid.push_back(bid.offer_id);
    }
    return resolution;
}

std::size_t Broker::expire_offers(Timestamp now) {
    std::lock_guard lock(mutex_);
    std::vector<OfferId> due;
    for (const auto& [id, offer] : book_.offers())
        if (offer.status == OfferStatus::Pending && offer.expires_at <= now) due.push_back(id);
    for (const auto& id : due) {
        const json expired = {{"type", "offer_status"}, {"offer_id", id}, {"status", OfferStatus::Expired}, {"at", now}};
        apply(expired, true);
        record(expired);
    }
    return due.size();
}

Agreement Broker::cancel_agreement(const AgreementId& id) {
    std::lock_guard lock(mutex_);
    const auto* agreement = book_.find_agreement(id);
    require(agreement != nullptr, ErrorCode::NotFound, "unknown agreement " + id.str());
    const auto now = clock().now();
    require(agreement->status_at(now) == AgreementStatus::Active, ErrorCode::FailedPrecondition,
            "agreement " + id.str() + " is not active");
    const json event = {{"type", "agreement_cancelled"}, {"agreement_id", id}, {"at", now}};
    apply(event, true);
    record(event);
    return *book_.find_agreement(id);
}

IngestResult Broker::ingest(std::span<const Reading> batch, const std::optional<std::string>& device_token_value) {
    if (!device_token_value) return data_plane_->ingest(batch);

    std::set<SensorId> allowed;
    {
        std::lock_guard lock(mutex_);
        for (const auto& [id, registration] : registry_.devices())
            if (registration.device_token == *device_token_value)
                allowed.insert(registration.sensor_ids.begin(), registration.sensor_ids.end());
    }
    IngestResult result;
    if (allowed.empty()) {
        for (std::size_t i = 0; i < batch.size(); ++i)
            result.rejected.push_back({i, ErrorCode::Unauthenticated, "unknown device credential"});
        return result;
    }
    std::vector<Reading> accepted_batch;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!allowed.contains(batch[i].sensor_id)) {
            result.rejected.push_back(
                {i, ErrorCode::PermissionDenied, "sensor " + batch[i].sensor_id.str() + " does not belong to this device"});
            continue;
        }
        accepted_batch.push_back(batch[i]);
        origin.push_back(i);
    }
    auto inner = data_plane_->ingest(accepted_batch);
    result.accepted = inner.accepted;
    for (auto r : inner.rejected) {
        r.index = origin[r.index];
        result.rejected.push_back(std::move(r));
    }
    std::sort(result.rejected.begin(), result.rejected.end(),
              [](const IngestRejection& a, const IngestRejection& b) { return a.index < b.index; });
    return result;
}

std::vector<AnonymizedReading> Broker::query(const Certificate& consumer, const SensorId& sensor, Timestamp from,
                                             Timestamp to) {
    verify(consumer);
    return data_plane_->query(consumer.subject, sensor, from, to);
}

std::shared_ptr<Subscription> Broker::subscribe(const Certificate& consumer, const SensorId& sensor) {
    verify(consumer);
    return data_plane_->subscribe(consumer.subject, sensor);
}

std::vector<Offer> Broker::offers(std::optional<OwnerId> owner, std::optional<OfferStatus> status) const {
    std::lock_guard lock(mutex_);
    std::vector<Offer> out;
    for (const auto& [id, offer] : book_.offers())
        if ((!owner || offer.owner_id == *owner) && (!status || offer.status == *status)) out.push_back(offer);
    std::sort(out.begin(), out.end(), [](const Offer& a, const Offer& b) { return a.sequence < b.sequence; });
    return out;
}

std::optional<Offer> Broker::find_offer(const OfferId& id) const {
    std::lock_guard lock(mutex_);
    const auto* offer = book_.find_offer(id);
    return offer ? std::optional<Offer>(*offer) : std::nullopt;
}

std::vector<Agreement> Broker::agreements() const {
    std::lock_guard lock(mutex_);
    std::vector<Agreement> out;
    for (const auto& [id, a] : book_.agreements()) out.push_back(a);
    return out;
}

std::optional<Agreement> Broker::find_agreement(const AgreementId& id) const {
    std::lock_guard lock(mutex_);
    const auto* a = book_.find_agreement(id);
    return a ? std::optional<Agreement>(*a) : std::nullopt;
}

std::optional<SensorDescriptor> Broker::find_sensor(const SensorId& id) const {
    std::lock_guard lock(mutex_);
    const auto* s = registry_.find_sensor(id);
    return s ? std::optional<SensorDescriptor>(*s) : std::nullopt;
}

std::optional<SensorOwner> Broker::find_owner(const OwnerId& id) const {
    std::lock_guard lock(mutex_);
    const auto* o = registry_.find_owner(id);
    return o ? std::optional<SensorOwner>(*o) : std::nullopt;
}

std::optional<PublicationPolicy> Broker::policy_for(const SensorId& id) const {
    std::lock_guard lock(mutex_);
    const auto* p = registry_.policy_for(id);
    return p ? std::optional<PublicationPolicy>(*p) : std::nullopt;
}

std::vector<SensorDescriptor> Broker::all_sensors() const {
    std::lock_guard lock(mutex_);
    std::vector<SensorDescriptor> out;
    for (const auto& [id, s] : registry_.sensors()) out.push_back(s);
    return out;
}

std::vector<PublishedSensor> Broker::visible_sensors() const {
    std::lock_guard lock(mutex_);
    std::vector<PublishedSensor> out;
    for (const auto& [id, s] : registry_.sensors())
        if (const auto* p = registry_.policy_for(id); p && p->published)
            out.push_back(PublishedSensor{s, p->allowed_consumer_categories});
    return out;
}

json Broker::snapshot() const {
    std::lock_guard lock(mutex_);
    json owners = json::array();
    for (const auto& [id, o] : registry_.owners()) owners.push_back(o);
    json devices = json::array();
    for (const auto& [id, d] : registry_.devices()) devices.push_back(d);
    json sensors = json::array();
    for (const auto& [id, s] : registry_.sensors()) {
        json entry = s;
        entry["state"] = std::string(to_string(registry_.state(id)));
        sensors.push_back(std::move(entry));
    }
    json policies = json::array();
    for (const auto& [id, p] : registry_.policies()) policies.push_back(p);
    json consumers = json::array();
    for (const auto& [id, c] : consumers_)
        consumers.push_back({{"consumer_id", c.consumer_id},
                             {"organization_name", c.organization_name},
                             {"consumer_category", c.consumer_category}});
    json offers = json::array();
    for (const auto& [id, o] : book_.offers()) offers.push_back(o);
    json agreements = json::array();
    for (const auto& [id, a] : book_.agreements()) agreements.push_back(a);
    return {{"publisher_id", config_.publisher_id},
            {"owners", std::move(owners)},
            {"devices", std::move(devices)},
            {"sensors", std::move(sensors)},
            {"policies", std::move(policies)},
            {"consumers", std::move(consumers)},
            {"offers", std::move(offers)},
            {"agreements", std::move(agreements)}};
}

} // namespace sensemarket
