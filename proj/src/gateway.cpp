// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/gateway.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sensemarket/codec.hpp"

namespace sensemarket {

std::string_view to_string(DeploymentMode mode) noexcept {
    return mode == DeploymentMode::Service ? "service" : "simulation";
}

std::string_view to_string(DeploymentRole role) noexcept {
    switch (role) {
    case DeploymentRole::Sp: return "sp";
    case DeploymentRole::Esp: return "esp";
    case DeploymentRole::All: return "all";
    }
    return "all";
}

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::int64_t parse_int(std::string_view key, std::string_view value) {
    std::int64_t out = 0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    require(ec == std::errc{} && end == value.data() + value.size(), ErrorCode::InvalidArgument,
            std::string(key) + ": not an integer: '" + std::string(value) + "'");
    return out;
}

BasisPoints parse_rate(std::string_view key, std::string_view value) {
    char* end = nullptr;
    const std::string text(value);
    const double rate = std::strtod(text.c_str(), &end);
    require(!text.empty() && end == text.c_str() + text.size() && std::isfinite(rate), ErrorCode::InvalidArgument,
            std::string(key) + ": not a number: '" + text + "'");
    require(rate >= 0.0 && rate < 1.0, ErrorCode::InvalidArgument, std::string(key) + " must lie in [0, 1)");
    return static_cast<BasisPoints>(std::llround(rate * 10000.0));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::InvalidArgument, "cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "publisher_id", "esp_id",     "listen",         "r_sp",      "r_esp",         "cert_ttl_days",
        "offer_ttl_days", "anonymization_depth", "peers_file", "data_dir", "keys_file", "taxonomy_file",
        "credit_floor_cents", "mode", "role", "simulation_start"};
    return keys;
}

} // namespace

void DeploymentConfig::set(std::string_view key_in, std::string_view value_in) {
    const std::string key = trim(key_in);
    const std::string value = trim(value_in);
    if (key == "publisher_id") {
        publisher_id = PublisherId{value};
    } else if (key == "esp_id") {
        esp_id = EspId{value};
    } else if (key == "listen") {
        const auto colon = value.rfind(':');
        require(colon != std::string::npos, ErrorCode::InvalidArgument, "listen must be host:port");
        listen_host = value.substr(0, colon);
        listen_port = static_cast<int>(parse_int(key, std::string_view(value).substr(colon + 1)));
    } else if (key == "r_sp") {
        rates.sp = parse_rate(key, value);
    } else if (key == "r_esp") {
        rates.esp = parse_rate(key, value);
    } else if (key == "cert_ttl_days") {
        cert_ttl_days = static_cast<int>(parse_int(key, value));
    } else if (key == "offer_ttl_days") {
        offer_ttl_days = static_cast<int>(parse_int(key, value));
    } else if (key == "anonymization_depth") {
        const auto depth = parse_int(key, value);
        require(depth >= 0, ErrorCode::InvalidArgument, "anonymization_depth cannot be negative");
        anonymization_depth = static_cast<std::size_t>(depth);
    } else if (key == "peers_file") {
        peers_file = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    } else if (key == "data_dir") {
        data_dir = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    } else if (key == "keys_file") {
        keys_file = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    } else if (key == "taxonomy_file") {
        taxonomy_file = value.empty() ? std::nullopt : std::optional<std::filesystem::path>(value);
    } else if (key == "credit_floor_cents") {
        credit_floor_cents = value.empty() ? std::nullopt : std::optional<Cents>(parse_int(key, value));
    } else if (key == "mode") {
        require(value == "service" || value == "simulation", ErrorCode::InvalidArgument,
                "mode must be service or simulation");
        mode = value == "service" ? DeploymentMode::Service : DeploymentMode::Simulation;
    } else if (key == "role") {
        require(value == "sp" || value == "esp" || value == "all", ErrorCode::InvalidArgument,
                "role must be sp, esp or all");
        role = value == "sp" ? DeploymentRole::Sp : value == "esp" ? DeploymentRole::Esp : DeploymentRole::All;
    } else if (key == "simulation_start") {
        simulation_start = parse_rfc3339(value);
    } else {
        fail(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
    }
}

void DeploymentConfig::validate() const {
    require(is_valid_identifier(publisher_id.str()), ErrorCode::InvalidArgument, "invalid publisher_id");
    require(is_valid_identifier(esp_id.str()), ErrorCode::InvalidArgument, "invalid esp_id");
    require(listen_port >= 0 && listen_port <= 65535, ErrorCode::InvalidArgument, "listen port out of range");
    sensemarket::validate(rates);
    require(cert_ttl_days > 0, ErrorCode::InvalidArgument, "cert_ttl_days must be positive");
    require(offer_ttl_days > 0, ErrorCode::InvalidArgument, "offer_ttl_days must be positive");
    if (credit_floor_cents)
        require(*credit_floor_cents <= 0, ErrorCode::InvalidArgument, "credit_floor_cents cannot be positive");
}

DeploymentConfig DeploymentConfig::parse(std::string_view text) {
    DeploymentConfig config;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        require(eq != std::string::npos, ErrorCode::InvalidArgument,
                "config line " + std::to_string(line_no) + ": expected key=value");
        config.set(std::string_view(body).substr(0, eq), std::string_view(body).substr(eq + 1));
    }
    return config;
}

DeploymentConfig DeploymentConfig::load(const std::filesystem::path& file) { return parse(read_file(file)); }

void DeploymentConfig::apply_env(const std::function<std::optional<std::string>(const std::string&)>& lookup) {
    for (const auto& key : config_keys()) {
        std::string name = "MKT_";
        for (char c : key) name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (auto value = lookup(name)) set(key, *value);
    }
}

void DeploymentConfig::apply_process_env() {
    apply_env([](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        return v ? std::optional<std::string>(v) : std::nullopt;
    });
}

std::vector<PeerPublisher> parse_peers(std::string_view text) {
    std::vector<PeerPublisher> peers;
    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto comma = body.find(',');
        require(comma != std::string::npos, ErrorCode::InvalidArgument,
                "peers line " + std::to_string(line_no) + ": expected publisher_id,base_url");
        PeerPublisher peer{PublisherId{trim(body.substr(0, comma))}, trim(body.substr(comma + 1))};
        require(is_valid_identifier(peer.publisher_id.str()) && !peer.base_url.empty(), ErrorCode::InvalidArgument,
                "peers line " + std::to_string(line_no) + ": bad entry");
        peers.push_back(std::move(peer));
    }
    return peers;
}

// ---- remote publisher ----

namespace {

[[noreturn]] void raise_remote(const httplib::Result& result, const std::string& what) {
    if (!result) fail(ErrorCode::Unavailable, what + ": " + httplib::to_string(result.error()));
    ErrorCode code = ErrorCode::Internal;
    std::string message = "HTTP " + std::to_string(result->status);
    try {
        const auto body = json::parse(result->body);
        code = error_code_from_string(body.at("error").at("code").get<std::string>());
        message = body.at("error").at("message").get<std::string>();
    } catch (const std::exception&) {
        if (result->status >= 500) code = ErrorCode::Unavailable;
    }
    fail(code, what + ": " + message);
}

httplib::Headers bearer(const Certificate& certificate) {
    return {{"Authorization", "Bearer " + encode_certificate_token(certificate)}};
}

} // namespace

HttpPublisherPort::HttpPublisherPort(PublisherId id, std::string base_url)
    : id_(std::move(id)), base_url_(std::move(base_url)) {}

std::vector<SensorDescriptor> HttpPublisherPort::search(const CatalogQuery& query, const Certificate& requester) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(2);
    client.set_read_timeout(10);
    httplib::Params params;
    if (query.phenomenon) params.emplace("phenomenon", *query.phenomenon);
    if (query.group) params.emplace("group", *query.group);
    if (!query.region_prefix.empty()) params.emplace("region", query.region_prefix.str());
    auto result = client.Get("/v1/catalog/search", params, bearer(requester));
    if (!result || result->status != 200) raise_remote(result, "search at " + id_.str());
    return json::parse(result->body).at("sensors").get<std::vector<SensorDescriptor>>();
}

Offer HttpPublisherPort::submit_offer(const OfferRequest& request, const Certificate& consumer) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(2);
    client.set_read_timeout(10);
    auto result = client.Post("/v1/offers", bearer(consumer), json(request).dump(), "application/json");
    if (!result || result->status != 201) raise_remote(result, "offer at " + id_.str());
    return json::parse(result->body).get<Offer>();
}

// ---- deployment ----

namespace {

struct Keys {
    KeySeed ca{};
    KeySeed deployment{};
};

void write_json_atomic(const std::filesystem::path& file, const json& value) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    const auto tmp = std::filesystem::path(file.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << value.dump() << '\n';
        out.flush();
        require(out.good(), ErrorCode::Unavailable, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

Keys load_or_create_keys(const DeploymentConfig& config) {
    std::optional<std::filesystem::path> file = config.keys_file;
    if (!file && config.data_dir) file = *config.data_dir / "keys.json";
    if (!file) {
        if (config.mode == DeploymentMode::Simulation)
            return {seed_from_label("simulation/ca"), seed_from_label("simulation/keys")};
        return {random_seed(), random_seed()};
    }
    auto to_seed = [](const std::string& hex) {
        const auto bytes = from_hex(hex);
        require(bytes.size() == KeySeed{}.size(), ErrorCode::InvalidArgument, "key file holds a malformed seed");
        KeySeed seed{};
        std::copy(bytes.begin(), bytes.end(), seed.begin());
        return seed;
    };
    if (std::filesystem::exists(*file)) {
        const auto j = parse_json(read_file(*file));
        return {to_seed(j.at("ca_seed").get<std::string>()), to_seed(j.at("deployment_key").get<std::string>())};
    }
    Keys keys{random_seed(), random_seed()};
    write_json_atomic(*file, json{{"ca_seed", to_hex(keys.ca)}, {"deployment_key", to_hex(keys.deployment)}});
    return keys;
}

std::optional<std::filesystem::path> clock_file(const DeploymentConfig& config) {
    if (config.mode != DeploymentMode::Simulation || !config.data_dir) return std::nullopt;
    return *config.data_dir / "clock.json";
}

} // namespace

Deployment::Deployment(DeploymentConfig config) : config_(std::move(config)) {
    config_.validate();
    if (config_.data_dir) std::filesystem::create_directories(*config_.data_dir);

    if (config_.mode == DeploymentMode::Simulation) {
        // A restarted simulation resumes where its clock last stood.
        auto start = config_.simulation_start;
        if (auto file = clock_file(config_); file && std::filesystem::exists(*file))
            start = std::max(start, parse_json(read_file(*file)).at("time").get<Timestamp>());
        simulated_clock_ = std::make_shared<SimulatedClock>(start);
        clock_ = simulated_clock_;
    } else {
        clock_ = std::make_shared<SystemClock>();
    }
    taxonomy_ = config_.taxonomy_file
                    ? std::make_shared<const PhenomenonTaxonomy>(PhenomenonTaxonomy::load(*config_.taxonomy_file))
                    : std::make_shared<const PhenomenonTaxonomy>(PhenomenonTaxonomy::builtin());
    const auto keys = load_or_create_keys(config_);
    authority_ = std::make_shared<const CertificateAuthority>("sensemarket-ca", keys.ca);

    std::optional<std::filesystem::path> ledger_file;
    if (config_.data_dir) ledger_file = *config_.data_dir / "ledger.jsonl";
    ledger_ = std::make_shared<Ledger>(config_.rates, config_.credit_floor_cents, ledger_file);

    if (config_.role != DeploymentRole::Esp) {
        BrokerConfig bc;
        bc.publisher_id = config_.publisher_id;
        bc.anonymization.region_truncate_depth = config_.anonymization_depth;
        bc.certificate_ttl = days(config_.cert_ttl_days);
        bc.offer_ttl = days(config_.offer_ttl_days);
        if (config_.data_dir) bc.data_dir = *config_.data_dir / "sp";
        if (bc.data_dir) std::filesystem::create_directories(*bc.data_dir);
        broker_ = std::make_unique<Broker>(bc, BrokerServices{taxonomy_, clock_, authority_, ledger_, keys.deployment});
    }
    // Agreements are tracked by the broker replay above; entries can now refer to them.
    ledger_->load();

    if (config_.role != DeploymentRole::Sp) {
        std::optional<std::filesystem::path> esp_dir;
        if (config_.data_dir) {
            esp_dir = *config_.data_dir / "esp";
            std::filesystem::create_directories(*esp_dir);
        }
        esp_ = std::make_unique<ExtendedServiceProvider>(config_.esp_id, taxonomy_, clock_, authority_, esp_dir);
        if (broker_) {
            esp_->add_publisher(std::make_shared<InProcessPublisherPort>(*broker_));
            esp_->set_funding_ledger(ledger_);
            auto* esp = esp_.get();
            broker_->on_catalog_change([esp](const CatalogChange& change) { esp->match_interests(change); });
        }
        if (config_.peers_file)
            for (auto& peer : parse_peers(read_file(*config_.peers_file)))
                if (!broker_ || peer.publisher_id != broker_->publisher_id())
                    esp_->add_publisher(std::make_shared<HttpPublisherPort>(peer.publisher_id, peer.base_url));
    }
}

Deployment::~Deployment() = default;

Timestamp Deployment::advance_clock(Duration by) {
    require(simulated_clock_ != nullptr, ErrorCode::FailedPrecondition, "clock control needs simulation mode");
    std::lock_guard lock(clock_mutex_);
    simulated_clock_->advance(by);
    const auto now = simulated_clock_->now();
    if (auto file = clock_file(config_)) write_json_atomic(*file, json{{"time", now}});
    return now;
}

json Deployment::health() const {
    return {{"status", "ok"},
            {"publisher_id", config_.publisher_id},
            {"esp_id", config_.esp_id},
            {"role", std::string(to_string(config_.role))},
            {"mode", std::string(to_string(config_.mode))},
            {"time", clock_->now()}};
}

json Deployment::snapshot() const {
    json interests = json::array();
    if (esp_)
        for (const auto& i : esp_->interests()) interests.push_back(i);
    return {{"broker", broker_ ? broker_->snapshot() : json()},
            {"ledger", {{"entries", ledger_->entries()}, {"accounts", ledger_->accounts()}}},
            {"interests", std::move(interests)}};
}

// ---- HTTP gateway ----

namespace {

using httplib::Request;
using httplib::Response;

void reply(Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json body_of(const Request& req) { return parse_json(req.body.empty() ? std::string_view("{}") : req.body); }

std::optional<std::string> param(const Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
}

std::string path_param(const Request& req, const char* name) { return req.path_params.at(name); }

Certificate bearer_certificate(const Request& req) {
    const auto header = req.get_header_value("Authorization");
    require(header.starts_with("Bearer "), ErrorCode::Unauthenticated, "missing bearer certificate");
    return decode_certificate_token(std::string_view(header).substr(7));
}

std::int64_t int_param(const Request& req, const char* name, std::int64_t fallback) {
    const auto v = param(req, name);
    return v ? parse_int(name, *v) : fallback;
}

} // namespace

struct HttpGateway::Impl {
    Deployment& d;
    httplib::Server server;

    explicit Impl(Deployment& deployment) : d(deployment) {
        server.set_exception_handler([](const Request&, Response& res, std::exception_ptr ep) {
            ErrorCode code = ErrorCode::Internal;
            std::string message = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const MarketError& e) {
                code = e.code();
                message = e.what();
            } catch (const json::exception& e) {
                code = ErrorCode::InvalidArgument;
                message = std::string("malformed request: ") + e.what();
            } catch (const std::exception& e) {
                message = e.what();
            }
            reply(res, {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}}, http_status(code));
        });
        server.set_error_handler([](const Request&, Response& res) {
            if (!res.body.empty()) return;
            const auto code = res.status == 404 ? ErrorCode::NotFound : ErrorCode::InvalidArgument;
            reply(res, {{"error", {{"code", std::string(to_string(code))}, {"message", "no such endpoint"}}}},
                  res.status);
        });
        mount_common();
        if (d.broker()) mount_publisher();
        if (d.esp()) mount_esp();
    }

    Broker& broker() {
        require(d.broker() != nullptr, ErrorCode::FailedPrecondition, "this process does not run the publisher role");
        return *d.broker();
    }

    void mount_common() {
        server.Get("/v1/health", [this](const Request&, Response& res) { reply(res, d.health()); });
        server.Get("/v1/admin/snapshot", [this](const Request&, Response& res) { reply(res, d.snapshot()); });
        server.Post("/v1/admin/clock/advance", [this](const Request& req, Response& res) {
            const auto b = body_of(req);
            reply(res, {{"time", d.advance_clock(days(b.value("days", 0)) + hours(b.value("hours", 0)) +
                                                 seconds(b.value("seconds", 0)))}});
        });
        server.Post("/v1/ledger/post-cycles", [this](const Request& req, Response& res) {
            const auto b = body_of(req);
            const auto now = d.clock().now();
            const auto as_of = get_optional<Timestamp>(b, "as_of").value_or(now);
            require(as_of <= now, ErrorCode::FailedPrecondition, "cannot post cycles due after the current time");
            reply(res, {{"posted", d.ledger().post_due_cycles(as_of)}});
        });
        server.Post("/v1/ledger/redeem", [this](const Request& req, Response& res) {
            const auto b = body_of(req);
            const auto entry = d.ledger().redeem_discount(b.at("agreement_id").get<AgreementId>(),
                                                          b.at("purchase_cents").get<Cents>(), d.clock().now());
            reply(res, {{"entry", entry ? json(*entry) : json()}});
        });
        server.Get("/v1/ledger/entries", [this](const Request&, Response& res) {
            reply(res, {{"entries", d.ledger().entries()}});
        });
        server.Get("/v1/ledger/accounts", [this](const Request&, Response& res) {
            reply(res, {{"accounts", d.ledger().accounts()}, {"total_cents", d.ledger().total_balance()}});
        });
        server.Get("/v1/reports/payback", [this](const Request& req, Response& res) {
            const auto owner = param(req, "owner");
            require(owner.has_value(), ErrorCode::InvalidArgument, "owner is required");
            std::optional<Timestamp> origin;
            if (auto o = param(req, "origin")) origin = parse_rfc3339(*o);
            reply(res, payback_report(d.ledger().entries(), OwnerId{*owner}, int_param(req, "premium", 6000),
                                      static_cast<int>(int_param(req, "horizon", 12)), origin));
        });
        server.Get("/v1/reports/cost-comparison", [](const Request& req, Response& res) {
            reply(res, cost_comparison_report(int_param(req, "respondents", 1000),
                                              int_param(req, "traditional_total_cents", 800000),
                                              int_param(req, "per_response_cents", 10)));
        });
    }

    void mount_publisher() {
        server.Post("/v1/owners", [this](const Request& req, Response& res) {
            reply(res, broker().register_owner(decode<SensorOwner>(body_of(req))), 201);
        });
        server.Get("/v1/owners/:id", [this](const Request& req, Response& res) {
            const auto owner = broker().find_owner(OwnerId{path_param(req, "id")});
            require(owner.has_value(), ErrorCode::NotFound, "unknown owner");
            reply(res, *owner);
        });
        server.Post("/v1/devices/announce", [this](const Request& req, Response& res) {
            reply(res, broker().announce_device(decode<DeviceAnnouncement>(body_of(req))), 201);
        });
        server.Post("/v1/devices/:id/claim", [this](const Request& req, Response& res) {
            broker().claim_device(DeviceId{path_param(req, "id")}, body_of(req).at("owner_id").get<OwnerId>());
            reply(res, {{"device_id", path_param(req, "id")}, {"claimed", true}});
        });
        server.Post("/v1/owners/:id/policies", [this](const Request& req, Response& res) {
            reply(res, broker().set_policy(OwnerId{path_param(req, "id")}, decode<PublicationPolicy>(body_of(req))), 201);
        });
        server.Get("/v1/sensors/:id", [this](const Request& req, Response& res) {
            const SensorId id{path_param(req, "id")};
            const auto sensor = broker().find_sensor(id);
            require(sensor.has_value(), ErrorCode::NotFound, "unknown sensor");
            json out = {{"sensor", *sensor}};
            if (auto policy = broker().policy_for(id)) out["policy"] = *policy;
            reply(res, out);
        });
        server.Get("/v1/catalog/search", [this](const Request& req, Response& res) {
            CatalogQuery query;
            query.phenomenon = param(req, "phenomenon");
            query.group = param(req, "group");
            if (auto r = param(req, "region")) query.region_prefix = RegionTag(*r);
            reply(res, {{"sensors", broker().search_catalog(query, bearer_certificate(req))}});
        });
        server.Post("/v1/consumers/register", [this](const Request& req, Response& res) {
            const auto b = body_of(req);
            reply(res,
                  broker().register_consumer(b.at("organization_name").get<std::string>(),
                                             b.at("consumer_category").get<std::string>(),
                                             get_optional<ConsumerId>(b, "consumer_id")),
                  201);
        });
        server.Post("/v1/offers", [this](const Request& req, Response& res) {
            const auto cert = bearer_certificate(req);
            reply(res, broker().submit_offer(decode<OfferRequest>(body_of(req)), cert), 201);
        });
        server.Post("/v1/offers/expire", [this](const Request&, Response& res) {
            reply(res, {{"expired", broker().expire_offers(d.clock().now())}});
        });
        server.Get("/v1/offers/:id", [this](const Request& req, Response& res) {
            const auto offer = broker().find_offer(OfferId{path_param(req, "id")});
            require(offer.has_value(), ErrorCode::NotFound, "unknown offer");
            reply(res, *offer);
        });
        server.Post("/v1/offers/:id/decision", [this](const Request& req, Response& res) {
            const auto b = body_of(req);
            const auto kind = b.at("decision").get<std::string>();
            require(kind == "accept" || kind == "reject", ErrorCode::InvalidArgument, "decision must be accept or reject");
            const auto decision = kind == "accept" ? OwnerDecision::accept(b.at("option_index").get<std::size_t>())
                                                   : OwnerDecision::reject();
            const auto result = broker().owner_decide(OfferId{path_param(req, "id")}, decision);
            json out = {{"offer", result.offer}};
            if (result.agreement) out["agreement"] = *result.agreement;
            reply(res, out);
        });
        server.Get("/v1/owners/:id/offers", [this](const Request& req, Response& res) {
            std::optional<OfferStatus> status;
            if (auto s = param(req, "status")) status = offer_status_from_string(*s);
            reply(res, {{"offers", broker().offers(OwnerId{path_param(req, "id")}, status)}});
        });
        server.Post("/v1/sensors/:id/resolve", [this](const Request& req, Response& res) {
            const auto b = body_of(req);
            const auto r = broker().resolve_competition(SensorId{path_param(req, "id")}, d.clock().now(),
                                                        b.value("commit", false));
            json out = {{"sensor_id", r.sensor_id}, {"outcome", r.outcome}, {"outbid", r.outbid}};
            if (r.agreement) out["agreement"] = *r.agreement;
            reply(res, out);
        });
        server.Get("/v1/owners/:id/inbox", [this](const Request& req, Response& res) {
            const auto owner = path_param(req, "id");
            const auto after = static_cast<std::uint64_t>(int_param(req, "after", 0));
            if (req.get_header_value("Accept").find("text/event-stream") != std::string::npos) {
                auto cursor = std::make_shared<std::uint64_t>(after);
                res.set_chunked_content_provider("text/event-stream", [this, owner, cursor](std::size_t, httplib::DataSink& sink) {
                    const auto notes = broker().inbox().wait(owner, *cursor, std::chrono::seconds(15));
                    if (notes.empty()) return sink.write(": keepalive\n\n", 13);
                    for (const auto& n : notes) {
                        const auto frame = "id: " + std::to_string(n.seq) + "\ndata: " + json(n).dump() + "\n\n";
                        if (!sink.write(frame.data(), frame.size())) return false;
                        *cursor = n.seq;
                    }
                    return true;
                });
                return;
            }
            const auto wait_ms = int_param(req, "wait_ms", 0);
            const auto notes = wait_ms > 0
                                   ? broker().inbox().wait(owner, after, std::chrono::milliseconds(std::min<std::int64_t>(wait_ms, 30000)))
                                   : broker().inbox().list(owner, after);
            reply(res, {{"notifications", notes}});
        });
        server.Get("/v1/agreements", [this](const Request& req, Response& res) {
            const auto owner = param(req, "owner");
            const auto consumer = param(req, "consumer");
            const auto now = d.clock().now();
            json out = json::array();
            for (const auto& a : broker().agreements()) {
                if (owner && a.parties.owner_id.str() != *owner) continue;
                if (consumer && a.parties.consumer_id.str() != *consumer) continue;
                json entry = a;
                entry["status"] = std::string(to_string(a.status_at(now)));
                out.push_back(std::move(entry));
            }
            reply(res, {{"agreements", std::move(out)}});
        });
        server.Get("/v1/agreements/:id", [this](const Request& req, Response& res) {
            const auto a = broker().find_agreement(AgreementId{path_param(req, "id")});
            require(a.has_value(), ErrorCode::NotFound, "unknown agreement");
            json entry = *a;
            entry["status"] = std::string(to_string(a->status_at(d.clock().now())));
            reply(res, entry);
        });
        server.Post("/v1/agreements/:id/cancel", [this](const Request& req, Response& res) {
            reply(res, broker().cancel_agreement(AgreementId{path_param(req, "id")}));
        });
        server.Post("/v1/ingest", [this](const Request& req, Response& res) {
            const auto token = req.get_header_value("X-Device-Token");
            require(!token.empty(), ErrorCode::Unauthenticated, "missing X-Device-Token");
            const auto b = body_of(req);
            const auto readings = decode<std::vector<Reading>>(b.is_array() ? b : b.at("readings"));
            reply(res, broker().ingest(readings, token));
        });
        server.Get("/v1/data/:sensor", [this](const Request& req, Response& res) {
            const auto cert = bearer_certificate(req);
            const auto from = param(req, "from") ? parse_rfc3339(*param(req, "from")) : Timestamp{};
            const auto to = param(req, "to") ? parse_rfc3339(*param(req, "to")) : d.clock().now() + Duration(1);
            reply(res, {{"readings", broker().query(cert, SensorId{path_param(req, "sensor")}, from, to)}});
        });
        server.Get("/v1/stream/:sensor", [this](const Request& req, Response& res) {
            auto sub = broker().subscribe(bearer_certificate(req), SensorId{path_param(req, "sensor")});
            res.set_chunked_content_provider("text/event-stream", [sub](std::size_t, httplib::DataSink& sink) {
                if (auto r = sub->next(std::chrono::seconds(1))) {
                    const auto frame = "data: " + json(*r).dump() + "\n\n";
                    return sink.write(frame.data(), frame.size());
                }
                if (sub->finished()) {
                    const std::string frame = "event: end\ndata: {}\n\n";
                    sink.write(frame.data(), frame.size());
                    sink.done();
                    return true;
                }
                return sink.write(": keepalive\n\n", 13);
            });
        });
    }

    void mount_esp() {
        server.Post("/v1/requirements/resolve", [this](const Request& req, Response& res) {
            const auto cert = bearer_certificate(req);
            const auto b = body_of(req);
            Requirement r{b.value("requirement_id", RequirementId{"adhoc"}), cert.subject,
                          decode<SensorConstraints>(b.contains("constraints") ? b.at("constraints") : b)};
            reply(res, d.esp()->resolve(r, cert));
        });
        server.Post("/v1/requirements/acquire", [this](const Request& req, Response& res) {
            const auto cert = bearer_certificate(req);
            const auto b = body_of(req);
            Plan plan;
            std::optional<Cents> budget;
            if (b.contains("plan")) {
                plan = decode<Plan>(b.at("plan"));
            } else {
                Requirement r{RequirementId{"adhoc"}, cert.subject, decode<SensorConstraints>(b.at("constraints"))};
                budget = r.constraints.max_monthly_budget_cents;
                plan = d.esp()->resolve(r, cert);
            }
            if (b.contains("max_monthly_budget_cents")) budget = b.at("max_monthly_budget_cents").get<Cents>();
            const auto outcomes = d.esp()->acquire(plan, decode<std::vector<CompensationOption>>(b.at("options")),
                                                   b.value("term_days", 30), cert, budget);
            reply(res, {{"plan", plan}, {"outcomes", outcomes}});
        });
        server.Post("/v1/interests", [this](const Request& req, Response& res) {
            const auto cert = bearer_certificate(req);
            reply(res, d.esp()->register_interest(cert, decode<SensorConstraints>(body_of(req))), 201);
        });
        server.Post("/v1/interests/:id/deactivate", [this](const Request& req, Response& res) {
            d.esp()->deactivate_interest(InterestId{path_param(req, "id")});
            reply(res, *d.esp()->find_interest(InterestId{path_param(req, "id")}));
        });
        server.Get("/v1/interests/:id/notifications", [this](const Request& req, Response& res) {
            reply(res, {{"notifications", d.esp()->notifications(InterestId{path_param(req, "id")},
                                                                 static_cast<std::uint64_t>(int_param(req, "after", 0)))}});
        });
    }
};

HttpGateway::HttpGateway(Deployment& deployment) : impl_(std::make_unique<Impl>(deployment)) {}
HttpGateway::~HttpGateway() { stop(); }

int HttpGateway::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        require(bound > 0, ErrorCode::Unavailable, "cannot bind " + host);
        return bound;
    }
    require(impl_->server.bind_to_port(host, port), ErrorCode::Unavailable,
            "cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
    return port;
}

void HttpGateway::serve() { impl_->server.listen_after_bind(); }

void HttpGateway::stop() {
    if (impl_) impl_->server.stop();
}

} // namespace sensemarket
