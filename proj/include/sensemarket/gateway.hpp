// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensemarket/broker.hpp"
#include "sensemarket/esp.hpp"

namespace sensemarket {

enum class DeploymentMode { Service, Simulation };
enum class DeploymentRole { Sp, Esp, All };

std::string_view to_string(DeploymentMode mode) noexcept;
std::string_view to_string(DeploymentRole role) noexcept;

/// Process configuration. Read from key=value lines, then overridden by
/// MKT_<KEY> environment variables.
struct DeploymentConfig {
    PublisherId publisher_id{"easysensing"};
    EspId esp_id{"productiveanalytics"};
    std::string listen_host = "127.0.0.1";
    int listen_port = 8080;
    CommissionRates rates{};
    int cert_ttl_days = 365;
    int offer_ttl_days = 7;
    std::size_t anonymization_depth = 2;
    std::optional<std::filesystem::path> peers_file;
    std::optional<std::filesystem::path> data_dir;
    /// Shared signing and pseudonym keys; defaults to <data_dir>/keys.json.
    std::optional<std::filesystem::path> keys_file;
    std::optional<std::filesystem::path> taxonomy_file;
    std::optional<Cents> credit_floor_cents;
    DeploymentMode mode = DeploymentMode::Service;
    DeploymentRole role = DeploymentRole::All;
    /// Simulated clock origin.
    Timestamp simulation_start = parse_rfc3339("2026-01-01T00:00:00Z");

    /// Throws invalid-argument on any out-of-range field.
    void validate() const;

    /// Applies one key=value setting. Unknown keys throw invalid-argument.
    void set(std::string_view key, std::string_view value);

    static DeploymentConfig parse(std::string_view text);
    static DeploymentConfig load(const std::filesystem::path& file);
    /// `lookup` returns the value of an environment variable, if set.
    void apply_env(const std::function<std::optional<std::string>(const std::string&)>& lookup);
    void apply_process_env();
};

struct PeerPublisher {
    PublisherId publisher_id;
    std::string base_url;
};

/// "publisher_id,base_url" per line; blank lines and '#' comments ignored.
std::vector<PeerPublisher> parse_peers(std::string_view text);

/// Reaches a remote publisher's /v1 API.
class HttpPublisherPort final : public PublisherPort {
public:
    HttpPublisherPort(PublisherId id, std::string base_url);
    [[nodiscard]] PublisherId publisher_id() const override { return id_; }
    std::vector<SensorDescriptor> search(const CatalogQuery& query, const Certificate& requester) override;
    Offer submit_offer(const OfferRequest& request, const Certificate& consumer) override;

private:
    PublisherId id_;
    std::string base_url_;
};

/// The pieces of one running process, composed from its configuration.
class Deployment {
public:
    explicit Deployment(DeploymentConfig config);
    ~Deployment();

    [[nodiscard]] const DeploymentConfig& config() const noexcept { return config_; }
    [[nodiscard]] const Clock& clock() const noexcept { return *clock_; }
    /// Null outside simulation mode.
    [[nodiscard]] SimulatedClock* simulated_clock() noexcept { return simulated_clock_.get(); }
    /// Moves the simulated clock forward and records it under data_dir so a
    /// restart resumes from there. Throws failed-precondition in service mode.
    Timestamp advance_clock(Duration by);
    [[nodiscard]] const PhenomenonTaxonomy& taxonomy() const noexcept { return *taxonomy_; }
    [[nodiscard]] const CertificateAuthority& authority() const noexcept { return *authority_; }
    [[nodiscard]] Ledger& ledger() noexcept { return *ledger_; }
    /// Null when the role excludes it.
    [[nodiscard]] Broker* broker() noexcept { return broker_.get(); }
    [[nodiscard]] ExtendedServiceProvider* esp() noexcept { return esp_.get(); }

    [[nodiscard]] nlohmann::json health() const;
    /// Catalog, agreements, ledger and interests, for restart comparison.
    [[nodiscard]] nlohmann::json snapshot() const;

private:
    DeploymentConfig config_;
    std::shared_ptr<SimulatedClock> simulated_clock_;
    std::shared_ptr<const Clock> clock_;
    std::mutex clock_mutex_;
    std::shared_ptr<const PhenomenonTaxonomy> taxonomy_;
    std::shared_ptr<const CertificateAuthority> authority_;
    std::shared_ptr<Ledger> ledger_;
    std::unique_ptr<Broker> broker_;
    std::unique_ptr<ExtendedServiceProvider> esp_;
};

/// HTTP+JSON front end mounting every /v1 endpoint of a deployment.
class HttpGateway {
public:
    explicit HttpGateway(Deployment& deployment);
    ~HttpGateway();
    HttpGateway(const HttpGateway&) = delete;
    HttpGateway& operator=(const HttpGateway&) = delete;

    /// Binds the listening socket; port 0 picks a free port. Returns the bound
    /// port or throws unavailable.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Blocks.
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace sensemarket
