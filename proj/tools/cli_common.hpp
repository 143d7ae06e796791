// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

// Shared plumbing for the command-line tools: a small /v1 client and the
// exit-code convention.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace sensemarket::cli {

// Exit codes: 0 success, 1 usage, 2 API error, 3 transport failure,
// 4 scenario or local failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitApi = 2;
inline constexpr int kExitTransport = 3;
inline constexpr int kExitLocal = 4;

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
    ApiError(int status, std::string code, const std::string& message)
        : std::runtime_error(message), status(status), code(std::move(code)) {}
    int status;
    std::string code;
};

class ApiClient {
public:
    explicit ApiClient(std::string base_url) : base_url_(std::move(base_url)) {}

    void set_certificate(std::string token) { certificate_ = std::move(token); }
    void set_header(std::string name, std::string value) { extra_[std::move(name)] = std::move(value); }

    nlohmann::json get(const std::string& path, const std::map<std::string, std::string>& params = {}) const;
    nlohmann::json post(const std::string& path, const nlohmann::json& body = nlohmann::json::object()) const;

private:
    std::string base_url_;
    std::optional<std::string> certificate_;
    std::map<std::string, std::string> extra_;
};

/// Default server URL: $MKT_URL or http://127.0.0.1:8080.
std::string default_url();

/// Certificate token from an explicit value, a file, or $MKT_CERT.
std::optional<std::string> certificate_token(const std::string& value, const std::string& file);

/// Runs `body`, printing failures to stderr and mapping them to exit codes.
int guarded(const std::function<int()>& body);

std::string money(std::int64_t cents);

} // namespace sensemarket::cli
