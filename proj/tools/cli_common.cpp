// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli_common.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "sensemarket/error.hpp"

namespace sensemarket::cli {
namespace {

nlohmann::json handle(const httplib::Result& result, const std::string& what) {
    if (!result) throw TransportError(what + ": " + httplib::to_string(result.error()));
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(result->body);
    } catch (const std::exception&) {
        if (result->status >= 400) throw ApiError(result->status, "unknown", result->body);
        throw TransportError(what + ": response is not JSON");
    }
    if (result->status >= 400) {
        const auto& err = body.contains("error") ? body["error"] : nlohmann::json::object();
        throw ApiError(result->status, err.value("code", std::string{"unknown"}),
                       err.value("message", std::string{"HTTP "} + std::to_string(result->status)));
    }
    return body;
}

} // namespace

nlohmann::json ApiClient::get(const std::string& path, const std::map<std::string, std::string>& params) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(3);
    client.set_read_timeout(60);
    httplib::Headers headers(extra_.begin(), extra_.end());
    if (certificate_) headers.emplace("Authorization", "Bearer " + *certificate_);
    httplib::Params p(params.begin(), params.end());
    return handle(client.Get(path, p, headers), "GET " + path);
}

nlohmann::json ApiClient::post(const std::string& path, const nlohmann::json& body) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(3);
    client.set_read_timeout(60);
    httplib::Headers headers(extra_.begin(), extra_.end());
    if (certificate_) headers.emplace("Authorization", "Bearer " + *certificate_);
    return handle(client.Post(path, headers, body.dump(), "application/json"), "POST " + path);
}

std::string default_url() {
    const char* env = std::getenv("MKT_URL");
    return env ? env : "http://127.0.0.1:8080";
}

std::optional<std::string> certificate_token(const std::string& value, const std::string& file) {
    if (!value.empty()) return value;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot read certificate file " + file);
        std::string token;
        in >> token;
        return token;
    }
    if (const char* env = std::getenv("MKT_CERT")) return std::string(env);
    return std::nullopt;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ApiError& e) {
        std::cerr << "error: " << e.code << " (HTTP " << e.status << "): " << e.what() << '\n';
        return kExitApi;
    } catch (const TransportError& e) {
        std::cerr << "transport failure: " << e.what() << '\n';
        return kExitTransport;
    } catch (const MarketError& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitLocal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitLocal;
    }
}

std::string money(std::int64_t cents) {
    std::ostringstream out;
    if (cents < 0) {
        out << '-';
        cents = -cents;
    }
    out << '$' << cents / 100 << '.' << (cents % 100 < 10 ? "0" : "") << cents % 100;
    return out.str();
}

} // namespace sensemarket::cli
