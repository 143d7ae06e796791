// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensemarket/time.hpp"

namespace sensemarket {

/// Append-only JSON-lines file. Each append is flushed before returning, so an
/// acknowledged record survives the process being killed.
class JsonLinesLog {
public:
    explicit JsonLinesLog(std::filesystem::path path);

    void append(const nlohmann::json& record);
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

    /// Reads every complete record. A torn final line (no newline, or not
    /// parseable) is ignored; a corrupt line elsewhere throws internal.
    static std::vector<nlohmann::json> read_all(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

struct Notification {
    std::uint64_t seq = 0;
    std::string recipient;
    std::string kind;
    Timestamp at{};
    nlohmann::json payload;
};

/// Per-recipient notification records (the stand-in for e-mail).
class Inbox {
public:
    void post(const std::string& recipient, std::string kind, Timestamp at, nlohmann::json payload);
    [[nodiscard]] std::vector<Notification> list(const std::string& recipient, std::uint64_t after_seq = 0) const;
    /// Long-poll: returns as soon as something newer than `after_seq` exists or the timeout elapses.
    [[nodiscard]] std::vector<Notification> wait(const std::string& recipient, std::uint64_t after_seq,
                                                 std::chrono::milliseconds timeout) const;

private:
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    std::map<std::string, std::vector<Notification>> boxes_;
    std::uint64_t next_seq_ = 1;
};

} // namespace sensemarket
