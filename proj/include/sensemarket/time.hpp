// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <mutex>
#include <string>
#include <string_view>

namespace sensemarket {

using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Duration>;

constexpr Duration days(std::int64_t n) { return std::chrono::duration_cast<Duration>(std::chrono::hours(24 * n)); }
constexpr Duration hours(std::int64_t n) { return std::chrono::duration_cast<Duration>(std::chrono::hours(n)); }
constexpr Duration seconds(std::int64_t n) { return std::chrono::duration_cast<Duration>(std::chrono::seconds(n)); }

/// Billing month used for fee cycles and payback buckets.
inline constexpr Duration kBillingMonth = days(30);

/// RFC 3339 UTC, e.g. "2026-01-01T00:00:00Z"; milliseconds are printed only when non-zero.
std::string to_rfc3339(Timestamp ts);

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)".
/// Throws MarketError(invalid-argument) on malformed input.
Timestamp parse_rfc3339(std::string_view text);

std::int64_t to_millis(Timestamp ts) noexcept;
Timestamp from_millis(std::int64_t ms) noexcept;

class Clock {
public:
    virtual ~Clock() = default;
    [[nodiscard]] virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    [[nodiscard]] Timestamp now() const override;
};

/// Logical clock for simulation mode. Only moves forward.
class SimulatedClock final : public Clock {
public:
    explicit SimulatedClock(Timestamp start) : now_(start) {}

    [[nodiscard]] Timestamp now() const override;
    void advance(Duration by);
    /// Moving backwards throws failed-precondition; setting the same instant is a no-op.
    void set(Timestamp to);

private:
    mutable std::mutex mutex_;
    Timestamp now_;
};

} // namespace sensemarket
