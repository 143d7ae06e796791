// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/time.hpp"

#include <charconv>
#include <cstdio>

#include "sensemarket/error.hpp"

namespace sensemarket {
namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
    if (pos + count > text.size()) fail(ErrorCode::InvalidArgument, "truncated timestamp: " + std::string(text));
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + count, value);
    if (ec != std::errc{} || ptr != text.data() + pos + count)
        fail(ErrorCode::InvalidArgument, "bad timestamp: " + std::string(text));
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c) fail(ErrorCode::InvalidArgument, "bad timestamp: " + std::string(text));
}

} // namespace

std::string to_rfc3339(Timestamp ts) {
    using namespace std::chrono;
    const auto day = floor<std::chrono::days>(ts);
    const year_month_day ymd{day};
    const hh_mm_ss<Duration> tod{ts - day};
    char buf[40];
    const auto ms = tod.subseconds().count();
    if (ms == 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                      static_cast<long>(tod.seconds().count()));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ld.%03ldZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                      static_cast<long>(tod.seconds().count()), static_cast<long>(ms));
    }
    return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    const int y = parse_digits(text, 0, 4);
    expect_char(text, 4, '-');
    const int mo = parse_digits(text, 5, 2);
    expect_char(text, 7, '-');
    const int d = parse_digits(text, 8, 2);
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) fail(ErrorCode::InvalidArgument, "bad date: " + std::string(text));
    Timestamp result = time_point_cast<Duration>(sys_days{ymd});
    if (text.size() == 10) return result;

    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ')
        fail(ErrorCode::InvalidArgument, "bad timestamp: " + std::string(text));
    const int hh = parse_digits(text, 11, 2);
    expect_char(text, 13, ':');
    const int mm = parse_digits(text, 14, 2);
    expect_char(text, 16, ':');
    const int ss = parse_digits(text, 17, 2);
    if (hh > 23 || mm > 59 || ss > 60) fail(ErrorCode::InvalidArgument, "bad time of day: " + std::string(text));
    result += std::chrono::hours(hh) + std::chrono::minutes(mm) + std::chrono::seconds(ss);

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t begin = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == begin) fail(ErrorCode::InvalidArgument, "bad fraction: " + std::string(text));
        int millis = 0;
        for (std::size_t i = 0; i < 3; ++i) millis = millis * 10 + (begin + i < pos ? text[begin + i] - '0' : 0);
        result += milliseconds(millis);
    }
    if (pos >= text.size()) fail(ErrorCode::InvalidArgument, "timestamp lacks zone: " + std::string(text));
    if (text[pos] == 'Z' || text[pos] == 'z') {
        if (pos + 1 != text.size()) fail(ErrorCode::InvalidArgument, "bad timestamp: " + std::string(text));
        return result;
    }
    if (text[pos] != '+' && text[pos] != '-') fail(ErrorCode::InvalidArgument, "bad zone: " + std::string(text));
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = parse_digits(text, pos + 1, 2);
    expect_char(text, pos + 3, ':');
    const int om = parse_digits(text, pos + 4, 2);
    if (pos + 6 != text.size()) fail(ErrorCode::InvalidArgument, "bad zone: " + std::string(text));
    return result - sign * (std::chrono::hours(oh) + std::chrono::minutes(om));
}

std::int64_t to_millis(Timestamp ts) noexcept { return ts.time_since_epoch().count(); }

Timestamp from_millis(std::int64_t ms) noexcept { return Timestamp{Duration{ms}}; }

Timestamp SystemClock::now() const {
    return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now());
}

Timestamp SimulatedClock::now() const {
    std::lock_guard lock(mutex_);
    return now_;
}

void SimulatedClock::advance(Duration by) {
    if (by < Duration::zero()) fail(ErrorCode::FailedPrecondition, "simulated clock cannot move backwards");
    std::lock_guard lock(mutex_);
    now_ += by;
}

void SimulatedClock::set(Timestamp to) {
    std::lock_guard lock(mutex_);
    if (to < now_) fail(ErrorCode::FailedPrecondition, "simulated clock cannot move backwards");
    now_ = to;
}

} // namespace sensemarket
