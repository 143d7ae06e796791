// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sensemarket {

enum class ErrorCode {
    InvalidArgument,
    NotFound,
    Conflict,
    PermissionDenied,
    Unauthenticated,
    FailedPrecondition,
    Unavailable,
    ScenarioFailure,
    Internal,
};

/// Wire name, e.g. "invalid-argument".
std::string_view to_string(ErrorCode code) noexcept;
ErrorCode error_code_from_string(std::string_view name) noexcept;
int http_status(ErrorCode code) noexcept;

/// Every broker operation reports contract violations with this type.
class MarketError : public std::runtime_error {
public:
    MarketError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw MarketError(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace sensemarket
