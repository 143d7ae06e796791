// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/error.hpp"

#include <array>
#include <utility>

namespace sensemarket {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 9> kNames{{
    {ErrorCode::InvalidArgument, "invalid-argument"},
    {ErrorCode::NotFound, "not-found"},
    {ErrorCode::Conflict, "conflict"},
    {ErrorCode::PermissionDenied, "permission-denied"},
    {ErrorCode::Unauthenticated, "unauthenticated"},
    {ErrorCode::FailedPrecondition, "failed-precondition"},
    {ErrorCode::Unavailable, "unavailable"},
    {ErrorCode::ScenarioFailure, "scenario-failure"},
    {ErrorCode::Internal, "internal"},
}};

} // namespace

std::string_view to_string(ErrorCode code) noexcept {
    for (const auto& [c, name] : kNames)
        if (c == code) return name;
    return "internal";
}

ErrorCode error_code_from_string(std::string_view name) noexcept {
    for (const auto& [c, n] : kNames)
        if (n == name) return c;
    return ErrorCode::Internal;
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::Unauthenticated: return 401;
    case ErrorCode::PermissionDenied: return 403;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict: return 409;
    case ErrorCode::FailedPrecondition: return 412;
    case ErrorCode::ScenarioFailure: return 422;
    case ErrorCode::Unavailable: return 503;
    case ErrorCode::Internal: return 500;
    }
    return 500;
}

} // namespace sensemarket
