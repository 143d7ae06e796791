// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sensemarket/domain.hpp"

namespace sensemarket {

using KeySeed = std::array<std::uint8_t, 32>;

/// Fills a seed from the OS CSPRNG.
KeySeed random_seed();
/// Deterministic seed for simulation runs.
KeySeed seed_from_label(std::string_view label);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

/// Ed25519 issuer for consumer certificates. The signed payload covers
/// issuer, subject, organization, category and expiry.
class CertificateAuthority {
public:
    CertificateAuthority(std::string issuer, const KeySeed& seed);

    [[nodiscard]] const std::string& issuer() const noexcept { return issuer_; }
    [[nodiscard]] const KeySeed& seed() const noexcept { return seed_; }

    [[nodiscard]] Certificate issue(const ConsumerId& subject, std::string organization_name,
                                    std::string consumer_category, Timestamp expires_at) const;

    /// Throws unauthenticated when the issuer, signature or expiry does not check out.
    void verify(const Certificate& certificate, Timestamp now) const;
    [[nodiscard]] bool is_valid(const Certificate& certificate, Timestamp now) const noexcept;

private:
    std::string issuer_;
    KeySeed seed_{};
    std::array<std::uint8_t, 32> public_key_{};
    std::array<std::uint8_t, 64> secret_key_{};
};

/// Bearer form of a certificate for HTTP headers: base64url of its JSON.
std::string encode_certificate_token(const Certificate& certificate);
Certificate decode_certificate_token(std::string_view token);

/// Keyed BLAKE2b digests: pseudonymous owner tokens and device credentials.
class KeyedHasher {
public:
    explicit KeyedHasher(const KeySeed& key) : key_(key) {}
    [[nodiscard]] std::string digest_hex(std::string_view message) const;

private:
    KeySeed key_;
};

} // namespace sensemarket
