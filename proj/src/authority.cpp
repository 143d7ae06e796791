// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#include "sensemarket/authority.hpp"

#include <sodium.h>

#include "sensemarket/codec.hpp"
#include "sensemarket/error.hpp"

namespace sensemarket {
namespace {

void ensure_sodium() {
    static const bool ready = sodium_init() >= 0;
    if (!ready) fail(ErrorCode::Internal, "libsodium failed to initialize");
}

std::string signing_payload(const std::string& issuer, const ConsumerId& subject, const std::string& organization,
                            const std::string& category, Timestamp expires_at) {
    std::string payload = "sensemarket-cert-v1\n";
    for (const auto* part : {&issuer, &subject.str(), &organization, &category}) {
        payload += std::to_string(part->size());
        payload += ':';
        payload += *part;
        payload += '\n';
    }
    payload += std::to_string(to_millis(expires_at));
    return payload;
}

} // namespace

KeySeed random_seed() {
    ensure_sodium();
    KeySeed seed{};
    randombytes_buf(seed.data(), seed.size());
    return seed;
}

KeySeed seed_from_label(std::string_view label) {
    ensure_sodium();
    KeySeed seed{};
    crypto_generichash(seed.data(), seed.size(), reinterpret_cast<const unsigned char*>(label.data()), label.size(),
                       nullptr, 0);
    return seed;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    require(hex.size() % 2 == 0, ErrorCode::InvalidArgument, "odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        require(hi >= 0 && lo >= 0, ErrorCode::InvalidArgument, "bad hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

CertificateAuthority::CertificateAuthority(std::string issuer, const KeySeed& seed)
    : issuer_(std::move(issuer)), seed_(seed) {
    ensure_sodium();
    crypto_sign_seed_keypair(public_key_.data(), secret_key_.data(), seed_.data());
}

Certificate CertificateAuthority::issue(const ConsumerId& subject, std::string organization_name,
                                        std::string consumer_category, Timestamp expires_at) const {
    Certificate cert;
    cert.issuer = issuer_;
    cert.subject = subject;
    cert.organization_name = std::move(organization_name);
    cert.consumer_category = std::move(consumer_category);
    cert.expires_at = expires_at;
    const auto payload =
        signing_payload(cert.issuer, cert.subject, cert.organization_name, cert.consumer_category, cert.expires_at);
    cert.signature.resize(crypto_sign_BYTES);
    crypto_sign_detached(cert.signature.data(), nullptr, reinterpret_cast<const unsigned char*>(payload.data()),
                         payload.size(), secret_key_.data());
    return cert;
}

void CertificateAuthority::verify(const Certificate& certificate, Timestamp now) const {
    require(certificate.issuer == issuer_, ErrorCode::Unauthenticated,
            "certificate issued by unknown authority '" + certificate.issuer + "'");
    const auto payload = signing_payload(certificate.issuer, certificate.subject, certificate.organization_name,
                                         certificate.consumer_category, certificate.expires_at);
    const bool signature_ok =
        certificate.signature.size() == crypto_sign_BYTES &&
        crypto_sign_verify_detached(certificate.signature.data(), reinterpret_cast<const unsigned char*>(payload.data()),
                                    payload.size(), public_key_.data()) == 0;
    require(signature_ok, ErrorCode::Unauthenticated, "certificate signature does not verify");
    require(now < certificate.expires_at, ErrorCode::Unauthenticated,
            "certificate expired at " + to_rfc3339(certificate.expires_at));
}

bool CertificateAuthority::is_valid(const Certificate& certificate, Timestamp now) const noexcept {
    try {
        verify(certificate, now);
        return true;
    } catch (...) {
        return false;
    }
}

std::string encode_certificate_token(const Certificate& certificate) {
    ensure_sodium();
    const std::string text = json(certificate).dump();
    std::string out(sodium_base64_encoded_len(text.size(), sodium_base64_VARIANT_URLSAFE_NO_PADDING), '\0');
    sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(text.data()), text.size(),
                      sodium_base64_VARIANT_URLSAFE_NO_PADDING);
    out.resize(std::char_traits<char>::length(out.c_str()));
    return out;
}

Certificate decode_certificate_token(std::string_view token) {
    ensure_sodium();
    std::string bin(token.size(), '\0');
    std::size_t bin_len = 0;
    if (sodium_base642bin(reinterpret_cast<unsigned char*>(bin.data()), bin.size(), token.data(), token.size(),
                          nullptr, &bin_len, nullptr, sodium_base64_VARIANT_URLSAFE_NO_PADDING) != 0)
        fail(ErrorCode::Unauthenticated, "certificate token is not base64url");
    bin.resize(bin_len);
    try {
        return json::parse(bin).get<Certificate>();
    } catch (const std::exception&) {
        fail(ErrorCode::Unauthenticated, "certificate token is malformed");
    }
}

std::string KeyedHasher::digest_hex(std::string_view message) const {
    ensure_sodium();
    std::array<std::uint8_t, 16> out{};
    crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(message.data()), message.size(),
                       key_.data(), key_.size());
    return to_hex(out);
}

} // namespace sensemarket
