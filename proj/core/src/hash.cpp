#include "probekit/hash.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

#include "probekit/errors.hpp"

namespace probekit {

namespace {

void digest(const EVP_MD* md, std::span<const std::uint8_t> data, std::uint8_t* out,
            unsigned expected_len) {
    unsigned len = 0;
    if (EVP_Digest(data.data(), data.size(), out, &len, md, nullptr) != 1 || len != expected_len) {
        throw std::runtime_error("digest computation failed");
    }
}

}  // namespace

std::array<std::uint8_t, 64> sha512(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 64> out{};
    digest(EVP_sha512(), data, out.data(), 64);
    return out;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 32> out{};
    digest(EVP_sha256(), data, out.data(), 32);
    return out;
}

std::vector<std::uint8_t> sha512_expand(std::span<const std::uint8_t> seed, std::size_t n) {
    std::vector<std::uint8_t> out;
    out.reserve(n);
    std::vector<std::uint8_t> block(seed.begin(), seed.end());
    block.push_back(0);
    for (std::uint8_t counter = 0; out.size() < n; ++counter) {
        block.back() = counter;
        const auto h = sha512(block);
        const std::size_t take = std::min<std::size_t>(64, n - out.size());
        out.insert(out.end(), h.begin(), h.begin() + take);
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> data, bool uppercase) {
    static const char lower[] = "0123456789abcdef";
    static const char upper[] = "0123456789ABCDEF";
    const char* alphabet = uppercase ? upper : lower;
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(alphabet[b >> 4]);
        out.push_back(alphabet[b & 0x0F]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) {
        throw ValidationError("hex string has odd length");
    }
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]);
        const int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw ValidationError("invalid hex digit in \"" + std::string(hex) + "\"");
        }
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

}  // namespace probekit
