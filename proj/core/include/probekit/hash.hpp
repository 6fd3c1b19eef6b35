#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace probekit {

std::array<std::uint8_t, 64> sha512(std::span<const std::uint8_t> data);
std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

// Derives n pseudo-random bytes from seed material by chaining
// SHA512(seed || counter) blocks. Used where a surrogate must match the
// length of the field it replaces.
std::vector<std::uint8_t> sha512_expand(std::span<const std::uint8_t> seed, std::size_t n);

std::string to_hex(std::span<const std::uint8_t> data, bool uppercase = false);
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace probekit
