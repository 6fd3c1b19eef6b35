#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace probekit {

// 6-byte 802.11 address. Octet 0 carries the two functional bits:
// bit 0 (0x01) individual/group, bit 1 (0x02) universal/locally administered.
// A set locally-administered bit is what marks a randomized source address.
struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    bool is_local() const { return (octets[0] & 0x02) != 0; }
    bool is_group() const { return (octets[0] & 0x01) != 0; }
    bool is_broadcast() const;

    // Uppercase colon-separated hex, e.g. "DA:A1:19:00:11:22".
    std::string to_string() const;
    static std::optional<MacAddress> parse(std::string_view text);

    auto operator<=>(const MacAddress&) const = default;
};

inline constexpr std::array<std::uint8_t, 6> kBroadcastOctets{0xFF, 0xFF, 0xFF,
                                                              0xFF, 0xFF, 0xFF};

MacAddress broadcast_mac();

enum class Locality { Global, Local };
enum class Scope { Individual, Group };

struct MacClass {
    Locality locality = Locality::Global;
    Scope scope = Scope::Individual;
    std::optional<std::string> known_prefix;
};

// Named 3-byte prefix of a vendor randomization scheme, e.g. the fixed
// prefix legacy Android used while randomizing only the address suffix.
// The first octet must have the locally-administered bit set.
struct PrefixRule {
    std::string name;
    std::array<std::uint8_t, 3> prefix{};

    bool matches(const MacAddress& mac) const {
        return mac.octets[0] == prefix[0] && mac.octets[1] == prefix[1] &&
               mac.octets[2] == prefix[2];
    }
};

MacClass classify_mac(const MacAddress& mac, const std::vector<PrefixRule>& rules);

// Rules applied when no rule file is given: both spellings of the legacy
// Android prefix seen in the wild (DA:A1:19 and DA:1A:19).
const std::vector<PrefixRule>& default_prefix_rules();

// Plain-text rule file: one "name prefix" pair per line, '#' starts a comment.
std::vector<PrefixRule> parse_prefix_rules(std::string_view text);
std::vector<PrefixRule> load_prefix_rules(const std::filesystem::path& path);

// Locality split of a set of observed source addresses, with per-rule
// prefix hit counts. fraction is empty when no addresses were seen, which
// keeps "no data" distinct from "0% randomized".
struct MacSplit {
    std::uint64_t total = 0;
    std::uint64_t local = 0;
    std::uint64_t global = 0;
    std::optional<double> local_fraction;
    std::vector<std::pair<std::string, std::uint64_t>> prefix_counts;
};

MacSplit mac_split(std::span<const MacAddress> sources, const std::vector<PrefixRule>& rules);

}  // namespace probekit

template <>
struct std::hash<probekit::MacAddress> {
    std::size_t operator()(const probekit::MacAddress& mac) const noexcept {
        std::uint64_t v = 0;
        for (auto b : mac.octets) v = v << 8 | b;
        // splitmix64 finalizer
        v += 0x9E3779B97F4A7C15ULL;
        v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ULL;
        v = (v ^ (v >> 27)) * 0x94D049BB133111EBULL;
        return static_cast<std::size_t>(v ^ (v >> 31));
    }
};
