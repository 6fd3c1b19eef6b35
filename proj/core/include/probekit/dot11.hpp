#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "probekit/mac.hpp"
#include "probekit/pcap.hpp"

namespace probekit {

namespace ie {
inline constexpr std::uint8_t kSsid = 0;
inline constexpr std::uint8_t kSupportedRates = 1;
inline constexpr std::uint8_t kHtCapabilities = 45;
inline constexpr std::uint8_t kExtSupportedRates = 50;
inline constexpr std::uint8_t kExtendedCapabilities = 127;
inline constexpr std::uint8_t kVhtCapabilities = 191;
inline constexpr std::uint8_t kVendorSpecific = 221;

// WPS vendor extension: OUI 00:50:F2, OUI type 0x04.
inline constexpr std::array<std::uint8_t, 4> kWpsHeader{0x00, 0x50, 0xF2, 0x04};
inline constexpr std::uint16_t kWpsAttrUuidE = 0x1047;
}  // namespace ie

struct InformationElement {
    std::uint8_t tag_id = 0;
    std::vector<std::uint8_t> payload;  // at most 255 bytes on the wire

    auto operator<=>(const InformationElement&) const = default;
};

// One parsed probe request. Element order is on-air order; an element whose
// declared length overruns the frame sets malformed_tail and ends element
// parsing with the earlier elements kept.
struct ProbeRequest {
    Timestamp ts;
    MacAddress source;
    std::uint16_t sequence_number = 0;  // 0..4095
    std::vector<InformationElement> elements;
    bool protected_frame = false;
    bool malformed_tail = false;
    std::uint32_t body_length = 0;  // bytes following the 24-byte header

    // First SSID element with a non-empty payload; empty tag 0 is the
    // wildcard and reads as "no SSID".
    std::optional<std::vector<std::uint8_t>> ssid_bytes() const;
    // Printable rendering with non-ASCII octets escaped as \xNN.
    std::string ssid_display() const;
};

// Decodes a management frame. Returns nullopt for anything that is not a
// probe request; throws MalformedFrameError when the frame cannot hold the
// 24-byte management header.
std::optional<ProbeRequest> parse_probe_request(std::span<const std::uint8_t> frame,
                                                Timestamp ts);

bool is_wps_ie(const InformationElement& element);

// Locates one WPS attribute inside a vendor IE payload. Returns the value's
// (offset, length) within the payload.
std::optional<std::pair<std::size_t, std::size_t>> find_wps_attribute(
    std::span<const std::uint8_t> payload, std::uint16_t attribute_id);

// True when the Protected Frame bit is set or the body is a 22-byte blob
// that does not decode as an element list.
bool detect_encrypted_probe(const ProbeRequest& probe);

struct IeCategories {
    bool supported_rates = false;
    bool ext_supported_rates = false;
    bool ht_capabilities = false;
    bool vht_capabilities = false;
    bool extended_capabilities = false;
    int vendor_specific_count = 0;
    bool wps_uuid_e = false;
    bool wep_protected = false;
};

IeCategories classify_ies(const ProbeRequest& probe);

// Per-probe occurrence counters over a capture. Counters add up across
// shards (plain sums), so partial inventories can be merged.
struct IeInventory {
    std::uint64_t total = 0;
    std::uint64_t supported_rates = 0;
    std::uint64_t ext_supported_rates = 0;
    std::uint64_t ht_capabilities = 0;
    std::uint64_t vht_capabilities = 0;
    std::uint64_t extended_capabilities = 0;
    std::uint64_t vendor_specific = 0;
    std::array<std::uint64_t, 5> vendor_specific_buckets{};  // 1, 2, 3, 4, 5+
    std::uint64_t wps_uuid_e = 0;
    std::uint64_t wep_protected = 0;
    // Trigger breakdown kept for debugging: protected-bit frames vs
    // undecodable 22-byte bodies.
    std::uint64_t wep_protected_bit = 0;
    std::uint64_t wep_protected_blob = 0;

    void add(const ProbeRequest& probe);
    IeInventory& operator+=(const IeInventory& other);

    bool operator==(const IeInventory&) const = default;
};

IeInventory inventory(std::span<const ProbeRequest> probes);

inline MacSplit mac_split(std::span<const ProbeRequest> probes,
                          const std::vector<PrefixRule>& rules) {
    std::vector<MacAddress> sources;
    sources.reserve(probes.size());
    for (const auto& p : probes) sources.push_back(p.source);
    return mac_split(sources, rules);
}

// Frame construction, shared by the generator and by tests.
struct ProbeFrameSpec {
    MacAddress source;
    MacAddress destination = broadcast_mac();
    MacAddress bssid = broadcast_mac();
    std::uint16_t sequence = 0;
    std::vector<InformationElement> elements;
    bool protected_frame = false;
    std::vector<std::uint8_t> protected_body;
};

std::vector<std::uint8_t> build_probe_request(const ProbeFrameSpec& spec);
std::vector<std::uint8_t> serialize_elements(std::span<const InformationElement> elements);

}  // namespace probekit
