#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "probekit/dot11.hpp"

namespace probekit {

// Digest of the stable element subset of a probe. Independent of source
// address, SSID, sequence number and timestamp, so one device keeps one
// fingerprint across randomized addresses.
struct Fingerprint {
    std::array<std::uint8_t, 32> digest{};
    std::vector<std::uint8_t> component_tags;  // tag ids folded in, on-air order

    bool empty() const { return component_tags.empty(); }
    std::string hex() const;  // lowercase

    bool operator==(const Fingerprint& other) const { return digest == other.digest; }
    std::strong_ordering operator<=>(const Fingerprint& other) const {
        return digest <=> other.digest;
    }
};

Fingerprint fingerprint_probe(const ProbeRequest& probe);

// SSIDs advertised by one device or scan instance, as raw octets. The empty
// wildcard SSID is never a member.
struct PnlObservation {
    std::set<std::vector<std::uint8_t>> ssids;

    void add(const std::vector<std::uint8_t>& ssid) {
        if (!ssid.empty()) ssids.insert(ssid);
    }
    bool empty() const { return ssids.empty(); }

    bool operator==(const PnlObservation&) const = default;
};

// Jaccard index over the two SSID sets. Two empty lists score 0, not 1:
// devices that advertise nothing share no evidence.
double pnl_similarity(const PnlObservation& a, const PnlObservation& b);

using UuidE = std::array<std::uint8_t, 16>;

struct UuidEResult {
    std::optional<UuidE> value;
    bool malformed_attribute = false;  // attribute present with a length other than 16
};

UuidEResult uuid_e(const ProbeRequest& probe);

}  // namespace probekit
