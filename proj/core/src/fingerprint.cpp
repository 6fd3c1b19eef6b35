#include "probekit/fingerprint.hpp"

#include <algorithm>

#include "probekit/hash.hpp"

namespace probekit {

namespace {

bool is_fingerprint_tag(std::uint8_t tag) {
    switch (tag) {
        case ie::kSupportedRates:
        case ie::kExtSupportedRates:
        case ie::kHtCapabilities:
        case ie::kVhtCapabilities:
        case ie::kExtendedCapabilities:
        case ie::kVendorSpecific:
            return true;
        default:
            return false;
    }
}

// UUID-E is a per-device identifier in its own right; it is stripped from
// the fingerprint material and used separately as a linking key.
std::vector<std::uint8_t> without_uuid_e(const InformationElement& element) {
    std::vector<std::uint8_t> payload = element.payload;
    while (true) {
        const auto attr = find_wps_attribute(payload, ie::kWpsAttrUuidE);
        if (!attr) break;
        const auto [offset, length] = *attr;
        payload.erase(payload.begin() + static_cast<std::ptrdiff_t>(offset - 4),
                      payload.begin() + static_cast<std::ptrdiff_t>(offset + length));
    }
    return payload;
}

}  // namespace

std::string Fingerprint::hex() const {
    return to_hex(digest);
}

Fingerprint fingerprint_probe(const ProbeRequest& probe) {
    std::vector<std::uint8_t> serial;
    Fingerprint fp;
    for (const auto& element : probe.elements) {
        if (!is_fingerprint_tag(element.tag_id)) continue;
        const std::vector<std::uint8_t>* payload = &element.payload;
        std::vector<std::uint8_t> scrubbed;
        if (is_wps_ie(element)) {
            scrubbed = without_uuid_e(element);
            payload = &scrubbed;
        }
        serial.push_back(element.tag_id);
        serial.push_back(static_cast<std::uint8_t>(payload->size()));
        serial.insert(serial.end(), payload->begin(), payload->end());
        fp.component_tags.push_back(element.tag_id);
    }
    fp.digest = sha256(serial);
    return fp;
}

double pnl_similarity(const PnlObservation& a, const PnlObservation& b) {
    if (a.ssids.empty() && b.ssids.empty()) return 0.0;
    std::size_t common = 0;
    const auto& small = a.ssids.size() <= b.ssids.size() ? a : b;
    const auto& large = a.ssids.size() <= b.ssids.size() ? b : a;
    for (const auto& ssid : small.ssids) {
        if (large.ssids.count(ssid) > 0) ++common;
    }
    const std::size_t unioned = a.ssids.size() + b.ssids.size() - common;
    return static_cast<double>(common) / static_cast<double>(unioned);
}

UuidEResult uuid_e(const ProbeRequest& probe) {
    UuidEResult result;
    for (const auto& element : probe.elements) {
        if (!is_wps_ie(element)) continue;
        const auto attr = find_wps_attribute(element.payload, ie::kWpsAttrUuidE);
        if (!attr) continue;
        const auto [offset, length] = *attr;
        if (length != 16) {
            result.malformed_attribute = true;
            continue;
        }
        UuidE value{};
        std::copy_n(element.payload.begin() + static_cast<std::ptrdiff_t>(offset), 16,
                    value.begin());
        result.value = value;
        return result;
    }
    return result;
}

}  // namespace probekit
