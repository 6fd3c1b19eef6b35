#include "probekit/dot11.hpp"

#include <algorithm>
#include <cstdio>

#include "probekit/errors.hpp"

namespace probekit {

namespace {

constexpr std::size_t kManagementHeaderSize = 24;
constexpr std::size_t kAddr1Offset = 4;
constexpr std::size_t kAddr2Offset = 10;
constexpr std::size_t kAddr3Offset = 16;
constexpr std::size_t kSeqCtrlOffset = 22;

constexpr std::uint8_t kTypeManagement = 0;
constexpr std::uint8_t kSubtypeProbeRequest = 4;
constexpr std::uint8_t kProtectedFlag = 0x40;  // frame control byte 1

MacAddress mac_at(std::span<const std::uint8_t> frame, std::size_t offset) {
    MacAddress mac;
    std::copy_n(frame.begin() + offset, 6, mac.octets.begin());
    return mac;
}

// Walks a tag/length/value list. Returns false when a declared length
// overruns the buffer (elements parsed so far are kept).
bool parse_elements(std::span<const std::uint8_t> body, std::vector<InformationElement>& out) {
    std::size_t offset = 0;
    while (offset < body.size()) {
        if (offset + 2 > body.size()) {
            return false;  // dangling tag byte
        }
        const std::uint8_t tag = body[offset];
        const std::uint8_t length = body[offset + 1];
        if (offset + 2 + length > body.size()) {
            return false;
        }
        InformationElement element;
        element.tag_id = tag;
        element.payload.assign(body.begin() + offset + 2, body.begin() + offset + 2 + length);
        out.push_back(std::move(element));
        offset += 2 + length;
    }
    return true;
}

}  // namespace

std::optional<std::vector<std::uint8_t>> ProbeRequest::ssid_bytes() const {
    for (const auto& element : elements) {
        if (element.tag_id == ie::kSsid) {
            if (element.payload.empty()) return std::nullopt;  // wildcard
            return element.payload;
        }
    }
    return std::nullopt;
}

std::string ProbeRequest::ssid_display() const {
    const auto raw = ssid_bytes();
    if (!raw) return "";
    std::string out;
    out.reserve(raw->size());
    for (std::uint8_t b : *raw) {
        if (b >= 0x20 && b < 0x7F) {
            out.push_back(static_cast<char>(b));
        } else {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\x%02X", b);
            out += buf;
        }
    }
    return out;
}

std::optional<ProbeRequest> parse_probe_request(std::span<const std::uint8_t> frame,
                                                Timestamp ts) {
    if (frame.size() < kManagementHeaderSize) {
        throw MalformedFrameError("frame of " + std::to_string(frame.size()) +
                                  " bytes cannot hold a management header");
    }
    const std::uint8_t fc0 = frame[0];
    const std::uint8_t version = fc0 & 0x03;
    const std::uint8_t type = (fc0 >> 2) & 0x03;
    const std::uint8_t subtype = (fc0 >> 4) & 0x0F;
    if (version != 0 || type != kTypeManagement || subtype != kSubtypeProbeRequest) {
        return std::nullopt;
    }

    ProbeRequest probe;
    probe.ts = ts;
    probe.source = mac_at(frame, kAddr2Offset);
    const std::uint16_t seq_ctrl = static_cast<std::uint16_t>(frame[kSeqCtrlOffset]) |
                                   static_cast<std::uint16_t>(frame[kSeqCtrlOffset + 1]) << 8;
    probe.sequence_number = seq_ctrl >> 4;
    probe.protected_frame = (frame[1] & kProtectedFlag) != 0;

    const auto body = frame.subspan(kManagementHeaderSize);
    probe.body_length = static_cast<std::uint32_t>(body.size());
    if (!probe.protected_frame) {
        probe.malformed_tail = !parse_elements(body, probe.elements);
    }
    return probe;
}

bool is_wps_ie(const InformationElement& element) {
    return element.tag_id == ie::kVendorSpecific && element.payload.size() >= 4 &&
           std::equal(ie::kWpsHeader.begin(), ie::kWpsHeader.end(), element.payload.begin());
}

std::optional<std::pair<std::size_t, std::size_t>> find_wps_attribute(
    std::span<const std::uint8_t> payload, std::uint16_t attribute_id) {
    // Attributes follow the 4-byte OUI+type header: id and length big-endian.
    std::size_t offset = 4;
    while (offset + 4 <= payload.size()) {
        const std::uint16_t id = static_cast<std::uint16_t>(payload[offset]) << 8 |
                                 static_cast<std::uint16_t>(payload[offset + 1]);
        const std::uint16_t length = static_cast<std::uint16_t>(payload[offset + 2]) << 8 |
                                     static_cast<std::uint16_t>(payload[offset + 3]);
        if (offset + 4 + length > payload.size()) {
            return std::nullopt;
        }
        if (id == attribute_id) {
            return std::make_pair(offset + 4, static_cast<std::size_t>(length));
        }
        offset += 4 + length;
    }
    return std::nullopt;
}

bool detect_encrypted_probe(const ProbeRequest& probe) {
    if (probe.protected_frame) return true;
    return probe.body_length == 22 && probe.malformed_tail;
}

IeCategories classify_ies(const ProbeRequest& probe) {
    IeCategories cats;
    for (const auto& element : probe.elements) {
        switch (element.tag_id) {
            case ie::kSupportedRates:
                cats.supported_rates = true;
                break;
            case ie::kExtSupportedRates:
                cats.ext_supported_rates = true;
                break;
            case ie::kHtCapabilities:
                cats.ht_capabilities = true;
                break;
            case ie::kVhtCapabilities:
                cats.vht_capabilities = true;
                break;
            case ie::kExtendedCapabilities:
                cats.extended_capabilities = true;
                break;
            case ie::kVendorSpecific:
                ++cats.vendor_specific_count;
                if (is_wps_ie(element) &&
                    find_wps_attribute(element.payload, ie::kWpsAttrUuidE)) {
                    cats.wps_uuid_e = true;
                }
                break;
            default:
                break;  // retained in the probe, not inventoried
        }
    }
    cats.wep_protected = detect_encrypted_probe(probe);
    return cats;
}

void IeInventory::add(const ProbeRequest& probe) {
    const IeCategories cats = classify_ies(probe);
    ++total;
    if (cats.supported_rates) ++supported_rates;
    if (cats.ext_supported_rates) ++ext_supported_rates;
    if (cats.ht_capabilities) ++ht_capabilities;
    if (cats.vht_capabilities) ++vht_capabilities;
    if (cats.extended_capabilities) ++extended_capabilities;
    if (cats.vendor_specific_count > 0) {
        ++vendor_specific;
        const int bucket = std::min(cats.vendor_specific_count, 5) - 1;
        ++vendor_specific_buckets[static_cast<std::size_t>(bucket)];
    }
    if (cats.wps_uuid_e) ++wps_uuid_e;
    if (cats.wep_protected) ++wep_protected;
    if (probe.protected_frame) ++wep_protected_bit;
    if (probe.body_length == 22 && probe.malformed_tail) ++wep_protected_blob;
}

IeInventory& IeInventory::operator+=(const IeInventory& other) {
    total += other.total;
    supported_rates += other.supported_rates;
    ext_supported_rates += other.ext_supported_rates;
    ht_capabilities += other.ht_capabilities;
    vht_capabilities += other.vht_capabilities;
    extended_capabilities += other.extended_capabilities;
    vendor_specific += other.vendor_specific;
    for (std::size_t i = 0; i < vendor_specific_buckets.size(); ++i) {
        vendor_specific_buckets[i] += other.vendor_specific_buckets[i];
    }
    wps_uuid_e += other.wps_uuid_e;
    wep_protected += other.wep_protected;
    wep_protected_bit += other.wep_protected_bit;
    wep_protected_blob += other.wep_protected_blob;
    return *this;
}

IeInventory inventory(std::span<const ProbeRequest> probes) {
    IeInventory inv;
    for (const auto& probe : probes) {
        inv.add(probe);
    }
    return inv;
}

std::vector<std::uint8_t> serialize_elements(std::span<const InformationElement> elements) {
    std::vector<std::uint8_t> out;
    for (const auto& element : elements) {
        if (element.payload.size() > 255) {
            throw ValidationError("element payload of " + std::to_string(element.payload.size()) +
                                  " bytes does not fit a one-byte length");
        }
        out.push_back(element.tag_id);
        out.push_back(static_cast<std::uint8_t>(element.payload.size()));
        out.insert(out.end(), element.payload.begin(), element.payload.end());
    }
    return out;
}

std::vector<std::uint8_t> build_probe_request(const ProbeFrameSpec& spec) {
    std::vector<std::uint8_t> frame;
    frame.reserve(kManagementHeaderSize + 64);
    frame.push_back(kSubtypeProbeRequest << 4);  // version 0, type 0
    frame.push_back(spec.protected_frame ? kProtectedFlag : 0x00);
    frame.push_back(0);  // duration
    frame.push_back(0);
    frame.insert(frame.end(), spec.destination.octets.begin(), spec.destination.octets.end());
    frame.insert(frame.end(), spec.source.octets.begin(), spec.source.octets.end());
    frame.insert(frame.end(), spec.bssid.octets.begin(), spec.bssid.octets.end());
    const std::uint16_t seq_ctrl = static_cast<std::uint16_t>((spec.sequence & 0x0FFF) << 4);
    frame.push_back(static_cast<std::uint8_t>(seq_ctrl & 0xFF));
    frame.push_back(static_cast<std::uint8_t>(seq_ctrl >> 8));
    if (spec.protected_frame) {
        frame.insert(frame.end(), spec.protected_body.begin(), spec.protected_body.end());
    } else {
        const auto body = serialize_elements(spec.elements);
        frame.insert(frame.end(), body.begin(), body.end());
    }
    return frame;
}

}  // namespace probekit
