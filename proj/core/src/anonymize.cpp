#include "probekit/anonymize.hpp"

#include <algorithm>
#include <unordered_map>

#include "probekit/errors.hpp"
#include "probekit/hash.hpp"

namespace probekit {

namespace {

constexpr std::size_t kManagementHeaderSize = 24;
constexpr std::array<std::size_t, 3> kAddressOffsets{4, 10, 16};

bool is_probe_request(std::span<const std::uint8_t> frame) {
    return frame.size() >= kManagementHeaderSize && (frame[0] & 0xFC) == 0x40 &&
           (frame[0] & 0x03) == 0;
}

std::vector<std::uint8_t> salted(std::span<const std::uint8_t> salt,
                                 std::span<const std::uint8_t> data) {
    std::vector<std::uint8_t> buf;
    buf.reserve(salt.size() + data.size());
    buf.insert(buf.end(), salt.begin(), salt.end());
    buf.insert(buf.end(), data.begin(), data.end());
    return buf;
}

}  // namespace

void AnonymizationPolicy::validate() const {
    if ((hash_mac || hash_ssid || hash_uuid_e) && salt.empty()) {
        throw ValidationError("anonymization salt must be non-empty when hashing is enabled");
    }
}

Anonymizer::Anonymizer(AnonymizationPolicy policy) : policy_(std::move(policy)) {
    policy_.validate();
    if (!policy_.hash_mac && !policy_.hash_ssid && !policy_.hash_uuid_e) {
        report_.warnings.push_back("all hashing disabled: output will equal input");
    }
}

MacAddress Anonymizer::surrogate_mac(const MacAddress& mac) const {
    const auto digest = sha512(salted(policy_.salt, mac.octets));
    MacAddress surrogate;
    std::copy_n(digest.begin(), 6, surrogate.octets.begin());
    if (policy_.preserve_locality_bits) {
        surrogate.octets[0] =
            static_cast<std::uint8_t>((surrogate.octets[0] & ~0x03) | (mac.octets[0] & 0x03));
    }
    return surrogate;
}

std::vector<std::uint8_t> Anonymizer::surrogate_ssid(std::span<const std::uint8_t> ssid) const {
    return sha512_expand(salted(policy_.salt, ssid), ssid.size());
}

UuidE Anonymizer::surrogate_uuid(const UuidE& uuid) const {
    const auto digest = sha512(salted(policy_.salt, uuid));
    UuidE surrogate{};
    std::copy_n(digest.begin(), 16, surrogate.begin());
    return surrogate;
}

CaptureRecord Anonymizer::transform(const CaptureRecord& record, const CaptureMeta& meta) {
    ++report_.records;
    CaptureRecord out = record;

    std::size_t frame_offset = 0;
    try {
        const auto frame = strip_radiotap(record, meta);
        frame_offset = record.payload.size() - frame.size();
    } catch (const MalformedFrameError&) {
        report_.warnings.push_back("record " + std::to_string(report_.records - 1) +
                                   ": malformed radiotap header, record left unmodified");
        return out;
    }

    std::span<std::uint8_t> frame{out.payload.data() + frame_offset,
                                  out.payload.size() - frame_offset};
    if (!is_probe_request(frame)) {
        return out;  // non-probe frames pass through untouched
    }
    ++report_.probes;

    if (policy_.hash_mac) {
        for (const std::size_t offset : kAddressOffsets) {
            MacAddress mac;
            std::copy_n(frame.begin() + offset, 6, mac.octets.begin());
            if (mac.is_broadcast()) continue;
            const MacAddress surrogate = surrogate_mac(mac);
            std::copy(surrogate.octets.begin(), surrogate.octets.end(), frame.begin() + offset);
            ++report_.macs_rewritten;
        }
    }

    const bool protected_frame = (frame[1] & 0x40) != 0;
    if (protected_frame) {
        return out;  // opaque body, nothing further to rewrite
    }

    // Walk the element list in place.
    std::size_t offset = kManagementHeaderSize;
    while (offset < frame.size()) {
        if (offset + 2 > frame.size()) break;
        const std::uint8_t tag = frame[offset];
        const std::uint8_t length = frame[offset + 1];
        if (offset + 2 + length > frame.size()) {
            report_.warnings.push_back("record " + std::to_string(report_.records - 1) +
                                       ": malformed element tail left unmodified");
            break;
        }
        std::span<std::uint8_t> payload = frame.subspan(offset + 2, length);
        if (tag == ie::kSsid && length > 0 && policy_.hash_ssid) {
            const auto surrogate = surrogate_ssid(payload);
            std::copy(surrogate.begin(), surrogate.end(), payload.begin());
            ++report_.ssids_rewritten;
        } else if (tag == ie::kVendorSpecific && policy_.hash_uuid_e && length >= 4 &&
                   std::equal(ie::kWpsHeader.begin(), ie::kWpsHeader.end(), payload.begin())) {
            const auto attr = find_wps_attribute({payload.data(), payload.size()},
                                                 ie::kWpsAttrUuidE);
            if (attr) {
                const auto [attr_offset, attr_length] = *attr;
                if (attr_length == 16) {
                    UuidE uuid{};
                    std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(attr_offset), 16,
                                uuid.begin());
                    const UuidE surrogate = surrogate_uuid(uuid);
                    std::copy(surrogate.begin(), surrogate.end(),
                              payload.begin() + static_cast<std::ptrdiff_t>(attr_offset));
                    ++report_.uuids_rewritten;
                } else {
                    report_.warnings.push_back("record " + std::to_string(report_.records - 1) +
                                               ": UUID-E attribute with length " +
                                               std::to_string(attr_length) + " left unmodified");
                }
            }
        }
        offset += 2 + length;
    }
    return out;
}

Capture anonymize_capture(const Capture& capture, const AnonymizationPolicy& policy,
                          AnonymizationReport* report) {
    Anonymizer anonymizer(policy);
    Capture out;
    out.meta = capture.meta;
    out.truncated = capture.truncated;
    out.records.reserve(capture.records.size());
    for (const auto& record : capture.records) {
        out.records.push_back(anonymizer.transform(record, capture.meta));
    }
    if (report) *report = anonymizer.report();
    return out;
}

AnonymizationReport anonymize_capture(const std::filesystem::path& input,
                                      const std::filesystem::path& output,
                                      const AnonymizationPolicy& policy) {
    std::error_code ec;
    const auto canonical_in = std::filesystem::weakly_canonical(input, ec);
    const auto canonical_out = std::filesystem::weakly_canonical(output, ec);
    if (canonical_in == canonical_out) {
        throw ValidationError("refusing to overwrite input " + input.string());
    }

    Anonymizer anonymizer(policy);
    PcapReader reader(input);
    auto tmp = output;
    tmp += ".tmp";
    {
        PcapWriter writer(tmp, reader.meta());
        while (auto record = reader.next()) {
            writer.append(anonymizer.transform(*record, reader.meta()));
        }
        writer.close();
    }
    std::error_code rename_ec;
    std::filesystem::rename(tmp, output, rename_ec);
    if (rename_ec) {
        throw IoError("cannot move " + tmp.string() + " to " + output.string() + ": " +
                      rename_ec.message());
    }
    AnonymizationReport report = anonymizer.report();
    if (reader.truncated()) {
        report.warnings.push_back(input.string() + ": truncated trailing record dropped");
    }
    return report;
}

}  // namespace probekit
