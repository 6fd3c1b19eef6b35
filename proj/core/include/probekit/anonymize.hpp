#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "probekit/dot11.hpp"
#include "probekit/fingerprint.hpp"
#include "probekit/pcap.hpp"

namespace probekit {

// Field hashing policy. Surrogates are keyed on a per-run salt that is never
// persisted, so identifiers stay consistent within one output and unlinkable
// across outputs.
struct AnonymizationPolicy {
    std::vector<std::uint8_t> salt;
    bool hash_mac = true;
    bool hash_ssid = true;
    bool hash_uuid_e = true;
    // Keep octet 0's two functional bits, so locality classification still
    // works on the anonymized capture.
    bool preserve_locality_bits = true;

    void validate() const;
};

struct AnonymizationReport {
    std::uint64_t records = 0;
    std::uint64_t probes = 0;
    std::uint64_t macs_rewritten = 0;
    std::uint64_t ssids_rewritten = 0;
    std::uint64_t uuids_rewritten = 0;
    std::vector<std::string> warnings;
};

class Anonymizer {
public:
    explicit Anonymizer(AnonymizationPolicy policy);

    // Rewrites identifying fields in place; every other byte (timestamps,
    // radiotap prefix, remaining element content) is carried unchanged.
    CaptureRecord transform(const CaptureRecord& record, const CaptureMeta& meta);

    const AnonymizationReport& report() const { return report_; }

    MacAddress surrogate_mac(const MacAddress& mac) const;
    std::vector<std::uint8_t> surrogate_ssid(std::span<const std::uint8_t> ssid) const;
    UuidE surrogate_uuid(const UuidE& uuid) const;

private:
    AnonymizationPolicy policy_;
    AnonymizationReport report_;
};

// In-memory capture transform.
Capture anonymize_capture(const Capture& capture, const AnonymizationPolicy& policy,
                          AnonymizationReport* report = nullptr);

// File-to-file transform. Refuses to write over its own input.
AnonymizationReport anonymize_capture(const std::filesystem::path& input,
                                      const std::filesystem::path& output,
                                      const AnonymizationPolicy& policy);

}  // namespace probekit
