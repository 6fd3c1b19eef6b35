#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "probekit/session.hpp"

namespace probekit {

// Fixed-width occupancy bin. Starts are aligned to the clock (hh:00, hh:15,
// ...), not to the first probe.
struct PresenceBin {
    std::int64_t start = 0;  // epoch seconds
    std::int64_t width_seconds = 0;
    std::uint64_t probe_count = 0;
    std::uint64_t distinct_macs = 0;
    std::optional<std::uint64_t> distinct_devices;

    bool operator==(const PresenceBin&) const = default;
};

// Bins cover the capture span contiguously; bins with no probes are emitted
// with zero counts.
std::vector<PresenceBin> bin_presence(std::span<const ProbeRequest> probes, int bin_minutes);

// Same, with device occupancy: a device counts for every bin one of its
// scan instances overlaps.
std::vector<PresenceBin> bin_presence(std::span<const ProbeRequest> probes, int bin_minutes,
                                      const std::vector<ScanInstance>& instances,
                                      const std::vector<DeviceRecord>& devices);

// Per-instance (start, end) intervals of one device, sorted by start. The
// row data behind per-device recurrence plots.
std::vector<std::pair<Timestamp, Timestamp>> device_timeline(
    const DeviceRecord& device, const std::vector<ScanInstance>& instances);

// Session schedule entry used to label presence bins.
struct ScheduleAnnotation {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::string label;

    bool operator==(const ScheduleAnnotation&) const = default;
};

// One "start end label" entry per line; times are epoch seconds or ISO 8601
// (YYYY-MM-DDThh:mm[:ss], read as UTC). '#' starts a comment.
std::vector<ScheduleAnnotation> parse_annotations(std::string_view text);
std::vector<ScheduleAnnotation> load_annotations(const std::filesystem::path& path);

}  // namespace probekit
