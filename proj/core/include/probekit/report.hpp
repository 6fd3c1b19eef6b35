#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "probekit/dot11.hpp"
#include "probekit/presence.hpp"
#include "probekit/session.hpp"

namespace probekit {

struct ReportOptions {
    bool json = false;
    int tz_offset_minutes = 0;  // display offset; stored times stay UTC
};

std::string csv_escape(std::string_view field);

// 2021-11-29T08:22:00Z, or with an explicit offset when one is applied.
std::string iso8601(std::int64_t epoch_seconds, int tz_offset_minutes = 0);
// Same with microsecond fraction, for instance-level times.
std::string iso8601_us(const Timestamp& ts, int tz_offset_minutes = 0);

// Rounded to two decimals, the resolution the occurrence table reports.
std::string format_percent(std::uint64_t count, std::uint64_t total);

void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string render_inventory(const IeInventory& inv, const ReportOptions& opts);
std::string render_mac_split(const MacSplit& split, const ReportOptions& opts);
std::string render_instances(const std::vector<ScanInstance>& instances,
                             const std::vector<DeviceRecord>& devices,
                             const ReportOptions& opts);
std::string render_devices(const std::vector<DeviceRecord>& devices, const ReportOptions& opts);
std::string render_recurrence(const std::vector<DeviceRecord>& devices,
                              const RecurrencePartition& partition, const ReportOptions& opts);
std::string render_timeline(const std::vector<DeviceRecord>& devices,
                            const std::vector<ScanInstance>& instances,
                            const ReportOptions& opts);
std::string render_presence(const std::vector<PresenceBin>& bins,
                            const std::vector<ScheduleAnnotation>& annotations,
                            const ReportOptions& opts);

// Counts published for the IPIN 2021 conference capture, printed beside
// computed values so parameter-sensitive results can be eyeballed against
// the original analysis of that dataset.
struct ReferenceCounts {
    std::uint64_t probes_total = 390810;
    std::uint64_t probes_local = 266051;
    std::uint64_t prefix_probes = 22254;
    std::uint64_t instances_total = 204038;
    std::uint64_t instances_global = 58393;
    std::uint64_t prefix_instances = 7823;
    std::uint64_t devices_global = 229;
    std::uint64_t devices_local = 4274;
    std::uint64_t devices_prefix = 523;
    std::uint64_t devices_fully_randomized = 3752;
    std::uint64_t recurrent_local = 296;
    std::uint64_t recurrent_prefix = 50;
};

const ReferenceCounts& ipin2021_reference();

// With include_reference, dataset-comparable rows carry the published value
// in a third column.
std::string render_summary(const SummaryStats& stats, const ReportOptions& opts,
                           bool include_reference);

}  // namespace probekit
