#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "probekit/fingerprint.hpp"
#include "probekit/mac.hpp"

namespace probekit {

struct ClusterParams {
    double burst_gap = 10.0;  // seconds between probes that still share a burst
    double pnl_threshold = 0.5;
    int recurrence_threshold = 10;  // strictly more appearances means recurrent
    bool require_nonempty_fingerprint = true;

    void validate() const;
};

// A burst of probes sharing one source address within the gap threshold.
struct ScanInstance {
    MacAddress mac;
    Timestamp start;
    Timestamp end;
    std::size_t probe_count = 0;
    std::set<Fingerprint> fingerprints;
    PnlObservation pnl;
    std::optional<UuidE> uuid_e;
    std::vector<std::size_t> probe_indices;  // positions in the input probe vector
};

// Partitions a probe stream into scan instances. Input need not be sorted;
// probes are processed in timestamp order. Bursts are tracked per address,
// so interleaved devices do not split each other's bursts.
std::vector<ScanInstance> detect_bursts(std::span<const ProbeRequest> probes,
                                        const ClusterParams& params);

enum class MacMode { Global, Local, PrefixLocal };

std::string_view to_string(MacMode mode);

struct DeviceRecord {
    std::string device_id;
    std::vector<std::size_t> instances;  // indices into the instance vector
    MacMode mac_mode = MacMode::Global;
    std::size_t appearance_count = 0;
    Timestamp first_seen;
    Timestamp last_seen;
};

// Merges instances into devices by transitive closure of the pairwise link
// relation: same address, same UUID-E, or same fingerprint with sufficiently
// similar preferred network lists. Output order and device ids are
// canonical, independent of input order.
std::vector<DeviceRecord> cluster_devices(const std::vector<ScanInstance>& instances,
                                          const ClusterParams& params,
                                          const std::vector<PrefixRule>& rules);

struct RecurrencePartition {
    std::vector<std::size_t> recurrent;  // device indices with count > threshold
    std::vector<std::size_t> transient;
};

RecurrencePartition recurrence_report(const std::vector<DeviceRecord>& devices,
                                      const ClusterParams& params);

struct SummaryStats {
    std::uint64_t probes_total = 0;
    std::uint64_t probes_global = 0;
    std::uint64_t probes_local = 0;
    std::vector<std::pair<std::string, std::uint64_t>> prefix_probes;

    std::uint64_t instances_total = 0;
    std::uint64_t instances_global = 0;
    std::uint64_t instances_local = 0;
    std::vector<std::pair<std::string, std::uint64_t>> prefix_instances;

    std::uint64_t devices_total = 0;
    std::uint64_t devices_global = 0;
    std::uint64_t devices_local = 0;
    std::uint64_t devices_prefix = 0;
    // Local-mode devices whose every observed address is locally assigned:
    // nothing but the two functional bits is predictable (46 of 48 random).
    std::uint64_t devices_fully_randomized = 0;

    std::uint64_t recurrent_global = 0;
    std::uint64_t recurrent_local = 0;
    std::uint64_t recurrent_prefix = 0;
    std::uint64_t single_occurrence_devices = 0;
};

SummaryStats summary_stats(std::span<const ProbeRequest> probes,
                           const std::vector<ScanInstance>& instances,
                           const std::vector<DeviceRecord>& devices,
                           const ClusterParams& params, const std::vector<PrefixRule>& rules);

}  // namespace probekit
