#include "probekit/session.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <numeric>
#include <unordered_map>

#include "probekit/errors.hpp"

namespace probekit {

void ClusterParams::validate() const {
    if (!(burst_gap > 0)) {
        throw ValidationError("burst gap must be positive");
    }
    if (!(pnl_threshold >= 0.0 && pnl_threshold <= 1.0)) {
        throw ValidationError("PNL threshold must lie in [0, 1]");
    }
    if (recurrence_threshold < 1) {
        throw ValidationError("recurrence threshold must be at least 1");
    }
}

std::vector<ScanInstance> detect_bursts(std::span<const ProbeRequest> probes,
                                        const ClusterParams& params) {
    params.validate();

    std::vector<std::size_t> order(probes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return probes[a].ts < probes[b].ts;
    });

    std::vector<ScanInstance> instances;
    struct OpenBurst {
        std::size_t instance;
        Timestamp last_ts;
    };
    std::unordered_map<MacAddress, OpenBurst> open;

    for (const std::size_t idx : order) {
        const ProbeRequest& probe = probes[idx];
        auto it = open.find(probe.source);
        std::size_t target;
        if (it != open.end() && ts_diff(probe.ts, it->second.last_ts) <= params.burst_gap) {
            target = it->second.instance;
            it->second.last_ts = probe.ts;
        } else {
            target = instances.size();
            ScanInstance instance;
            instance.mac = probe.source;
            instance.start = probe.ts;
            instances.push_back(std::move(instance));
            open[probe.source] = {target, probe.ts};
        }
        ScanInstance& instance = instances[target];
        instance.end = probe.ts;
        ++instance.probe_count;
        instance.probe_indices.push_back(idx);
        instance.fingerprints.insert(fingerprint_probe(probe));
        if (auto ssid = probe.ssid_bytes()) {
            instance.pnl.add(*ssid);
        }
        if (!instance.uuid_e) {
            instance.uuid_e = uuid_e(probe).value;
        }
    }
    return instances;
}

std::string_view to_string(MacMode mode) {
    switch (mode) {
        case MacMode::Global:
            return "global";
        case MacMode::Local:
            return "local";
        case MacMode::PrefixLocal:
            return "prefix-local";
    }
    return "unknown";
}

namespace {

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void merge(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> rank_;
};

struct UuidHash {
    std::size_t operator()(const UuidE& u) const noexcept {
        std::uint64_t v = 0x811C9DC5;
        for (auto b : u) v = (v ^ b) * 0x100000001B3ULL;
        return static_cast<std::size_t>(v);
    }
};

struct DigestHash {
    std::size_t operator()(const std::array<std::uint8_t, 32>& d) const noexcept {
        std::uint64_t v;
        std::memcpy(&v, d.data(), sizeof(v));
        return static_cast<std::size_t>(v);
    }
};

}  // namespace

std::vector<DeviceRecord> cluster_devices(const std::vector<ScanInstance>& instances,
                                          const ClusterParams& params,
                                          const std::vector<PrefixRule>& rules) {
    params.validate();
    const std::size_t n = instances.size();
    DisjointSet sets(n);

    // Rule 1: the same address reappearing is the same device.
    {
        std::unordered_map<MacAddress, std::size_t> first;
        for (std::size_t i = 0; i < n; ++i) {
            auto [it, inserted] = first.try_emplace(instances[i].mac, i);
            if (!inserted) sets.merge(it->second, i);
        }
    }

    // Rule 2: a shared WPS UUID-E links across randomized addresses.
    {
        std::unordered_map<UuidE, std::size_t, UuidHash> first;
        for (std::size_t i = 0; i < n; ++i) {
            if (!instances[i].uuid_e) continue;
            auto [it, inserted] = first.try_emplace(*instances[i].uuid_e, i);
            if (!inserted) sets.merge(it->second, i);
        }
    }

    // Rule 3: equal fingerprint plus similar preferred network lists. Only
    // pairs sharing at least one SSID can clear a positive threshold, so
    // candidates are bucketed by (fingerprint, SSID).
    {
        std::unordered_map<std::array<std::uint8_t, 32>, std::vector<std::size_t>, DigestHash>
            by_fingerprint;
        for (std::size_t i = 0; i < n; ++i) {
            if (instances[i].pnl.empty()) continue;
            for (const auto& fp : instances[i].fingerprints) {
                if (fp.empty() && params.require_nonempty_fingerprint) continue;
                by_fingerprint[fp.digest].push_back(i);
            }
        }
        for (auto& [digest, members] : by_fingerprint) {
            if (members.size() < 2) continue;
            if (params.pnl_threshold <= 0.0) {
                for (std::size_t k = 1; k < members.size(); ++k) {
                    sets.merge(members[0], members[k]);
                }
                continue;
            }
            std::map<std::vector<std::uint8_t>, std::vector<std::size_t>> by_ssid;
            for (const std::size_t i : members) {
                for (const auto& ssid : instances[i].pnl.ssids) {
                    by_ssid[ssid].push_back(i);
                }
            }
            for (auto& [ssid, candidates] : by_ssid) {
                for (std::size_t a = 0; a < candidates.size(); ++a) {
                    for (std::size_t b = a + 1; b < candidates.size(); ++b) {
                        const std::size_t i = candidates[a];
                        const std::size_t j = candidates[b];
                        if (sets.find(i) == sets.find(j)) continue;
                        if (pnl_similarity(instances[i].pnl, instances[j].pnl) >=
                            params.pnl_threshold) {
                            sets.merge(i, j);
                        }
                    }
                }
            }
        }
    }

    // Collect components.
    std::unordered_map<std::size_t, std::size_t> root_to_device;
    std::vector<DeviceRecord> devices;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        auto [it, inserted] = root_to_device.try_emplace(root, devices.size());
        if (inserted) devices.emplace_back();
        devices[it->second].instances.push_back(i);
    }

    auto matches_any_rule = [&](const MacAddress& mac) {
        return std::any_of(rules.begin(), rules.end(),
                           [&](const PrefixRule& r) { return r.matches(mac); });
    };

    for (auto& device : devices) {
        std::sort(device.instances.begin(), device.instances.end(),
                  [&](std::size_t a, std::size_t b) {
                      const auto& ia = instances[a];
                      const auto& ib = instances[b];
                      return std::tie(ia.start, ia.mac.octets, ia.end) <
                             std::tie(ib.start, ib.mac.octets, ib.end);
                  });
        device.appearance_count = device.instances.size();
        device.first_seen = instances[device.instances.front()].start;
        device.last_seen = instances[device.instances.front()].end;
        bool any_prefix = false;
        bool single_mac = true;
        const MacAddress& first_mac = instances[device.instances.front()].mac;
        for (const std::size_t idx : device.instances) {
            const ScanInstance& instance = instances[idx];
            device.last_seen = std::max(device.last_seen, instance.end);
            if (matches_any_rule(instance.mac)) any_prefix = true;
            if (instance.mac != first_mac) single_mac = false;
        }
        if (any_prefix) {
            device.mac_mode = MacMode::PrefixLocal;
        } else if (single_mac && !first_mac.is_local()) {
            device.mac_mode = MacMode::Global;
        } else {
            device.mac_mode = MacMode::Local;
        }
    }

    std::sort(devices.begin(), devices.end(), [&](const DeviceRecord& a, const DeviceRecord& b) {
        const auto& ia = instances[a.instances.front()];
        const auto& ib = instances[b.instances.front()];
        return std::tie(a.first_seen, ia.mac.octets, a.last_seen, a.appearance_count) <
               std::tie(b.first_seen, ib.mac.octets, b.last_seen, b.appearance_count);
    });
    for (std::size_t i = 0; i < devices.size(); ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "dev-%06zu", i);
        devices[i].device_id = buf;
    }
    return devices;
}

RecurrencePartition recurrence_report(const std::vector<DeviceRecord>& devices,
                                      const ClusterParams& params) {
    RecurrencePartition partition;
    for (std::size_t i = 0; i < devices.size(); ++i) {
        if (devices[i].appearance_count >
            static_cast<std::size_t>(params.recurrence_threshold)) {
            partition.recurrent.push_back(i);
        } else {
            partition.transient.push_back(i);
        }
    }
    return partition;
}

SummaryStats summary_stats(std::span<const ProbeRequest> probes,
                           const std::vector<ScanInstance>& instances,
                           const std::vector<DeviceRecord>& devices,
                           const ClusterParams& params, const std::vector<PrefixRule>& rules) {
    SummaryStats stats;

    const MacSplit split = mac_split(probes, rules);
    stats.probes_total = split.total;
    stats.probes_local = split.local;
    stats.probes_global = split.global;
    stats.prefix_probes = split.prefix_counts;

    for (const auto& rule : rules) stats.prefix_instances.emplace_back(rule.name, 0);
    stats.instances_total = instances.size();
    for (const auto& instance : instances) {
        if (instance.mac.is_local()) {
            ++stats.instances_local;
        } else {
            ++stats.instances_global;
        }
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (rules[i].matches(instance.mac)) ++stats.prefix_instances[i].second;
        }
    }

    stats.devices_total = devices.size();
    for (const auto& device : devices) {
        const bool recurrent =
            device.appearance_count > static_cast<std::size_t>(params.recurrence_threshold);
        switch (device.mac_mode) {
            case MacMode::Global:
                ++stats.devices_global;
                if (recurrent) ++stats.recurrent_global;
                break;
            case MacMode::PrefixLocal:
                ++stats.devices_prefix;
                if (recurrent) ++stats.recurrent_prefix;
                break;
            case MacMode::Local: {
                ++stats.devices_local;
                if (recurrent) ++stats.recurrent_local;
                const bool all_local =
                    std::all_of(device.instances.begin(), device.instances.end(),
                                [&](std::size_t idx) { return instances[idx].mac.is_local(); });
                if (all_local) ++stats.devices_fully_randomized;
                break;
            }
        }
        if (device.appearance_count == 1) ++stats.single_occurrence_devices;
    }
    return stats;
}

}  // namespace probekit
