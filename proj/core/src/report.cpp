#include "probekit/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include "probekit/errors.hpp"

namespace probekit {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string dump(const ordered_json& j) {
    return j.dump(2) + "\n";
}

std::string offset_suffix(int tz_offset_minutes) {
    if (tz_offset_minutes == 0) return "Z";
    char buf[16];
    const int total = tz_offset_minutes < 0 ? -tz_offset_minutes : tz_offset_minutes;
    std::snprintf(buf, sizeof(buf), "%c%02d:%02d", tz_offset_minutes < 0 ? '-' : '+',
                  total / 60, total % 60);
    return buf;
}

}  // namespace

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string iso8601(std::int64_t epoch_seconds, int tz_offset_minutes) {
    const std::time_t shifted = epoch_seconds + std::int64_t{tz_offset_minutes} * 60;
    std::tm tm{};
    gmtime_r(&shifted, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf + offset_suffix(tz_offset_minutes);
}

std::string iso8601_us(const Timestamp& ts, int tz_offset_minutes) {
    const std::time_t shifted =
        static_cast<std::int64_t>(ts.sec) + std::int64_t{tz_offset_minutes} * 60;
    std::tm tm{};
    gmtime_r(&shifted, &tm);
    char buf[72];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06u", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ts.nsec / 1000);
    return buf + offset_suffix(tz_offset_minutes);
}

std::string format_percent(std::uint64_t count, std::uint64_t total) {
    if (total == 0) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f",
                  100.0 * static_cast<double>(count) / static_cast<double>(total));
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot create " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw IoError("write failed on " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " +
                      ec.message());
    }
}

namespace {

struct InventoryRow {
    const char* name;
    std::uint64_t count;
};

std::vector<InventoryRow> inventory_rows(const IeInventory& inv) {
    return {
        {"supported_rates", inv.supported_rates},
        {"extended_supported_rates", inv.ext_supported_rates},
        {"ht_capabilities", inv.ht_capabilities},
        {"vht_capabilities", inv.vht_capabilities},
        {"extended_capabilities", inv.extended_capabilities},
        {"vendor_specific", inv.vendor_specific},
        {"vendor_specific_1", inv.vendor_specific_buckets[0]},
        {"vendor_specific_2", inv.vendor_specific_buckets[1]},
        {"vendor_specific_3", inv.vendor_specific_buckets[2]},
        {"vendor_specific_4", inv.vendor_specific_buckets[3]},
        {"vendor_specific_5_plus", inv.vendor_specific_buckets[4]},
        {"wps_uuid_e", inv.wps_uuid_e},
        {"wep_protected", inv.wep_protected},
    };
}

}  // namespace

std::string render_inventory(const IeInventory& inv, const ReportOptions& opts) {
    const auto rows = inventory_rows(inv);
    if (opts.json) {
        ordered_json j;
        j["total"] = inv.total;
        j["elements"] = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json e;
            e["element"] = row.name;
            e["count"] = row.count;
            e["percent"] = format_percent(row.count, inv.total);
            j["elements"].push_back(std::move(e));
        }
        j["wep_protected_bit"] = inv.wep_protected_bit;
        j["wep_protected_blob"] = inv.wep_protected_blob;
        return dump(j);
    }
    std::string out = "element,count,percent\n";
    for (const auto& row : rows) {
        out += row.name;
        out += "," + std::to_string(row.count) + "," + format_percent(row.count, inv.total) +
               "\n";
    }
    out += "total," + std::to_string(inv.total) + ",\n";
    return out;
}

std::string render_mac_split(const MacSplit& split, const ReportOptions& opts) {
    if (opts.json) {
        ordered_json j;
        j["total_probes"] = split.total;
        j["global_probes"] = split.global;
        j["local_probes"] = split.local;
        if (split.local_fraction) {
            j["local_fraction"] = *split.local_fraction;
        } else {
            j["local_fraction"] = nullptr;
        }
        ordered_json prefixes = ordered_json::object();
        for (const auto& [name, count] : split.prefix_counts) prefixes[name] = count;
        j["prefix_probes"] = std::move(prefixes);
        return dump(j);
    }
    std::string out = "metric,value\n";
    out += "total_probes," + std::to_string(split.total) + "\n";
    out += "global_probes," + std::to_string(split.global) + "\n";
    out += "local_probes," + std::to_string(split.local) + "\n";
    out += "local_percent," + format_percent(split.local, split.total) + "\n";
    for (const auto& [name, count] : split.prefix_counts) {
        out += "prefix_probes_" + name + "," + std::to_string(count) + "\n";
    }
    return out;
}

namespace {

std::string instance_id(std::size_t index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "ins-%06zu", index);
    return buf;
}

std::vector<std::string> device_of_instances(const std::vector<ScanInstance>& instances,
                                             const std::vector<DeviceRecord>& devices) {
    std::vector<std::string> owner(instances.size());
    for (const auto& device : devices) {
        for (const std::size_t idx : device.instances) owner[idx] = device.device_id;
    }
    return owner;
}

}  // namespace

std::string render_instances(const std::vector<ScanInstance>& instances,
                             const std::vector<DeviceRecord>& devices,
                             const ReportOptions& opts) {
    const auto owner = device_of_instances(instances, devices);
    if (opts.json) {
        ordered_json j = ordered_json::array();
        for (std::size_t i = 0; i < instances.size(); ++i) {
            const auto& instance = instances[i];
            ordered_json e;
            e["instance_id"] = instance_id(i);
            e["device_id"] = owner[i];
            e["mac"] = instance.mac.to_string();
            e["start"] = iso8601_us(instance.start, opts.tz_offset_minutes);
            e["end"] = iso8601_us(instance.end, opts.tz_offset_minutes);
            e["probe_count"] = instance.probe_count;
            j.push_back(std::move(e));
        }
        return dump(j);
    }
    std::string out = "instance_id,device_id,mac,start,end,probe_count\n";
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& instance = instances[i];
        out += instance_id(i) + "," + owner[i] + "," + instance.mac.to_string() + "," +
               iso8601_us(instance.start, opts.tz_offset_minutes) + "," +
               iso8601_us(instance.end, opts.tz_offset_minutes) + "," +
               std::to_string(instance.probe_count) + "\n";
    }
    return out;
}

std::string render_devices(const std::vector<DeviceRecord>& devices, const ReportOptions& opts) {
    if (opts.json) {
        ordered_json j = ordered_json::array();
        for (const auto& device : devices) {
            ordered_json e;
            e["device_id"] = device.device_id;
            e["mac_mode"] = std::string(to_string(device.mac_mode));
            e["appearance_count"] = device.appearance_count;
            e["first_seen"] = iso8601_us(device.first_seen, opts.tz_offset_minutes);
            e["last_seen"] = iso8601_us(device.last_seen, opts.tz_offset_minutes);
            j.push_back(std::move(e));
        }
        return dump(j);
    }
    std::string out = "device_id,mac_mode,appearance_count,first_seen,last_seen\n";
    for (const auto& device : devices) {
        out += device.device_id + "," + std::string(to_string(device.mac_mode)) + "," +
               std::to_string(device.appearance_count) + "," +
               iso8601_us(device.first_seen, opts.tz_offset_minutes) + "," +
               iso8601_us(device.last_seen, opts.tz_offset_minutes) + "\n";
    }
    return out;
}

std::string render_recurrence(const std::vector<DeviceRecord>& devices,
                              const RecurrencePartition& partition, const ReportOptions& opts) {
    std::vector<bool> recurrent(devices.size(), false);
    for (const std::size_t idx : partition.recurrent) recurrent[idx] = true;
    if (opts.json) {
        ordered_json j = ordered_json::array();
        for (std::size_t i = 0; i < devices.size(); ++i) {
            ordered_json e;
            e["device_id"] = devices[i].device_id;
            e["appearance_count"] = devices[i].appearance_count;
            e["class"] = recurrent[i] ? "recurrent" : "transient";
            j.push_back(std::move(e));
        }
        return dump(j);
    }
    std::string out = "device_id,appearance_count,class\n";
    for (std::size_t i = 0; i < devices.size(); ++i) {
        out += devices[i].device_id + "," + std::to_string(devices[i].appearance_count) + "," +
               (recurrent[i] ? "recurrent" : "transient") + "\n";
    }
    return out;
}

std::string render_timeline(const std::vector<DeviceRecord>& devices,
                            const std::vector<ScanInstance>& instances,
                            const ReportOptions& opts) {
    if (opts.json) {
        ordered_json j = ordered_json::array();
        for (const auto& device : devices) {
            for (const std::size_t idx : device.instances) {
                ordered_json e;
                e["device_id"] = device.device_id;
                e["instance_id"] = instance_id(idx);
                e["start"] = iso8601_us(instances[idx].start, opts.tz_offset_minutes);
                e["end"] = iso8601_us(instances[idx].end, opts.tz_offset_minutes);
                j.push_back(std::move(e));
            }
        }
        return dump(j);
    }
    std::string out = "device_id,instance_id,start,end\n";
    for (const auto& device : devices) {
        for (const std::size_t idx : device.instances) {
            out += device.device_id + "," + instance_id(idx) + "," +
                   iso8601_us(instances[idx].start, opts.tz_offset_minutes) + "," +
                   iso8601_us(instances[idx].end, opts.tz_offset_minutes) + "\n";
        }
    }
    return out;
}

namespace {

std::string bin_annotation(const PresenceBin& bin,
                           const std::vector<ScheduleAnnotation>& annotations) {
    std::string out;
    for (const auto& annotation : annotations) {
        if (annotation.start < bin.start + bin.width_seconds && annotation.end > bin.start) {
            if (!out.empty()) out.push_back(';');
            out += annotation.label;
        }
    }
    return out;
}

}  // namespace

std::string render_presence(const std::vector<PresenceBin>& bins,
                            const std::vector<ScheduleAnnotation>& annotations,
                            const ReportOptions& opts) {
    const bool annotated = !annotations.empty();
    if (opts.json) {
        ordered_json j = ordered_json::array();
        for (const auto& bin : bins) {
            ordered_json e;
            e["bin_start"] = iso8601(bin.start, opts.tz_offset_minutes);
            e["probe_count"] = bin.probe_count;
            e["distinct_macs"] = bin.distinct_macs;
            if (bin.distinct_devices) {
                e["distinct_devices"] = *bin.distinct_devices;
            } else {
                e["distinct_devices"] = nullptr;
            }
            if (annotated) e["annotation"] = bin_annotation(bin, annotations);
            j.push_back(std::move(e));
        }
        return dump(j);
    }
    std::string out = "bin_start_iso8601,probe_count,distinct_macs,distinct_devices";
    if (annotated) out += ",annotation";
    out += "\n";
    for (const auto& bin : bins) {
        out += iso8601(bin.start, opts.tz_offset_minutes) + "," +
               std::to_string(bin.probe_count) + "," + std::to_string(bin.distinct_macs) + ",";
        if (bin.distinct_devices) out += std::to_string(*bin.distinct_devices);
        if (annotated) out += "," + csv_escape(bin_annotation(bin, annotations));
        out += "\n";
    }
    return out;
}

const ReferenceCounts& ipin2021_reference() {
    static const ReferenceCounts counts{};
    return counts;
}

std::string render_summary(const SummaryStats& stats, const ReportOptions& opts,
                           bool include_reference) {
    const ReferenceCounts& ref = ipin2021_reference();
    struct Row {
        std::string metric;
        std::uint64_t value;
        std::optional<std::uint64_t> reference;
    };
    std::vector<Row> rows;
    auto add = [&](std::string metric, std::uint64_t value,
                   std::optional<std::uint64_t> reference = std::nullopt) {
        rows.push_back({std::move(metric), value,
                        include_reference ? reference : std::nullopt});
    };
    add("probes_total", stats.probes_total, ref.probes_total);
    add("probes_global", stats.probes_global);
    add("probes_local", stats.probes_local, ref.probes_local);
    for (const auto& [name, count] : stats.prefix_probes) {
        add("prefix_probes_" + name, count, ref.prefix_probes);
    }
    add("instances_total", stats.instances_total, ref.instances_total);
    add("instances_global", stats.instances_global, ref.instances_global);
    add("instances_local", stats.instances_local);
    for (const auto& [name, count] : stats.prefix_instances) {
        add("prefix_instances_" + name, count, ref.prefix_instances);
    }
    add("devices_total", stats.devices_total);
    add("devices_global", stats.devices_global, ref.devices_global);
    add("devices_local", stats.devices_local, ref.devices_local);
    add("devices_prefix", stats.devices_prefix, ref.devices_prefix);
    add("devices_fully_randomized", stats.devices_fully_randomized,
        ref.devices_fully_randomized);
    add("recurrent_global", stats.recurrent_global);
    add("recurrent_local", stats.recurrent_local, ref.recurrent_local);
    add("recurrent_prefix", stats.recurrent_prefix, ref.recurrent_prefix);
    add("single_occurrence_devices", stats.single_occurrence_devices);

    if (opts.json) {
        ordered_json j = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json e;
            e["metric"] = row.metric;
            e["value"] = row.value;
            if (row.reference) {
                e["reference"] = *row.reference;
            } else {
                e["reference"] = nullptr;
            }
            j.push_back(std::move(e));
        }
        return dump(j);
    }
    std::string out = "metric,value,reference\n";
    for (const auto& row : rows) {
        out += row.metric + "," + std::to_string(row.value) + ",";
        if (row.reference) out += std::to_string(*row.reference);
        out += "\n";
    }
    return out;
}

}  // namespace probekit
