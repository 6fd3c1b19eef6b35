#include "probekit/presence.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "probekit/errors.hpp"

namespace probekit {

namespace {

std::vector<PresenceBin> make_bins(std::span<const ProbeRequest> probes, int bin_minutes) {
    if (bin_minutes <= 0) {
        throw ValidationError("bin width must be positive");
    }
    std::vector<PresenceBin> bins;
    if (probes.empty()) return bins;

    const std::int64_t width = static_cast<std::int64_t>(bin_minutes) * 60;
    std::int64_t min_sec = probes.front().ts.sec;
    std::int64_t max_sec = probes.front().ts.sec;
    for (const auto& probe : probes) {
        min_sec = std::min<std::int64_t>(min_sec, probe.ts.sec);
        max_sec = std::max<std::int64_t>(max_sec, probe.ts.sec);
    }
    const std::int64_t first = min_sec / width * width;
    const std::int64_t last = max_sec / width * width;
    bins.resize(static_cast<std::size_t>((last - first) / width) + 1);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        bins[i].start = first + static_cast<std::int64_t>(i) * width;
        bins[i].width_seconds = width;
    }
    return bins;
}

}  // namespace

std::vector<PresenceBin> bin_presence(std::span<const ProbeRequest> probes, int bin_minutes) {
    auto bins = make_bins(probes, bin_minutes);
    if (bins.empty()) return bins;
    const std::int64_t width = bins.front().width_seconds;
    const std::int64_t first = bins.front().start;

    std::vector<std::unordered_set<MacAddress>> macs(bins.size());
    for (const auto& probe : probes) {
        const auto idx =
            static_cast<std::size_t>((static_cast<std::int64_t>(probe.ts.sec) - first) / width);
        ++bins[idx].probe_count;
        macs[idx].insert(probe.source);
    }
    for (std::size_t i = 0; i < bins.size(); ++i) {
        bins[i].distinct_macs = macs[i].size();
    }
    return bins;
}

std::vector<PresenceBin> bin_presence(std::span<const ProbeRequest> probes, int bin_minutes,
                                      const std::vector<ScanInstance>& instances,
                                      const std::vector<DeviceRecord>& devices) {
    auto bins = bin_presence(probes, bin_minutes);
    if (bins.empty()) return bins;
    const std::int64_t width = bins.front().width_seconds;
    const std::int64_t first = bins.front().start;

    std::vector<std::unordered_set<std::size_t>> present(bins.size());
    for (std::size_t d = 0; d < devices.size(); ++d) {
        for (const std::size_t idx : devices[d].instances) {
            const ScanInstance& instance = instances[idx];
            std::int64_t lo = (static_cast<std::int64_t>(instance.start.sec) - first) / width;
            std::int64_t hi = (static_cast<std::int64_t>(instance.end.sec) - first) / width;
            lo = std::clamp<std::int64_t>(lo, 0, static_cast<std::int64_t>(bins.size()) - 1);
            hi = std::clamp<std::int64_t>(hi, 0, static_cast<std::int64_t>(bins.size()) - 1);
            for (std::int64_t b = lo; b <= hi; ++b) {
                present[static_cast<std::size_t>(b)].insert(d);
            }
        }
    }
    for (std::size_t i = 0; i < bins.size(); ++i) {
        bins[i].distinct_devices = present[i].size();
    }
    return bins;
}

std::vector<std::pair<Timestamp, Timestamp>> device_timeline(
    const DeviceRecord& device, const std::vector<ScanInstance>& instances) {
    std::vector<std::pair<Timestamp, Timestamp>> timeline;
    timeline.reserve(device.instances.size());
    for (const std::size_t idx : device.instances) {
        timeline.emplace_back(instances[idx].start, instances[idx].end);
    }
    std::sort(timeline.begin(), timeline.end());
    return timeline;
}

namespace {

std::optional<std::int64_t> parse_time_field(const std::string& field) {
    // Plain epoch seconds first.
    if (!field.empty() &&
        field.find_first_not_of("0123456789") == std::string::npos) {
        return std::stoll(field);
    }
    int year, month, day, hour, minute, second = 0;
    const int matched = std::sscanf(field.c_str(), "%d-%d-%dT%d:%d:%d", &year, &month, &day,
                                    &hour, &minute, &second);
    if (matched < 5) return std::nullopt;
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    return static_cast<std::int64_t>(timegm(&tm));
}

}  // namespace

std::vector<ScheduleAnnotation> parse_annotations(std::string_view text) {
    std::vector<ScheduleAnnotation> annotations;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string start_text, end_text;
        if (!(fields >> start_text)) continue;
        std::string label;
        if (!(fields >> end_text) || !std::getline(fields, label)) {
            throw ValidationError("annotation line " + std::to_string(lineno) +
                                  ": expected \"start end label\"");
        }
        const auto start = parse_time_field(start_text);
        const auto end = parse_time_field(end_text);
        if (!start || !end) {
            throw ValidationError("annotation line " + std::to_string(lineno) +
                                  ": unparseable time field");
        }
        const auto first_char = label.find_first_not_of(" \t");
        label = first_char == std::string::npos ? "" : label.substr(first_char);
        if (label.empty()) {
            throw ValidationError("annotation line " + std::to_string(lineno) + ": empty label");
        }
        annotations.push_back({*start, *end, label});
    }
    return annotations;
}

std::vector<ScheduleAnnotation> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open annotation file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_annotations(buf.str());
}

}  // namespace probekit
