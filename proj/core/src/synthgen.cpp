#include "probekit/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "probekit/errors.hpp"
#include "probekit/hash.hpp"
#include "probekit/report.hpp"

namespace probekit {

namespace {

// Raw engine output only: std::uniform_* distributions are not pinned across
// standard libraries, and generated captures must be reproducible anywhere.
std::uint64_t draw_below(std::mt19937_64& eng, std::uint64_t n) {
    return eng() % n;
}

std::uint8_t draw_byte(std::mt19937_64& eng) {
    return static_cast<std::uint8_t>(eng() & 0xFF);
}

MacAddress draw_mac(std::mt19937_64& eng) {
    MacAddress mac;
    for (auto& octet : mac.octets) octet = draw_byte(eng);
    return mac;
}

MacAddress draw_global_mac(std::mt19937_64& eng) {
    MacAddress mac = draw_mac(eng);
    mac.octets[0] &= static_cast<std::uint8_t>(~0x03);  // universal, individual
    return mac;
}

MacAddress draw_local_mac(std::mt19937_64& eng) {
    MacAddress mac = draw_mac(eng);
    mac.octets[0] = static_cast<std::uint8_t>((mac.octets[0] & ~0x01) | 0x02);
    return mac;
}

// Inter-probe pacing when the schedule leaves it open: 20-100 ms.
std::uint64_t draw_gap_us(std::mt19937_64& eng) {
    return 20000 + draw_below(eng, 80001);
}

void validate_device(const DevicePolicy& device) {
    if (device.label.empty()) {
        throw ValidationError("device without a label");
    }
    if (device.bursts.empty()) {
        throw ValidationError(device.label + ": burst schedule must be non-empty");
    }
    for (const auto& burst : device.bursts) {
        if (burst.time < 0) {
            throw ValidationError(device.label + ": burst time must be non-negative");
        }
        if (burst.probe_count < 1) {
            throw ValidationError(device.label + ": burst probe count must be at least 1");
        }
        if (burst.inter_probe_gap && *burst.inter_probe_gap <= 0) {
            throw ValidationError(device.label + ": inter-probe gap must be positive");
        }
    }
    if (device.mac_policy == MacPolicy::PerSsidRandom) {
        if (device.pnl.empty() || device.ssid_behavior != SsidBehavior::DirectedPerPnl) {
            throw ValidationError(device.label +
                                  ": per-SSID randomization needs a directed, non-empty PNL");
        }
    }
    if (device.mac_policy == MacPolicy::PrefixRandom && (device.prefix[0] & 0x02) == 0) {
        throw ValidationError(device.label +
                              ": prefix lacks the locally-administered bit");
    }
    if (device.mac_policy == MacPolicy::GlobalFixed && device.fixed_mac &&
        device.fixed_mac->is_local()) {
        throw ValidationError(device.label + ": global-fixed address must be global");
    }
    for (const auto& element : device.ie_profile) {
        if (element.payload.size() > 255) {
            throw ValidationError(device.label + ": element payload exceeds 255 bytes");
        }
    }
}

struct Emission {
    std::uint64_t time_us = 0;
    std::size_t order = 0;  // global tie-breaker, assigned in generation order
    std::vector<std::uint8_t> frame;
    std::size_t device = 0;
    std::size_t instance = 0;
};

}  // namespace

SynthOutput generate(const std::vector<DevicePolicy>& devices, std::uint64_t seed,
                     std::uint32_t start_epoch) {
    for (const auto& device : devices) validate_device(device);

    // The opaque protected body is shared by every emitter, mirroring how
    // such probes appear in the wild: one identical blob throughout.
    std::mt19937_64 master(seed);
    std::vector<std::uint8_t> protected_body(22);
    for (auto& b : protected_body) b = draw_byte(master);

    std::vector<Emission> emissions;
    GroundTruth truth;
    std::size_t order = 0;

    for (std::size_t d = 0; d < devices.size(); ++d) {
        const DevicePolicy& device = devices[d];
        std::mt19937_64 eng(seed ^ (0x9E3779B97F4A7C15ULL * (d + 1)));
        std::uint16_t seq = static_cast<std::uint16_t>(draw_below(eng, 4096));

        MacAddress fixed_mac{};
        if (device.mac_policy == MacPolicy::GlobalFixed ||
            device.mac_policy == MacPolicy::Protected22B) {
            fixed_mac = device.fixed_mac ? *device.fixed_mac : draw_global_mac(eng);
        }
        std::vector<MacAddress> per_ssid_macs;
        if (device.mac_policy == MacPolicy::PerSsidRandom) {
            per_ssid_macs.reserve(device.pnl.size());
            for (std::size_t i = 0; i < device.pnl.size(); ++i) {
                per_ssid_macs.push_back(draw_local_mac(eng));
            }
        }

        auto emit_run = [&](std::uint64_t& cursor_us, const BurstSpec& burst,
                            const MacAddress& mac,
                            const std::vector<std::uint8_t>* run_ssid) {
            const std::size_t instance_id = truth.instance_device.size();
            truth.instance_device.push_back(device.label);
            for (int k = 0; k < burst.probe_count; ++k) {
                if (k > 0) {
                    cursor_us += burst.inter_probe_gap
                                     ? static_cast<std::uint64_t>(
                                           std::llround(*burst.inter_probe_gap * 1e6))
                                     : draw_gap_us(eng);
                }
                ProbeFrameSpec spec;
                spec.source = mac;
                spec.sequence = seq;
                seq = static_cast<std::uint16_t>((seq + 1) & 0x0FFF);
                if (device.mac_policy == MacPolicy::Protected22B) {
                    spec.protected_frame = true;
                    spec.protected_body = protected_body;
                } else {
                    InformationElement ssid_element;
                    ssid_element.tag_id = ie::kSsid;
                    if (run_ssid) {
                        ssid_element.payload = *run_ssid;
                    } else if (device.ssid_behavior == SsidBehavior::DirectedPerPnl &&
                               !device.pnl.empty()) {
                        ssid_element.payload = device.pnl[static_cast<std::size_t>(k) %
                                                          device.pnl.size()];
                    }
                    spec.elements.push_back(std::move(ssid_element));
                    spec.elements.insert(spec.elements.end(), device.ie_profile.begin(),
                                         device.ie_profile.end());
                }
                Emission emission;
                emission.time_us = cursor_us;
                emission.order = order++;
                emission.frame = build_probe_request(spec);
                emission.device = d;
                emission.instance = instance_id;
                emissions.push_back(std::move(emission));
            }
        };

        for (const BurstSpec& burst : device.bursts) {
            std::uint64_t cursor_us =
                static_cast<std::uint64_t>(std::llround(burst.time * 1e6));
            if (device.mac_policy == MacPolicy::PerSsidRandom) {
                // One same-address run per preferred network, back to back.
                for (std::size_t s = 0; s < device.pnl.size(); ++s) {
                    if (s > 0) {
                        cursor_us += burst.inter_probe_gap
                                         ? static_cast<std::uint64_t>(std::llround(
                                               *burst.inter_probe_gap * 1e6))
                                         : draw_gap_us(eng);
                    }
                    emit_run(cursor_us, burst, per_ssid_macs[s], &device.pnl[s]);
                }
            } else {
                MacAddress mac = fixed_mac;
                if (device.mac_policy == MacPolicy::PerBurstRandom) {
                    mac = draw_local_mac(eng);
                } else if (device.mac_policy == MacPolicy::PrefixRandom) {
                    mac.octets = {device.prefix[0], device.prefix[1], device.prefix[2],
                                  draw_byte(eng), draw_byte(eng), draw_byte(eng)};
                }
                emit_run(cursor_us, burst, mac, nullptr);
            }
        }
    }

    std::stable_sort(emissions.begin(), emissions.end(),
                     [](const Emission& a, const Emission& b) {
                         return a.time_us != b.time_us ? a.time_us < b.time_us
                                                       : a.order < b.order;
                     });

    SynthOutput out;
    out.capture.meta = CaptureMeta{LinkType::Ieee80211, TimestampResolution::Micro,
                                   ByteOrder::Little, 65535};
    out.capture.records.reserve(emissions.size());
    truth.probe_device.reserve(emissions.size());
    truth.probe_instance.reserve(emissions.size());
    for (const Emission& emission : emissions) {
        CaptureRecord record;
        record.ts.sec = start_epoch + static_cast<std::uint32_t>(emission.time_us / 1000000);
        record.ts.nsec = static_cast<std::uint32_t>(emission.time_us % 1000000) * 1000;
        record.original_length = static_cast<std::uint32_t>(emission.frame.size());
        record.payload = emission.frame;
        out.capture.records.push_back(std::move(record));
        truth.probe_device.push_back(devices[emission.device].label);
        truth.probe_instance.push_back(emission.instance);
    }
    truth.expected_instances = truth.instance_device.size();
    truth.expected_devices = devices.size();
    out.truth = std::move(truth);
    return out;
}

Capture replay_schedule(const Capture& capture, double time_scale) {
    if (!(time_scale > 0)) {
        throw ValidationError("time scale must be positive");
    }
    Capture out = capture;
    if (out.records.empty()) return out;

    Timestamp t0 = out.records.front().ts;
    for (const auto& record : out.records) t0 = std::min(t0, record.ts);

    for (auto& record : out.records) {
        const std::int64_t dt_ns =
            (static_cast<std::int64_t>(record.ts.sec) - static_cast<std::int64_t>(t0.sec)) *
                1000000000LL +
            (static_cast<std::int64_t>(record.ts.nsec) - static_cast<std::int64_t>(t0.nsec));
        const std::int64_t scaled_ns =
            std::llround(static_cast<double>(dt_ns) * time_scale);
        const std::int64_t abs_ns =
            static_cast<std::int64_t>(t0.sec) * 1000000000LL + t0.nsec + scaled_ns;
        record.ts.sec = static_cast<std::uint32_t>(abs_ns / 1000000000LL);
        record.ts.nsec = static_cast<std::uint32_t>(abs_ns % 1000000000LL);
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const CaptureRecord& a, const CaptureRecord& b) { return a.ts < b.ts; });
    return out;
}

namespace {

MacPolicy mac_policy_from(const std::string& text) {
    if (text == "global-fixed") return MacPolicy::GlobalFixed;
    if (text == "per-ssid-random") return MacPolicy::PerSsidRandom;
    if (text == "per-burst-random") return MacPolicy::PerBurstRandom;
    if (text == "prefix-random") return MacPolicy::PrefixRandom;
    if (text == "protected-22b") return MacPolicy::Protected22B;
    throw ValidationError("unknown mac_mode \"" + text + "\"");
}

SsidBehavior ssid_behavior_from(const std::string& text) {
    if (text == "wildcard-only") return SsidBehavior::WildcardOnly;
    if (text == "directed-per-pnl") return SsidBehavior::DirectedPerPnl;
    throw ValidationError("unknown ssid_behavior \"" + text + "\"");
}

std::array<std::uint8_t, 3> parse_prefix(const std::string& text) {
    const auto mac = MacAddress::parse(text + ":00:00:00");
    if (!mac) {
        throw ValidationError("bad prefix \"" + text + "\"");
    }
    return {mac->octets[0], mac->octets[1], mac->octets[2]};
}

}  // namespace

Population parse_population(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("population config: ") + e.what());
    }
    try {
        Population population;
        population.start_epoch = doc.value("start_epoch", kDefaultCaptureEpoch);
        for (const auto& jd : doc.at("devices")) {
            DevicePolicy device;
            device.label = jd.at("label").get<std::string>();
            device.mac_policy = mac_policy_from(jd.at("mac_mode").get<std::string>());
            if (jd.contains("mac")) {
                const auto mac = MacAddress::parse(jd.at("mac").get<std::string>());
                if (!mac) {
                    throw ValidationError(device.label + ": bad mac \"" +
                                          jd.at("mac").get<std::string>() + "\"");
                }
                device.fixed_mac = mac;
            }
            if (jd.contains("prefix")) {
                device.prefix = parse_prefix(jd.at("prefix").get<std::string>());
            }
            for (const auto& je : jd.value("ie_profile", nlohmann::json::array())) {
                InformationElement element;
                element.tag_id = je.at("tag").get<std::uint8_t>();
                element.payload = from_hex(je.value("payload_hex", ""));
                device.ie_profile.push_back(std::move(element));
            }
            for (const auto& js : jd.value("pnl", nlohmann::json::array())) {
                const auto text = js.get<std::string>();
                device.pnl.emplace_back(text.begin(), text.end());
            }
            device.ssid_behavior =
                ssid_behavior_from(jd.value("ssid_behavior", std::string("wildcard-only")));
            for (const auto& jb : jd.value("bursts", nlohmann::json::array())) {
                BurstSpec burst;
                burst.time = jb.at("time").get<double>();
                burst.probe_count = jb.value("count", 1);
                if (jb.contains("gap")) burst.inter_probe_gap = jb.at("gap").get<double>();
                device.bursts.push_back(burst);
            }
            if (jd.contains("repeat")) {
                const auto& jr = jd.at("repeat");
                const int count = jr.at("count").get<int>();
                const double period = jr.at("period").get<double>();
                BurstSpec burst;
                burst.time = jr.value("start", 0.0);
                burst.probe_count = jr.value("probes", 1);
                if (jr.contains("gap")) burst.inter_probe_gap = jr.at("gap").get<double>();
                for (int i = 0; i < count; ++i) {
                    device.bursts.push_back(burst);
                    burst.time += period;
                }
            }
            population.devices.push_back(std::move(device));
        }
        return population;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("population config: ") + e.what());
    }
}

Population load_population(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open population config " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_population(buf.str());
}

std::string ground_truth_csv(const GroundTruth& truth) {
    std::string out = "probe_index,device_label\n";
    for (std::size_t i = 0; i < truth.probe_device.size(); ++i) {
        out += std::to_string(i);
        out.push_back(',');
        out += csv_escape(truth.probe_device[i]);
        out.push_back('\n');
    }
    return out;
}

void write_ground_truth_csv(const std::filesystem::path& path, const GroundTruth& truth) {
    write_file_atomic(path, ground_truth_csv(truth));
}

}  // namespace probekit
