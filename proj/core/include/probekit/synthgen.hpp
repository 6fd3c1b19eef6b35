#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "probekit/dot11.hpp"
#include "probekit/pcap.hpp"

namespace probekit {

// Address behavior of one simulated device.
enum class MacPolicy {
    GlobalFixed,     // one real, globally assigned address for the whole run
    PerSsidRandom,   // one stable random address per preferred network
    PerBurstRandom,  // fresh random address for every scan burst
    PrefixRandom,    // fixed 3-byte prefix, random 3-byte suffix per burst
    Protected22B,    // fixed address, opaque 22-byte protected body
};

enum class SsidBehavior { WildcardOnly, DirectedPerPnl };

struct BurstSpec {
    double time = 0.0;   // seconds from capture start
    int probe_count = 1; // probes per burst (per network for per-SSID devices)
    std::optional<double> inter_probe_gap;  // seconds; absent draws 20-100 ms
};

struct DevicePolicy {
    std::string label;
    MacPolicy mac_policy = MacPolicy::GlobalFixed;
    std::optional<MacAddress> fixed_mac;  // GlobalFixed / Protected22B override
    std::array<std::uint8_t, 3> prefix{0xDA, 0xA1, 0x19};
    std::vector<InformationElement> ie_profile;
    std::vector<std::vector<std::uint8_t>> pnl;
    SsidBehavior ssid_behavior = SsidBehavior::WildcardOnly;
    std::vector<BurstSpec> bursts;
};

// Labels that make the generated capture a ground-truth oracle: which device
// emitted each record and which scan instance it belongs to.
struct GroundTruth {
    std::vector<std::string> probe_device;      // per record, in capture order
    std::vector<std::size_t> probe_instance;    // per record, in capture order
    std::vector<std::string> instance_device;   // instance id -> device label
    std::size_t expected_instances = 0;
    std::size_t expected_devices = 0;
};

struct SynthOutput {
    Capture capture;
    GroundTruth truth;
};

inline constexpr std::uint32_t kDefaultCaptureEpoch = 1638144000;  // 2021-11-29 00:00 UTC

// Deterministic: one (devices, seed) pair always yields the same bytes.
SynthOutput generate(const std::vector<DevicePolicy>& devices, std::uint64_t seed,
                     std::uint32_t start_epoch = kDefaultCaptureEpoch);

// Scales every timestamp about the capture start; frames stay untouched.
Capture replay_schedule(const Capture& capture, double time_scale);

struct Population {
    std::vector<DevicePolicy> devices;
    std::uint32_t start_epoch = kDefaultCaptureEpoch;
};

Population parse_population(std::string_view json_text);
Population load_population(const std::filesystem::path& path);

std::string ground_truth_csv(const GroundTruth& truth);
void write_ground_truth_csv(const std::filesystem::path& path, const GroundTruth& truth);

}  // namespace probekit
