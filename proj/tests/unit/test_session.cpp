#include <doctest.h>

#include <algorithm>
#include <random>

#include "probekit/errors.hpp"
#include "probekit/session.hpp"
#include "probekit/synthgen.hpp"
#include "support/frames.hpp"
#include "support/oracle.hpp"

using namespace probekit;
using testsupport::Bytes;
using testsupport::TaggedElement;

namespace {

ProbeRequest probe(double t, const std::string& mac,
                   const std::vector<TaggedElement>& elements = {{0, {}}}) {
    return testsupport::probe_at(t, mac, elements);
}

std::vector<TaggedElement> profile(std::uint8_t flavor,
                                   const std::vector<std::string>& ssids = {},
                                   std::size_t ssid_index = 0) {
    std::vector<TaggedElement> elements;
    if (!ssids.empty()) {
        elements.push_back({0, testsupport::ssid_bytes(ssids[ssid_index % ssids.size()])});
    } else {
        elements.push_back({0, {}});
    }
    elements.push_back({1, {0x82, 0x84, flavor}});
    elements.push_back({45, {flavor, 0x01}});
    return elements;
}

// Every SSID of the list in one burst: directed probes cycling the PNL.
std::vector<ProbeRequest> burst(double start, const std::string& mac, std::uint8_t flavor,
                                const std::vector<std::string>& ssids, int count = 4) {
    std::vector<ProbeRequest> probes;
    for (int k = 0; k < count; ++k) {
        probes.push_back(probe(start + 0.05 * k, mac, profile(flavor, ssids, k)));
    }
    return probes;
}

void append(std::vector<ProbeRequest>& out, const std::vector<ProbeRequest>& extra) {
    out.insert(out.end(), extra.begin(), extra.end());
}

}  // namespace

TEST_CASE("cluster params validate their ranges") {
    ClusterParams params;
    CHECK_NOTHROW(params.validate());
    params.burst_gap = 0;
    CHECK_THROWS_AS(params.validate(), ValidationError);
    params = {};
    params.pnl_threshold = 1.5;
    CHECK_THROWS_AS(params.validate(), ValidationError);
    params = {};
    params.recurrence_threshold = 0;
    CHECK_THROWS_AS(params.validate(), ValidationError);
}

TEST_CASE("a single probe is one instance of count one") {
    const auto instances = detect_bursts(std::vector<ProbeRequest>{probe(0.0, "02:00:00:00:00:01")},
                                         ClusterParams{});
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].probe_count == 1);
    CHECK(instances[0].start == instances[0].end);
}

TEST_CASE("gaps beyond the threshold split a burst: 1s,2s,60s -> 3+1") {
    // Same address at t = 0, 1, 3, 63: the 60 s gap opens a second instance.
    std::vector<ProbeRequest> probes{
        probe(0.0, "02:00:00:00:00:01"),
        probe(1.0, "02:00:00:00:00:01"),
        probe(3.0, "02:00:00:00:00:01"),
        probe(63.0, "02:00:00:00:00:01"),
    };
    const auto instances = detect_bursts(probes, ClusterParams{});
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].probe_count == 3);
    CHECK(instances[1].probe_count == 1);
}

TEST_CASE("interleaved addresses do not split each other's bursts") {
    std::vector<ProbeRequest> probes{
        probe(0.0, "02:00:00:00:00:01"), probe(0.1, "02:00:00:00:00:02"),
        probe(0.2, "02:00:00:00:00:01"), probe(0.3, "02:00:00:00:00:02"),
        probe(0.4, "02:00:00:00:00:01"),
    };
    const auto instances = detect_bursts(probes, ClusterParams{});
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].probe_count == 3);
    CHECK(instances[1].probe_count == 2);
}

TEST_CASE("unsorted input is sorted before burst detection") {
    std::vector<ProbeRequest> sorted{
        probe(0.0, "02:00:00:00:00:01"),
        probe(1.0, "02:00:00:00:00:01"),
        probe(30.0, "02:00:00:00:00:01"),
    };
    std::vector<ProbeRequest> shuffled{sorted[2], sorted[0], sorted[1]};
    const auto a = detect_bursts(sorted, ClusterParams{});
    const auto b = detect_bursts(shuffled, ClusterParams{});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mac == b[i].mac);
        CHECK(a[i].start == b[i].start);
        CHECK(a[i].probe_count == b[i].probe_count);
    }
}

TEST_CASE("burst partition: every probe lands in exactly one instance") {
    std::mt19937_64 eng(5);
    std::vector<ProbeRequest> probes;
    for (int i = 0; i < 300; ++i) {
        const auto mac = "02:00:00:00:00:0" + std::to_string(eng() % 8);
        probes.push_back(probe(static_cast<double>(eng() % 2000), mac));
    }
    const auto instances = detect_bursts(probes, ClusterParams{});
    std::vector<int> seen(probes.size(), 0);
    std::size_t total = 0;
    for (const auto& instance : instances) {
        CHECK(instance.probe_count == instance.probe_indices.size());
        total += instance.probe_count;
        Timestamp last{};
        bool first = true;
        for (const std::size_t idx : instance.probe_indices) {
            ++seen[idx];
            CHECK(probes[idx].source == instance.mac);
            CHECK(probes[idx].ts >= instance.start);
            CHECK(probes[idx].ts <= instance.end);
            if (!first) {
                CHECK(ts_diff(probes[idx].ts, last) <= ClusterParams{}.burst_gap);
            }
            last = probes[idx].ts;
            first = false;
        }
    }
    CHECK(total == probes.size());
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST_CASE("distinct global addresses cluster one device per address") {
    std::vector<ProbeRequest> probes;
    for (int d = 0; d < 5; ++d) {
        const auto mac = "00:11:22:33:44:0" + std::to_string(d);
        append(probes, burst(0.0 + 100.0 * d, mac, 1, {}));
        append(probes, burst(1000.0 + 100.0 * d, mac, 1, {}));
    }
    const auto instances = detect_bursts(probes, ClusterParams{});
    REQUIRE(instances.size() == 10);
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    CHECK(devices.size() == 5);
    for (const auto& device : devices) {
        CHECK(device.mac_mode == MacMode::Global);
        CHECK(device.appearance_count == 2);
    }
}

TEST_CASE("a shared UUID-E links instances across different local addresses") {
    Bytes uuid(16, 0x3C);
    const Bytes wps = testsupport::wps_payload({{0x1047, uuid}});
    std::vector<ProbeRequest> probes{
        probe(0.0, "02:00:00:00:00:01", {{0, {}}, {221, wps}}),
        probe(500.0, "06:00:00:00:00:02", {{0, {}}, {221, wps}}),
    };
    const auto instances = detect_bursts(probes, ClusterParams{});
    REQUIRE(instances.size() == 2);
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    CHECK(devices.size() == 1);
    CHECK(devices[0].appearance_count == 2);
}

TEST_CASE("equal fingerprint with similar PNLs links local instances") {
    // PNLs {A,B} and {A,B,C}: Jaccard 2/3, above the 0.5 default.
    std::vector<ProbeRequest> probes;
    append(probes, burst(0.0, "02:00:00:00:00:01", 9, {"A", "B"}, 4));
    append(probes, burst(500.0, "06:00:00:00:00:02", 9, {"A", "B", "C"}, 6));
    const auto instances = detect_bursts(probes, ClusterParams{});
    REQUIRE(instances.size() == 2);
    CHECK(pnl_similarity(instances[0].pnl, instances[1].pnl) == doctest::Approx(2.0 / 3.0));

    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    CHECK(devices.size() == 1);
    CHECK(devices[0].mac_mode == MacMode::Local);
}

TEST_CASE("dissimilar PNLs keep equal fingerprints apart") {
    std::vector<ProbeRequest> probes;
    append(probes, burst(0.0, "02:00:00:00:00:01", 9, {"A", "B"}, 4));
    append(probes, burst(500.0, "06:00:00:00:00:02", 9, {"C", "D"}, 4));
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    CHECK(devices.size() == 2);
}

TEST_CASE("different fingerprints keep similar PNLs apart") {
    std::vector<ProbeRequest> probes;
    append(probes, burst(0.0, "02:00:00:00:00:01", 9, {"A", "B"}, 4));
    append(probes, burst(500.0, "06:00:00:00:00:02", 13, {"A", "B"}, 4));
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    CHECK(devices.size() == 2);
}

TEST_CASE("empty fingerprints never satisfy the fingerprint rule by default") {
    // Wildcard-only probes with no other elements: same (empty) fingerprint,
    // same PNL would be required anyway - give them one shared SSID.
    std::vector<ProbeRequest> probes{
        probe(0.0, "02:00:00:00:00:01", {{0, testsupport::ssid_bytes("A")}}),
        probe(500.0, "06:00:00:00:00:02", {{0, testsupport::ssid_bytes("A")}}),
    };
    const auto instances = detect_bursts(probes, ClusterParams{});
    REQUIRE(instances.size() == 2);
    CHECK(instances[0].fingerprints.begin()->empty());

    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    CHECK(devices.size() == 2);

    ClusterParams lax;
    lax.require_nonempty_fingerprint = false;
    CHECK(cluster_devices(instances, lax, default_prefix_rules()).size() == 1);
}

TEST_CASE("links are transitive: address chain plus fingerprint chain") {
    std::vector<ProbeRequest> probes;
    // Instance 1 and 2 share an address; instance 2 and 3 share
    // fingerprint+PNL; 1 and 3 share nothing directly.
    append(probes, burst(0.0, "02:00:00:00:00:01", 9, {"A", "B"}, 4));
    append(probes, burst(500.0, "02:00:00:00:00:01", 9, {"A", "B"}, 4));
    append(probes, burst(1000.0, "06:00:00:00:00:02", 9, {"A", "B"}, 4));
    const auto instances = detect_bursts(probes, ClusterParams{});
    REQUIRE(instances.size() == 3);
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    CHECK(devices.size() == 1);
    CHECK(devices[0].appearance_count == 3);
}

TEST_CASE("prefix-rule addresses mark the whole device prefix-local") {
    std::vector<ProbeRequest> probes;
    append(probes, burst(0.0, "DA:A1:19:00:00:01", 9, {"A"}, 4));
    append(probes, burst(500.0, "DA:A1:19:00:00:02", 9, {"A"}, 4));
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    REQUIRE(devices.size() == 1);
    CHECK(devices[0].mac_mode == MacMode::PrefixLocal);
}

TEST_CASE("clustering is invariant under instance input order") {
    std::vector<ProbeRequest> probes;
    append(probes, burst(0.0, "02:00:00:00:00:01", 9, {"A", "B"}, 4));
    append(probes, burst(400.0, "06:00:00:00:00:02", 9, {"A", "B"}, 4));
    append(probes, burst(800.0, "00:11:22:33:44:55", 3, {}, 4));
    append(probes, burst(1200.0, "00:11:22:33:44:55", 3, {}, 4));
    append(probes, burst(1600.0, "DA:A1:19:00:00:07", 5, {"Q"}, 4));
    auto instances = detect_bursts(probes, ClusterParams{});
    const auto reference = cluster_devices(instances, ClusterParams{}, default_prefix_rules());

    std::mt19937_64 eng(23);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(instances.begin(), instances.end(), eng);
        const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
        REQUIRE(devices.size() == reference.size());
        for (std::size_t i = 0; i < devices.size(); ++i) {
            CHECK(devices[i].device_id == reference[i].device_id);
            CHECK(devices[i].mac_mode == reference[i].mac_mode);
            CHECK(devices[i].appearance_count == reference[i].appearance_count);
            CHECK(devices[i].first_seen == reference[i].first_seen);
            CHECK(devices[i].last_seen == reference[i].last_seen);
        }
    }
}

TEST_CASE("library clustering matches the brute-force closure on random mixes") {
    std::mt19937_64 eng(31);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<ProbeRequest> probes;
        const int devices_count = 3 + static_cast<int>(eng() % 6);
        for (int d = 0; d < devices_count; ++d) {
            const std::uint8_t flavor = static_cast<std::uint8_t>(eng() % 4);
            const bool global = eng() % 3 == 0;
            std::vector<std::string> ssids;
            for (std::uint64_t s = 0, n = eng() % 3; s < n; ++s) {
                ssids.push_back(std::string(1, static_cast<char>('A' + eng() % 5)));
            }
            const int bursts_count = 1 + static_cast<int>(eng() % 4);
            for (int b = 0; b < bursts_count; ++b) {
                std::string mac;
                if (global) {
                    mac = "00:11:22:33:44:0" + std::to_string(d);
                } else {
                    mac = "02:00:00:00:0" + std::to_string(d) + ":0" + std::to_string(b);
                }
                append(probes, burst(d * 10000.0 + b * 500.0, mac, flavor, ssids,
                                     2 + static_cast<int>(eng() % 3)));
            }
        }
        ClusterParams params;
        params.pnl_threshold = (trial % 2 == 0) ? 0.5 : 0.0;
        const auto instances = detect_bursts(probes, params);
        REQUIRE(instances.size() <= 200);
        const auto devices = cluster_devices(instances, params, default_prefix_rules());
        const auto expected = testsupport::brute_force_cluster(instances, params);
        const auto actual = testsupport::labels_from_devices(devices, instances.size());
        CHECK(testsupport::same_partition(expected, actual));
    }
}

TEST_CASE("recurrence partitions strictly above the threshold") {
    std::vector<ProbeRequest> probes;
    for (int b = 0; b < 11; ++b) {
        append(probes, burst(b * 100.0, "00:11:22:33:44:55", 1, {}, 2));
    }
    for (int b = 0; b < 10; ++b) {
        append(probes, burst(b * 100.0 + 50.0, "00:11:22:33:44:66", 1, {}, 2));
    }
    append(probes, burst(5000.0, "00:11:22:33:44:77", 1, {}, 2));

    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    REQUIRE(devices.size() == 3);
    const auto partition = recurrence_report(devices, ClusterParams{});
    REQUIRE(partition.recurrent.size() == 1);  // 11 appearances beats "more than 10"
    CHECK(devices[partition.recurrent[0]].appearance_count == 11);
    CHECK(partition.transient.size() == 2);  // 10 and 1 do not
}

TEST_CASE("device count never decreases as the PNL threshold rises") {
    const auto output = generate(
        [] {
            std::vector<DevicePolicy> population;
            for (int d = 0; d < 8; ++d) {
                DevicePolicy device;
                device.label = "dev" + std::to_string(d);
                device.mac_policy = MacPolicy::PerBurstRandom;
                device.ssid_behavior = SsidBehavior::DirectedPerPnl;
                device.ie_profile = {{1, {0x82, static_cast<std::uint8_t>(d % 3)}}};
                device.pnl = {testsupport::ssid_bytes("N" + std::to_string(d % 4)),
                              testsupport::ssid_bytes("M" + std::to_string(d % 2))};
                for (int b = 0; b < 4; ++b) {
                    device.bursts.push_back({b * 120.0 + d * 3.0, 4, 0.05});
                }
                population.push_back(std::move(device));
            }
            return population;
        }(),
        404);
    std::vector<ProbeRequest> probes;
    for (const auto& record : output.capture.records) {
        probes.push_back(*parse_probe_request(record.payload, record.ts));
    }
    ClusterParams params;
    const auto instances = detect_bursts(probes, params);
    std::size_t previous = 0;
    for (const double threshold : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
        params.pnl_threshold = threshold;
        const auto devices = cluster_devices(instances, params, default_prefix_rules());
        CHECK(devices.size() >= previous);
        previous = devices.size();
    }
}

TEST_CASE("instance count never increases as the burst gap grows") {
    std::vector<ProbeRequest> probes;
    std::mt19937_64 eng(47);
    for (int i = 0; i < 200; ++i) {
        probes.push_back(probe(static_cast<double>(eng() % 600), "02:00:00:00:00:01"));
        probes.push_back(probe(static_cast<double>(eng() % 600), "02:00:00:00:00:02"));
    }
    ClusterParams params;
    std::size_t previous = SIZE_MAX;
    for (const double gap : {1.0, 5.0, 10.0, 30.0, 60.0, 120.0}) {
        params.burst_gap = gap;
        const auto instances = detect_bursts(probes, params);
        CHECK(instances.size() <= previous);
        previous = instances.size();
    }
}

TEST_CASE("summary stats on an empty capture are all zeros") {
    const std::vector<ProbeRequest> probes;
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    const auto stats =
        summary_stats(probes, instances, devices, ClusterParams{}, default_prefix_rules());
    CHECK(stats.probes_total == 0);
    CHECK(stats.instances_total == 0);
    CHECK(stats.devices_total == 0);
    CHECK(stats.single_occurrence_devices == 0);
}

TEST_CASE("summary splits probes, instances and devices by address mode") {
    std::vector<ProbeRequest> probes;
    append(probes, burst(0.0, "00:11:22:33:44:55", 1, {}, 3));          // global
    append(probes, burst(100.0, "00:11:22:33:44:55", 1, {}, 3));        // same device
    append(probes, burst(200.0, "DA:A1:19:00:00:01", 2, {"A"}, 3));     // prefix
    append(probes, burst(300.0, "02:00:00:00:00:01", 3, {"B"}, 3));     // fully random
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    const auto stats =
        summary_stats(probes, instances, devices, ClusterParams{}, default_prefix_rules());

    CHECK(stats.probes_total == 12);
    CHECK(stats.probes_global == 6);
    CHECK(stats.probes_local == 6);
    CHECK(stats.prefix_probes[0].second == 3);

    CHECK(stats.instances_total == 4);
    CHECK(stats.instances_global == 2);
    CHECK(stats.instances_local == 2);
    CHECK(stats.prefix_instances[0].second == 1);

    CHECK(stats.devices_total == 3);
    CHECK(stats.devices_global == 1);
    CHECK(stats.devices_prefix == 1);
    CHECK(stats.devices_local == 1);
    CHECK(stats.devices_fully_randomized == 1);
    CHECK(stats.single_occurrence_devices == 2);
}
