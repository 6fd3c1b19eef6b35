// Microbenchmarks for the hot paths: frame parsing, fingerprinting, burst
// detection and clustering, pcap serialization.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "probekit/dot11.hpp"
#include "probekit/fingerprint.hpp"
#include "probekit/pcap.hpp"
#include "probekit/session.hpp"
#include "probekit/synthgen.hpp"

namespace {

using namespace probekit;

std::vector<DevicePolicy> bench_population(int devices, int bursts, int probes) {
    std::vector<DevicePolicy> population;
    for (int d = 0; d < devices; ++d) {
        DevicePolicy device;
        device.label = "bench" + std::to_string(d);
        device.mac_policy = d % 3 == 0 ? MacPolicy::GlobalFixed : MacPolicy::PerBurstRandom;
        device.ssid_behavior = SsidBehavior::DirectedPerPnl;
        device.ie_profile = {{1, {0x82, 0x84, static_cast<std::uint8_t>(d)}},
                             {45, {static_cast<std::uint8_t>(d), 0x17}},
                             {127, {0x04, static_cast<std::uint8_t>(d)}}};
        device.pnl = {{std::uint8_t('n'), std::uint8_t('0' + d % 10)}};
        for (int b = 0; b < bursts; ++b) {
            device.bursts.push_back({b * 60.0 + d * 1.5, probes, 0.03});
        }
        population.push_back(std::move(device));
    }
    return population;
}

const Capture& bench_capture() {
    static const Capture capture = generate(bench_population(40, 25, 8), 1).capture;
    return capture;
}

std::vector<ProbeRequest> bench_probes() {
    std::vector<ProbeRequest> probes;
    const Capture& capture = bench_capture();
    probes.reserve(capture.records.size());
    for (const auto& record : capture.records) {
        probes.push_back(*parse_probe_request(record.payload, record.ts));
    }
    return probes;
}

void BM_ParseProbeRequest(benchmark::State& state) {
    const Capture& capture = bench_capture();
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& record = capture.records[i++ % capture.records.size()];
        benchmark::DoNotOptimize(parse_probe_request(record.payload, record.ts));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ParseProbeRequest);

void BM_FingerprintProbe(benchmark::State& state) {
    const auto probes = bench_probes();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(fingerprint_probe(probes[i++ % probes.size()]));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FingerprintProbe);

void BM_DetectBursts(benchmark::State& state) {
    const auto probes = bench_probes();
    const ClusterParams params;
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_bursts(probes, params));
    }
    state.SetItemsProcessed(state.iterations() * probes.size());
}
BENCHMARK(BM_DetectBursts);

void BM_ClusterDevices(benchmark::State& state) {
    const auto probes = bench_probes();
    const ClusterParams params;
    const auto instances = detect_bursts(probes, params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster_devices(instances, params, default_prefix_rules()));
    }
    state.SetItemsProcessed(state.iterations() * instances.size());
}
BENCHMARK(BM_ClusterDevices);

void BM_PcapWriteRead(benchmark::State& state) {
    const Capture& capture = bench_capture();
    const auto path = std::filesystem::temp_directory_path() / "probekit-bench.pcap";
    for (auto _ : state) {
        write_capture(path, capture.meta, capture.records);
        benchmark::DoNotOptimize(read_capture(path));
    }
    std::filesystem::remove(path);
    state.SetItemsProcessed(state.iterations() * capture.records.size());
}
BENCHMARK(BM_PcapWriteRead);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
