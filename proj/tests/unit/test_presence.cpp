#include <doctest.h>

#include <random>

#include "probekit/errors.hpp"
#include "probekit/presence.hpp"
#include "support/frames.hpp"

using namespace probekit;

namespace {

// 2021-11-29 08:00:00 UTC: an hour boundary, so bin alignment is visible.
constexpr double kHour = 1638172800.0;

ProbeRequest probe(double t, const std::string& mac = "02:00:00:00:00:01") {
    return testsupport::probe_at(t, mac, {{0, {}}});
}

}  // namespace

TEST_CASE("an empty capture yields no bins") {
    CHECK(bin_presence(std::vector<ProbeRequest>{}, 15).empty());
}

TEST_CASE("bin width must be positive") {
    CHECK_THROWS_AS(bin_presence(std::vector<ProbeRequest>{probe(0)}, 0), ValidationError);
}

TEST_CASE("probes at minutes 0, 5, 14, 16 split 3 + 1 across 15-minute bins") {
    std::vector<ProbeRequest> probes{
        probe(kHour + 0 * 60), probe(kHour + 5 * 60), probe(kHour + 14 * 60),
        probe(kHour + 16 * 60)};
    const auto bins = bin_presence(probes, 15);
    REQUIRE(bins.size() == 2);
    CHECK(bins[0].probe_count == 3);
    CHECK(bins[1].probe_count == 1);
    CHECK(bins[0].start == static_cast<std::int64_t>(kHour));
    CHECK(bins[1].start == static_cast<std::int64_t>(kHour) + 900);
}

TEST_CASE("bins align to the clock, not to the first probe") {
    // First probe at 08:22 lands in the 08:15 bin.
    const auto bins = bin_presence(std::vector<ProbeRequest>{probe(kHour + 22 * 60)}, 15);
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].start == static_cast<std::int64_t>(kHour) + 15 * 60);
}

TEST_CASE("empty bins inside the span are emitted with zero counts") {
    std::vector<ProbeRequest> probes{probe(kHour), probe(kHour + 45 * 60)};
    const auto bins = bin_presence(probes, 15);
    REQUIRE(bins.size() == 4);
    CHECK(bins[0].probe_count == 1);
    CHECK(bins[1].probe_count == 0);
    CHECK(bins[2].probe_count == 0);
    CHECK(bins[3].probe_count == 1);
}

TEST_CASE("distinct MAC counts per bin") {
    std::vector<ProbeRequest> probes{
        probe(kHour, "02:00:00:00:00:01"),
        probe(kHour + 10, "02:00:00:00:00:01"),
        probe(kHour + 20, "02:00:00:00:00:02"),
    };
    const auto bins = bin_presence(probes, 15);
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].probe_count == 3);
    CHECK(bins[0].distinct_macs == 2);
    CHECK(!bins[0].distinct_devices.has_value());
}

TEST_CASE("conservation: bin sums equal the probe count for any width") {
    std::mt19937_64 eng(13);
    std::vector<ProbeRequest> probes;
    for (int i = 0; i < 500; ++i) {
        probes.push_back(probe(kHour + static_cast<double>(eng() % 86400),
                               "02:00:00:00:00:0" + std::to_string(eng() % 4)));
    }
    for (const int width : {5, 15, 60}) {
        const auto bins = bin_presence(probes, width);
        std::uint64_t sum = 0;
        for (const auto& bin : bins) sum += bin.probe_count;
        CHECK(sum == probes.size());
    }
}

TEST_CASE("merging adjacent 15-minute bins equals 30-minute bins") {
    std::mt19937_64 eng(29);
    std::vector<ProbeRequest> probes;
    for (int i = 0; i < 400; ++i) {
        probes.push_back(probe(kHour + static_cast<double>(eng() % 7200)));
    }
    const auto fine = bin_presence(probes, 15);
    const auto coarse = bin_presence(probes, 30);
    // Walk the fine bins, folding each into its enclosing 30-minute bin.
    std::vector<std::uint64_t> folded(coarse.size(), 0);
    for (const auto& bin : fine) {
        const auto idx = static_cast<std::size_t>((bin.start - coarse.front().start) / 1800);
        folded[idx] += bin.probe_count;
    }
    REQUIRE(folded.size() == coarse.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        CHECK(folded[i] == coarse[i].probe_count);
    }
}

TEST_CASE("device occupancy counts devices whose instances overlap the bin") {
    std::vector<ProbeRequest> probes;
    // One device probing continuously across a bin boundary, another inside
    // one bin only.
    for (int k = 0; k < 20; ++k) {
        probes.push_back(probe(kHour + 14 * 60 + k * 9.0, "02:00:00:00:00:01"));
    }
    probes.push_back(probe(kHour + 2 * 60, "00:11:22:33:44:55"));
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    const auto bins = bin_presence(probes, 15, instances, devices);
    REQUIRE(bins.size() == 2);
    REQUIRE(bins[0].distinct_devices.has_value());
    CHECK(*bins[0].distinct_devices == 2);
    CHECK(*bins[1].distinct_devices == 1);
}

TEST_CASE("a single-instance device has a one-interval timeline") {
    std::vector<ProbeRequest> probes{probe(kHour), probe(kHour + 1)};
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    REQUIRE(devices.size() == 1);
    const auto timeline = device_timeline(devices[0], instances);
    REQUIRE(timeline.size() == 1);
    CHECK(timeline[0].first == testsupport::ts_at(kHour));
    CHECK(timeline[0].second == testsupport::ts_at(kHour + 1));
}

TEST_CASE("timelines are sorted and disjoint when the gap separates bursts") {
    std::vector<ProbeRequest> probes;
    for (const double start : {kHour + 800.0, kHour, kHour + 400.0}) {
        for (int k = 0; k < 3; ++k) {
            probes.push_back(probe(start + k * 0.1, "02:00:00:00:00:01"));
        }
    }
    const auto instances = detect_bursts(probes, ClusterParams{});
    const auto devices = cluster_devices(instances, ClusterParams{}, default_prefix_rules());
    REQUIRE(devices.size() == 1);
    const auto timeline = device_timeline(devices[0], instances);
    REQUIRE(timeline.size() == 3);
    for (std::size_t i = 1; i < timeline.size(); ++i) {
        CHECK(timeline[i - 1].second < timeline[i].first);
    }
}

TEST_CASE("annotations parse epoch and ISO forms") {
    const auto annotations = parse_annotations(
        "# conference schedule\n"
        "1638172800 1638176400 Opening Keynote\n"
        "2021-11-29T10:00:00 2021-11-29T11:30 Session 1A\n");
    REQUIRE(annotations.size() == 2);
    CHECK(annotations[0].start == 1638172800);
    CHECK(annotations[0].end == 1638176400);
    CHECK(annotations[0].label == "Opening Keynote");
    CHECK(annotations[1].start == 1638180000);
    CHECK(annotations[1].end == 1638185400);
    CHECK(annotations[1].label == "Session 1A");
}

TEST_CASE("annotation lines must carry start, end and a label") {
    CHECK_THROWS_AS(parse_annotations("1638172800\n"), ValidationError);
    CHECK_THROWS_AS(parse_annotations("1638172800 1638176400\n"), ValidationError);
    CHECK_THROWS_AS(parse_annotations("yesterday midnight party\n"), ValidationError);
}
