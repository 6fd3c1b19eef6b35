#include "support/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace testsupport {

namespace {

double naive_jaccard(const std::set<std::vector<std::uint8_t>>& a,
                     const std::set<std::vector<std::uint8_t>>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& ssid : a) {
        if (b.count(ssid)) ++common;
    }
    return static_cast<double>(common) /
           static_cast<double>(a.size() + b.size() - common);
}

bool linked(const probekit::ScanInstance& a, const probekit::ScanInstance& b,
            const probekit::ClusterParams& params) {
    if (a.mac == b.mac) return true;
    if (a.uuid_e && b.uuid_e && *a.uuid_e == *b.uuid_e) return true;
    if (a.pnl.empty() || b.pnl.empty()) return false;
    bool shared_fingerprint = false;
    for (const auto& fp : a.fingerprints) {
        if (fp.empty() && params.require_nonempty_fingerprint) continue;
        if (b.fingerprints.count(fp)) {
            shared_fingerprint = true;
            break;
        }
    }
    if (!shared_fingerprint) return false;
    return naive_jaccard(a.pnl.ssids, b.pnl.ssids) >= params.pnl_threshold;
}

}  // namespace

std::vector<std::size_t> brute_force_cluster(const std::vector<probekit::ScanInstance>& instances,
                                             const probekit::ClusterParams& params) {
    const std::size_t n = instances.size();
    std::vector<std::vector<bool>> adjacency(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (linked(instances[i], instances[j], params)) {
                adjacency[i][j] = adjacency[j][i] = true;
            }
        }
    }
    std::vector<std::size_t> component(n, n);
    std::size_t next = 0;
    for (std::size_t start = 0; start < n; ++start) {
        if (component[start] != n) continue;
        std::deque<std::size_t> queue{start};
        component[start] = next;
        while (!queue.empty()) {
            const std::size_t i = queue.front();
            queue.pop_front();
            for (std::size_t j = 0; j < n; ++j) {
                if (adjacency[i][j] && component[j] == n) {
                    component[j] = next;
                    queue.push_back(j);
                }
            }
        }
        ++next;
    }
    return component;
}

bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) return false;
    std::map<std::size_t, std::size_t> a_to_b;
    std::map<std::size_t, std::size_t> b_to_a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [it_ab, fresh_ab] = a_to_b.try_emplace(a[i], b[i]);
        if (!fresh_ab && it_ab->second != b[i]) return false;
        const auto [it_ba, fresh_ba] = b_to_a.try_emplace(b[i], a[i]);
        if (!fresh_ba && it_ba->second != a[i]) return false;
    }
    return true;
}

std::vector<std::size_t> labels_from_devices(const std::vector<probekit::DeviceRecord>& devices,
                                             std::size_t instance_count) {
    std::vector<std::size_t> labels(instance_count, instance_count);
    for (std::size_t d = 0; d < devices.size(); ++d) {
        for (const std::size_t idx : devices[d].instances) labels[idx] = d;
    }
    return labels;
}

PairwiseScore pairwise_score(const std::vector<std::size_t>& predicted,
                             const std::vector<std::size_t>& truth,
                             const std::vector<bool>& member) {
    std::uint64_t both = 0;
    std::uint64_t predicted_pairs = 0;
    std::uint64_t truth_pairs = 0;
    const std::size_t n = predicted.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!member[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!member[j]) continue;
            const bool same_predicted = predicted[i] == predicted[j];
            const bool same_truth = truth[i] == truth[j];
            if (same_predicted) ++predicted_pairs;
            if (same_truth) ++truth_pairs;
            if (same_predicted && same_truth) ++both;
        }
    }
    PairwiseScore score;
    score.pairs_predicted = predicted_pairs;
    score.pairs_truth = truth_pairs;
    score.precision = predicted_pairs == 0
                          ? 1.0
                          : static_cast<double>(both) / static_cast<double>(predicted_pairs);
    score.recall =
        truth_pairs == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(truth_pairs);
    score.f1 = (score.precision + score.recall) == 0.0
                   ? 0.0
                   : 2.0 * score.precision * score.recall / (score.precision + score.recall);
    return score;
}

}  // namespace testsupport
