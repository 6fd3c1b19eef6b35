#pragma once

// Independent brute-force implementations used as oracles against the
// library's clustering. Everything here is deliberately naive: full O(n^2)
// pairwise link matrix, its own Jaccard, BFS for the closure.

#include <cstdint>
#include <vector>

#include "probekit/session.hpp"

namespace testsupport {

// Component id per instance under the same link relation the library
// implements, computed the slow way.
std::vector<std::size_t> brute_force_cluster(const std::vector<probekit::ScanInstance>& instances,
                                             const probekit::ClusterParams& params);

// True when two labelings induce the same partition.
bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

// Cluster labels (by device index) for each instance, from the library's
// device records.
std::vector<std::size_t> labels_from_devices(const std::vector<probekit::DeviceRecord>& devices,
                                             std::size_t instance_count);

struct PairwiseScore {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
    std::uint64_t pairs_predicted = 0;
    std::uint64_t pairs_truth = 0;
};

// Pairwise clustering metrics over the instances selected by `member`.
PairwiseScore pairwise_score(const std::vector<std::size_t>& predicted,
                             const std::vector<std::size_t>& truth,
                             const std::vector<bool>& member);

}  // namespace testsupport
