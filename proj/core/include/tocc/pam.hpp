#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tocc {

/// Partitioning Around Medoids result. Medoids and assignment use 0-based
/// row and cluster indices.
struct PamResult {
    std::vector<Eigen::Index> medoids;     // K distinct row indices
    std::vector<Eigen::Index> assignment;  // cluster of each row, in [0, K)
    double total_cost = 0.0;               // summed Euclidean distance to assigned medoid
    std::vector<double> cost_trace;        // cost after BUILD and after each accepted swap
    int swaps = 0;
};

struct PamOptions {
    int max_swaps = 10000;
};

/// k-medoids by BUILD + first-improvement SWAP on Euclidean distance. Rows
/// are processed in lexicographic value order, so the resulting medoid set
/// does not depend on the order of the input rows.
PamResult pam(const Eigen::MatrixXd& x, Eigen::Index k, PamOptions options = {});

} // namespace tocc
