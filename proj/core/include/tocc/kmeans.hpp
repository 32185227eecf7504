#pragma once

#include "tocc/rng.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tocc {

struct KMeansResult {
    Eigen::MatrixXd centroids;          // K x p
    std::vector<Eigen::Index> assignment;
    double inertia = 0.0;               // sum of squared distances to assigned centroid
};

struct KMeansOptions {
    int restarts = 5;
    int max_iter = 100;
};

/// Lloyd's algorithm with k-means++ seeding; best of `restarts` by inertia.
KMeansResult kmeans(const Eigen::MatrixXd& x, Eigen::Index k, RngStream& rng, KMeansOptions options = {});

/// Index of the nearest row of `centers` to `point` (ties: lowest index).
Eigen::Index nearest_row(const Eigen::MatrixXd& centers, const Eigen::VectorXd& point, double* distance = nullptr);

} // namespace tocc
