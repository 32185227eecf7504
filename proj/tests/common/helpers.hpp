#pragma once

#include <tocc/rng.hpp>

#include <Eigen/Dense>

#include <cmath>

namespace testing {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index p, tocc::RngStream& rng) {
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    return x;
}

// Integer grid values in [lo, hi], which forces ties.
inline Eigen::MatrixXd grid_matrix(Eigen::Index n, Eigen::Index p, int lo, int hi, tocc::RngStream& rng) {
    Eigen::MatrixXd x(n, p);
    const auto span = static_cast<std::size_t>(hi - lo + 1);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = lo + static_cast<int>(rng.index(span));
    return x;
}

inline Eigen::VectorXd grid_vector(Eigen::Index p, int lo, int hi, tocc::RngStream& rng) {
    return grid_matrix(1, p, lo, hi, rng).row(0).transpose();
}

} // namespace testing
