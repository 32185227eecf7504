#pragma once

#include "tocc/error.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace tocc {

/// Inverse-ECDF (type 1) quantile: the k-th smallest value with
/// k = ceil(q * n), k = 1 when q = 0. Always returns an element of `xs`.
/// This is the single calibration routine shared by every classifier.
double empirical_quantile(std::span<const double> xs, double q);

/// Linearly interpolated (type 7) quantile, used for descriptive statistics
/// (IQR of scenario boxes, boxplot summaries).
double interpolated_quantile(std::span<const double> xs, double q);

/// Sample median; midpoint of the two central order statistics for even n.
double median(std::span<const double> xs);

/// Median absolute deviation from the median (unscaled).
double median_absolute_deviation(std::span<const double> xs);

Eigen::VectorXd coordinatewise_median(const Eigen::MatrixXd& x);

/// Thrown by spatial_median when the iteration budget runs out.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Eigen::VectorXd last_iterate)
        : Error(what), last_iterate_(std::move(last_iterate)) {}
    [[nodiscard]] const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

private:
    Eigen::VectorXd last_iterate_;
};

struct SpatialMedianOptions {
    double tol = 1e-8;
    int max_iter = 1000;
};

/// Point minimising the sum of Euclidean distances to the rows of `x`
/// (the mediancentre). Modified Weiszfeld iteration started at the
/// coordinatewise median; an iterate that coincides with a data point is
/// handled with the Vardi-Zhang correction.
Eigen::VectorXd spatial_median(const Eigen::MatrixXd& x, SpatialMedianOptions options = {});

/// Sum of Euclidean distances from `point` to every row of `x`.
double sum_of_distances(const Eigen::MatrixXd& x, const Eigen::VectorXd& point);

struct Pca {
    Eigen::VectorXd center;       // column means
    Eigen::VectorXd eigenvalues;  // non-increasing
    Eigen::MatrixXd eigenvectors; // columns, unit norm, largest |loading| positive
    std::vector<bool> zero_variance;
    /// Number of eigenvalues above the numerical-zero cutoff.
    [[nodiscard]] Eigen::Index rank() const;
};

/// Eigendecomposition of the sample covariance (denominator n - 1).
Pca pca(const Eigen::MatrixXd& x);

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x);

/// Pearson correlations. Throws DegenerateData naming the first
/// zero-variance column; `names` may be empty.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x,
                                   std::span<const std::string> names = {});

Eigen::VectorXd column_standard_deviations(const Eigen::MatrixXd& x);

/// Rows of `x` sorted lexicographically by value; returns the permutation.
std::vector<Eigen::Index> lexicographic_row_order(const Eigen::MatrixXd& x);

} // namespace tocc
