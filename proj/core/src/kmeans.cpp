#include "tocc/kmeans.hpp"

#include "tocc/error.hpp"

#include <cmath>
#include <limits>

namespace tocc {

Eigen::Index nearest_row(const Eigen::MatrixXd& centers, const Eigen::VectorXd& point, double* distance) {
    Eigen::Index best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centers.rows(); ++k) {
        const double d2 = (centers.row(k).transpose() - point).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
        }
    }
    if (distance) *distance = std::sqrt(best_d2);
    return best;
}

namespace {

Eigen::MatrixXd plus_plus_seeds(const Eigen::MatrixXd& x, Eigen::Index k, RngStream& rng) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd centers(k, x.cols());
    centers.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
    Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (Eigen::Index c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double u = rng.uniform(0.0, total);
            for (pick = 0; pick < n - 1; ++pick) {
                u -= d2(pick);
                if (u < 0.0) break;
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centers.row(c) = x.row(pick);
        d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
    return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers, int max_iter) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k = centers.rows();
    KMeansResult out;
    out.assignment.assign(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index g = nearest_row(centers, x.row(i).transpose());
            if (out.assignment[static_cast<std::size_t>(i)] != g) {
                out.assignment[static_cast<std::size_t>(i)] = g;
                changed = true;
            }
        }
        if (!changed) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto g = out.assignment[static_cast<std::size_t>(i)];
            sums.row(g) += x.row(i);
            counts(g) += 1.0;
        }
        for (Eigen::Index g = 0; g < k; ++g)
            if (counts(g) > 0.0) centers.row(g) = sums.row(g) / counts(g);
        // Empty clusters keep their previous centre.
    }
    out.centroids = std::move(centers);
    out.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        out.inertia += (x.row(i) - out.centroids.row(out.assignment[static_cast<std::size_t>(i)])).squaredNorm();
    return out;
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& x, Eigen::Index k, RngStream& rng, KMeansOptions options) {
    if (k < 1) throw InvalidArgument("kmeans: K must be at least 1");
    if (k > x.rows()) throw InvalidArgument("kmeans: K exceeds the number of rows");
    if (options.restarts < 1) throw InvalidArgument("kmeans: restarts must be at least 1");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        KMeansResult run = lloyd(x, plus_plus_seeds(x, k, rng), options.max_iter);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

} // namespace tocc
