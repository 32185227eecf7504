#include <doctest.h>

#include "helpers.hpp"

#include <tocc/error.hpp>
#include <tocc/io.hpp>
#include <tocc/numcore.hpp>

#include <algorithm>
#include <numbers>
#include <vector>

using namespace tocc;

TEST_CASE("empirical quantile takes order statistic ceil(q n)") {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    CHECK(empirical_quantile(xs, 0.0) == 1.0);
    CHECK(empirical_quantile(xs, 1.0) == 5.0);
    const std::vector<double> ys{0.1, 0.4, 0.2, 0.9, 0.5, 0.3, 0.7, 0.6, 0.8, 1.0};
    CHECK(empirical_quantile(ys, 0.10) == 0.1);
    CHECK(empirical_quantile(ys, 0.11) == 0.2);
    CHECK(empirical_quantile(ys, 0.9) == 0.9);
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5), InvalidArgument);
    CHECK_THROWS_AS(empirical_quantile(xs, 1.5), InvalidArgument);
}

TEST_CASE("empirical quantile is monotone and returns an input element") {
    RngStream rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xs(1 + rng.index(30));
        for (double& x : xs) x = rng.normal();
        double prev = -1e300;
        for (int k = 0; k <= 100; ++k) {
            const double q = empirical_quantile(xs, k / 100.0);
            CHECK(q >= prev);
            CHECK(std::find(xs.begin(), xs.end(), q) != xs.end());
            prev = q;
        }
    }
}

TEST_CASE("median and MAD") {
    CHECK(median(std::vector<double>{1, 2, 3}) == 2.0);
    CHECK(median(std::vector<double>{1, 2, 3, 4}) == 2.5);
    CHECK(median_absolute_deviation(std::vector<double>{1, 2, 3, 4, 100}) == 1.0);
    Eigen::MatrixXd x(3, 2);
    x << 0, 10, 2, 20, 4, 30;
    CHECK(coordinatewise_median(x).isApprox(Eigen::Vector2d(2, 20)));
}

TEST_CASE("spatial median special cases") {
    Eigen::MatrixXd cross(4, 2);
    cross << 1, 0, -1, 0, 0, 1, 0, -1;
    CHECK(spatial_median(cross).norm() < 1e-10);

    Eigen::MatrixXd one(1, 2);
    one << 3, 7;
    CHECK(spatial_median(one).isApprox(Eigen::Vector2d(3, 7)));
}

TEST_CASE("spatial median of a right triangle matches a grid search") {
    Eigen::MatrixXd tri(3, 2);
    tri << 0, 0, 1, 0, 0, 1;
    const Eigen::VectorXd m = spatial_median(tri);

    // 1000 x 1000 grid over [-0.5, 1.5]^2.
    double best = 1e300;
    Eigen::Vector2d arg;
    for (int i = 0; i < 1000; ++i)
        for (int j = 0; j < 1000; ++j) {
            const Eigen::Vector2d g(-0.5 + 2.0 * i / 999.0, -0.5 + 2.0 * j / 999.0);
            const double f = sum_of_distances(tri, g);
            if (f < best) {
                best = f;
                arg = g;
            }
        }
    CHECK((m - arg).norm() < 1e-3 * 2.0);
    CHECK(sum_of_distances(tri, m) <= best + 1e-12);

    // Fermat point (3 - sqrt 3) / 6 on both axes.
    const double fermat = (3.0 - std::numbers::sqrt3) / 6.0;
    CHECK(testing::near(m(0), fermat, 1e-7));
    CHECK(testing::near(m(1), fermat, 1e-7));
    CHECK(testing::near(sum_of_distances(tri, m), 1.9318516525781366, 1e-12));
}

TEST_CASE("spatial median beats the coordinatewise median on random data") {
    RngStream rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXd x = testing::gaussian_matrix(5 + static_cast<Eigen::Index>(rng.index(40)), 3, rng);
        const Eigen::VectorXd m = spatial_median(x);
        CHECK(sum_of_distances(x, m) <= sum_of_distances(x, coordinatewise_median(x)) + 1e-9);
    }
}

TEST_CASE("spatial median lands on a data point holding most of the mass") {
    Eigen::MatrixXd x(5, 2);
    x << 0, 0, 0, 0, 0, 0, 5, 1, -3, 4;
    CHECK(spatial_median(x).norm() < 1e-6);
}

TEST_CASE("spatial median non-convergence carries the last iterate") {
    RngStream rng(5);
    const Eigen::MatrixXd x = testing::gaussian_matrix(50, 2, rng);
    SpatialMedianOptions opts;
    opts.max_iter = 1;
    opts.tol = 1e-300;
    try {
        (void)spatial_median(x, opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_iterate().size() == 2);
        CHECK(e.last_iterate().allFinite());
    }
}

TEST_CASE("pca orders and flags components") {
    RngStream rng(17);
    Eigen::MatrixXd x = testing::gaussian_matrix(10000, 2, rng);
    x.col(0) *= std::sqrt(10.0);
    const Pca a = pca(x);
    CHECK(a.eigenvalues(0) >= a.eigenvalues(1));
    const double angle = std::acos(std::abs(a.eigenvectors(0, 0))) * 180.0 / std::numbers::pi;
    CHECK(angle < 2.0);
    CHECK(std::abs(a.eigenvectors.col(0).dot(a.eigenvectors.col(1))) < 1e-9);
    CHECK(testing::near(a.eigenvalues.sum(), sample_covariance(x).trace(), 1e-9 * a.eigenvalues.sum()));

    const Eigen::MatrixXd iso = testing::gaussian_matrix(10000, 2, rng);
    const Pca b = pca(iso);
    const double ratio = b.eigenvalues(0) / b.eigenvalues(1);
    CHECK(ratio >= 0.8);
    CHECK(ratio <= 1.25);

    Eigen::MatrixXd rank1(50, 2);
    rank1.col(0) = testing::gaussian_matrix(50, 1, rng);
    rank1.col(1) = 3.0 * rank1.col(0);
    const Pca c = pca(rank1);
    CHECK(c.rank() == 1);
    CHECK(c.zero_variance[1]);
    CHECK(std::abs(c.eigenvalues(1)) < 1e-9);
}

TEST_CASE("correlation matrix") {
    RngStream rng(23);
    Eigen::MatrixXd x(30, 3);
    x.col(0) = testing::gaussian_matrix(30, 1, rng);
    x.col(1) = 2.0 * x.col(0);
    x.col(2) = -x.col(0);
    const Eigen::MatrixXd r = correlation_matrix(x);
    CHECK(testing::near(r(0, 1), 1.0, 1e-12));
    CHECK(testing::near(r(0, 2), -1.0, 1e-12));

    Eigen::MatrixXd flat = x;
    flat.col(1).setConstant(4.0);
    const std::vector<std::string> names{"a", "b", "c"};
    CHECK_THROWS_WITH_AS(correlation_matrix(flat, names), doctest::Contains("'b'"), DegenerateData);

    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd y = testing::gaussian_matrix(20, 4, rng);
        const Eigen::MatrixXd c = correlation_matrix(y);
        CHECK(c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("glass window correlation of RI and Ca") {
    const DataMatrix glass = load_uci_glass(TOCC_DATA_DIR "/glass.data").rows_with(RowLabel::target);
    const Eigen::MatrixXd r = correlation_matrix(glass.values(), glass.feature_names());
    const auto ri = glass.feature_index("RI");
    const auto ca = glass.feature_index("Ca");
    CHECK(testing::near(r(ri, ca), 0.842, 0.01));
}
