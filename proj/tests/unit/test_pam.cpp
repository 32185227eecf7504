#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"

#include <tocc/error.hpp>
#include <tocc/pam.hpp>

#include <set>

using namespace tocc;

namespace {

double cost_of(const Eigen::MatrixXd& x, const PamResult& r) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Eigen::Index medoid = r.medoids[static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(i)])];
        total += (x.row(i) - x.row(medoid)).norm();
    }
    return total;
}

} // namespace

TEST_CASE("single medoid is the exhaustive optimum") {
    RngStream rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::MatrixXd x = testing::gaussian_matrix(3 + static_cast<Eigen::Index>(rng.index(15)), 2, rng);
        const PamResult r = pam(x, 1);
        CHECK(testing::near(r.total_cost, oracle::best_medoid_cost(x, 1), 1e-9));
    }
}

TEST_CASE("two medoids on small sets never beat the exhaustive optimum") {
    RngStream rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::MatrixXd x = testing::gaussian_matrix(6 + static_cast<Eigen::Index>(rng.index(8)), 2, rng);
        const PamResult r = pam(x, 2);
        const double best = oracle::best_medoid_cost(x, 2);
        CHECK(r.total_cost >= best - 1e-9);
    }
}

TEST_CASE("two separated blobs get one medoid each") {
    RngStream rng(14);
    Eigen::MatrixXd x = 0.1 * testing::gaussian_matrix(100, 2, rng);
    x.bottomRows(50).array() += 10.0;
    const PamResult r = pam(x, 2);
    std::set<Eigen::Index> top, bottom;
    for (Eigen::Index i = 0; i < 100; ++i) (i < 50 ? top : bottom).insert(r.assignment[static_cast<std::size_t>(i)]);
    CHECK(top.size() == 1);
    CHECK(bottom.size() == 1);
    CHECK(*top.begin() != *bottom.begin());
}

TEST_CASE("pam result is internally consistent and cost never rises") {
    RngStream rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<Eigen::Index>(10 + rng.index(40));
        const auto k = static_cast<Eigen::Index>(1 + rng.index(4));
        const Eigen::MatrixXd x = testing::gaussian_matrix(n, 2, rng);
        const PamResult r = pam(x, k);
        CHECK(static_cast<Eigen::Index>(std::set<Eigen::Index>(r.medoids.begin(), r.medoids.end()).size()) == k);
        CHECK(testing::near(cost_of(x, r), r.total_cost, 1e-9));
        for (std::size_t s = 1; s < r.cost_trace.size(); ++s) CHECK(r.cost_trace[s] < r.cost_trace[s - 1]);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto own = r.assignment[static_cast<std::size_t>(i)];
            const double d = (x.row(i) - x.row(r.medoids[static_cast<std::size_t>(own)])).norm();
            for (Eigen::Index m : r.medoids) CHECK(d <= (x.row(i) - x.row(m)).norm() + 1e-12);
        }
    }
}

TEST_CASE("row order does not change the partition") {
    RngStream rng(16);
    const Eigen::MatrixXd x = testing::gaussian_matrix(40, 2, rng);
    Eigen::MatrixXd flipped = x.colwise().reverse();
    const PamResult a = pam(x, 3);
    const PamResult b = pam(flipped, 3);
    CHECK(testing::near(a.total_cost, b.total_cost, 1e-12));
    for (std::size_t c = 0; c < 3; ++c) CHECK(x.row(a.medoids[c]) == flipped.row(b.medoids[c]));
}

TEST_CASE("invalid K") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
    CHECK_THROWS_AS(pam(x, 0), InvalidArgument);
    CHECK_THROWS_AS(pam(x, 4), InvalidArgument);
}
