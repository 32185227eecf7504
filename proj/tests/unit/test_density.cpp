#include <doctest.h>

#include "helpers.hpp"

#include <tocc/density.hpp>
#include <tocc/error.hpp>

#include <cmath>
#include <limits>
#include <numbers>

using namespace tocc;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("normal cdf against high-precision values") {
    CHECK(standard_normal_cdf(0.0) == 0.5);
    CHECK(testing::near(standard_normal_cdf(1.2816), 0.900008499902324846, 1e-15));
    CHECK(testing::near(standard_normal_cdf(-1.96), 0.0249978951482204362, 1e-16));
    CHECK(testing::near(standard_normal_cdf(0.5), 0.691462461274013104, 1e-15));
    CHECK(testing::near(standard_normal_cdf(3.0), 0.998650101968369905, 1e-15));
}

TEST_CASE("gaussian pdf values") {
    const MixtureDensity f = MixtureDensity::standard_normal(1);
    CHECK(testing::near(f.pdf(Eigen::VectorXd::Zero(1)), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15));

    // Two components far apart: at one mean the other contributes nothing.
    const MixtureDensity g({0.5, 0.5}, {Eigen::VectorXd::Constant(1, -1e3), Eigen::VectorXd::Constant(1, 1e3)},
                           {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)});
    CHECK(testing::near(g.pdf(Eigen::VectorXd::Constant(1, 1e3)), 0.5 * f.pdf(Eigen::VectorXd::Zero(1)), 1e-15));

    RngStream rng(1);
    for (int i = 0; i < 20; ++i) CHECK(g.pdf(testing::gaussian_matrix(1, 1, rng).row(0).transpose()) >= 0.0);
}

TEST_CASE("mixture parameters are validated") {
    CHECK_THROWS_AS(MixtureDensity({0.7, 0.7}, {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)},
                                   {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)}),
                    InvalidArgument);
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS(MixtureDensity::gaussian(Eigen::VectorXd::Zero(2), bad));
}

TEST_CASE("one-dimensional boxes use the exact marginal") {
    const MixtureDensity f = MixtureDensity::standard_normal(1);
    OrthantIntegrator in;
    in.method = IntegrationMethod::closed_form_1d;
    CHECK(orthant_probability(f, Eigen::VectorXd::Constant(1, -inf), Eigen::VectorXd::Zero(1), in) == 0.5);
    CHECK(testing::near(orthant_probability(f, Eigen::VectorXd::Constant(1, -inf), Eigen::VectorXd::Constant(1, 1.2816), in),
                        0.9000, 1e-4));
}

TEST_CASE("bivariate orthants against the arcsine formula") {
    // P(X > 0, Y > 0) = 1/4 + asin(rho) / (2 pi) for unit-variance normals.
    for (double rho : {0.0, 0.35, 0.5, -0.5}) {
        Eigen::Matrix2d cov;
        cov << 1, rho, rho, 1;
        const MixtureDensity f = MixtureDensity::gaussian(Eigen::Vector2d::Zero(), cov);
        OrthantIntegrator in;
        in.seed = 42;
        const OrthantEvaluator ev(f, in);
        const double p = ev.probability(Eigen::Vector2d::Zero(), Eigen::Vector2d::Constant(inf));
        const double exact = 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
        CHECK(std::abs(p - exact) <= 3.0 * ev.standard_error(exact));
    }
}

TEST_CASE("full space has probability one and invalid boxes throw") {
    const MixtureDensity f = MixtureDensity::standard_normal(3);
    const OrthantEvaluator ev(f, OrthantIntegrator{});
    CHECK(ev.probability(Eigen::Vector3d::Constant(-inf), Eigen::Vector3d::Constant(inf)) == 1.0);
    CHECK_THROWS_AS((void)ev.probability(Eigen::Vector3d::Constant(1), Eigen::Vector3d::Constant(0)), InvalidArgument);
    OrthantIntegrator few;
    few.mc_samples = 10;
    CHECK_THROWS_AS(few.validate(), InvalidArgument);
}

TEST_CASE("closed_form_1d refuses boxes bounding several coordinates") {
    OrthantIntegrator in;
    in.method = IntegrationMethod::closed_form_1d;
    const OrthantEvaluator ev(MixtureDensity::standard_normal(2), in);
    CHECK_THROWS_AS((void)ev.probability(Eigen::Vector2d::Zero(), Eigen::Vector2d::Constant(inf)), InvalidArgument);
    CHECK(ev.probability(Eigen::Vector2d(0, -inf), Eigen::Vector2d::Constant(inf)) == 0.5);
}

TEST_CASE("gmm density integrates to one") {
    const MixtureDensity f({0.3, 0.7}, {Eigen::Vector2d(-2, 0), Eigen::Vector2d(1, 1)},
                           {Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity() * 0.5});
    // Importance sampling from a wider gaussian.
    const MixtureDensity q = MixtureDensity::gaussian(Eigen::Vector2d(-0.5, 0.5), 9.0 * Eigen::Matrix2d::Identity());
    RngStream rng(3);
    const Eigen::MatrixXd draws = q.sample(100000, rng);
    Eigen::ArrayXd w(draws.cols());
    for (Eigen::Index i = 0; i < draws.cols(); ++i) w(i) = f.pdf(draws.col(i)) / q.pdf(draws.col(i));
    const double integral = w.mean();
    const double se = std::sqrt((w - integral).square().sum() / (w.size() - 1.0) / static_cast<double>(w.size()));
    CHECK(se < 0.01);
    CHECK(std::abs(integral - 1.0) <= 4.0 * se);
}

TEST_CASE("BIC picks two components for two separated clusters") {
    RngStream data_rng(5);
    Eigen::MatrixXd x = testing::gaussian_matrix(1000, 2, data_rng);
    x.bottomRows(500).array() += 10.0;
    RngStream rng(6);
    const GmmFit fit = fit_gmm(x, GmmConfig{}, rng);
    CHECK(fit.components == 2);
    CHECK(fit.bic == doctest::Approx(2.0 * fit.log_likelihood - gmm_parameter_count(2, 2) * std::log(1000.0)));
}

TEST_CASE("BIC picks one component for a single gaussian in most runs") {
    int ones = 0;
    for (int run = 0; run < 10; ++run) {
        RngStream data_rng(100 + run);
        const Eigen::MatrixXd x = testing::gaussian_matrix(1000, 2, data_rng);
        RngStream rng(200 + run);
        GmmConfig cfg;
        cfg.max_components = 4;
        ones += fit_gmm(x, cfg, rng).components == 1 ? 1 : 0;
    }
    CHECK(ones >= 9);
}

TEST_CASE("EM log-likelihood never decreases") {
    RngStream data_rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd x = testing::gaussian_matrix(200, 2, data_rng);
        x.topRows(80).array() += 3.0;
        RngStream rng(trial);
        const GmmFit fit = fit_gmm_fixed(x, 3, GmmConfig{}, rng);
        for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k)
            CHECK(fit.loglik_trace[k] >= fit.loglik_trace[k - 1] - 1e-9 * std::abs(fit.loglik_trace[k - 1]));
    }
}

TEST_CASE("parameter count of a full-covariance mixture") {
    CHECK(gmm_parameter_count(1, 2) == 5);
    CHECK(gmm_parameter_count(3, 2) == 2 + 6 + 9);
}

TEST_CASE("mixture fitting rejects constant data") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Constant(50, 2, 1.0);
    RngStream rng(1);
    CHECK_THROWS_AS(fit_gmm(x, GmmConfig{}, rng), DegenerateData);
}
