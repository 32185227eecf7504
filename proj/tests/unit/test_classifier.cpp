#include <doctest.h>

#include "helpers.hpp"

#include <tocc/error.hpp>
#include <tocc/featsel.hpp>
#include <tocc/io.hpp>
#include <tocc/classifier.hpp>
#include <tocc/numcore.hpp>
#include <tocc/pam.hpp>

#include <vector>

using namespace tocc;

namespace {

double accept_rate(const std::vector<Prediction>& preds) {
    double a = 0.0;
    for (const auto& p : preds) a += p.accepted ? 1.0 : 0.0;
    return a / static_cast<double>(preds.size());
}

Eigen::MatrixXd two_blobs(RngStream& rng, Eigen::Index per_blob) {
    Eigen::MatrixXd x = 0.5 * testing::gaussian_matrix(2 * per_blob, 2, rng);
    x.topRows(per_blob).col(0).array() -= 4.0;
    x.bottomRows(per_blob).col(0).array() += 4.0;
    return x;
}

ToccDbConfig quick_db(std::uint64_t seed) {
    ToccDbConfig c;
    c.gmm.max_components = 3;
    c.integrator.mc_samples = 20000;
    c.integrator.seed = seed;
    c.gmm_seed = seed;
    return c;
}

} // namespace

TEST_CASE("threshold keeps at least a fraction s") {
    const std::vector<double> scores{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    CHECK(threshold_for_sensitivity(scores, 0.9) == 0.1);
    CHECK(threshold_for_sensitivity(scores, 0.95) == 0.1);
    CHECK(threshold_for_sensitivity(scores, 0.85) == 0.2);
    CHECK(threshold_for_sensitivity(scores, 0.5) == 0.5);
}

TEST_CASE("density-free calibration at several levels") {
    RngStream rng(31);
    for (double s : {0.8, 0.9, 0.95})
        for (int trial = 0; trial < 5; ++trial) {
            const Eigen::MatrixXd x = testing::gaussian_matrix(60 + 10 * trial, 2, rng);
            const ToccModel m = fit_tocc_df(x, s);
            CHECK(m.thresholds().size() == 1);
            CHECK(accept_rate(predict(m, x)) >= s);
        }
}

TEST_CASE("s close to one accepts every training row") {
    RngStream rng(32);
    const Eigen::MatrixXd x = testing::gaussian_matrix(40, 2, rng);
    const ToccModel m = fit_tocc_df(x, 39.0 / 40.0);
    std::vector<double> scores;
    for (Eigen::Index i = 0; i < x.rows(); ++i) scores.push_back(m.score(x.row(i).transpose(), 0).value);
    CHECK(m.thresholds()[0] == *std::min_element(scores.begin(), scores.end()));
    CHECK(accept_rate(predict(m, x)) == 1.0);
}

TEST_CASE("density-based calibration") {
    RngStream rng(33);
    for (double s : {0.8, 0.9, 0.95}) {
        const Eigen::MatrixXd x = testing::gaussian_matrix(150, 2, rng);
        const ToccModel m = fit_tocc_db(x, s, quick_db(4));
        CHECK(m.density().has_value());
        CHECK(accept_rate(predict(m, x)) >= s);
    }
}

TEST_CASE("density-based scores in one dimension") {
    RngStream rng(34);
    const Eigen::MatrixXd x = testing::gaussian_matrix(2000, 1, rng);
    const ToccModel m = fit_tocc_db(x, 0.9, quick_db(5));
    const Eigen::VectorXd at_median = Eigen::VectorXd::Constant(1, median(std::vector<double>(x.data(), x.data() + x.size())));
    CHECK(m.score(at_median, 0).value > 0.95);

    const MixtureDensity& f = *m.density();
    if (f.components() == 1) {
        const double mu = f.means()[0](0);
        const double sd = std::sqrt(f.covariances()[0](0, 0));
        CHECK(testing::near(m.score(Eigen::VectorXd::Constant(1, mu + 1.2816 * sd), 0).value, 0.2, 0.02));
    }
}

TEST_CASE("pam variant calibrates every cluster") {
    RngStream rng(35);
    for (double s : {0.8, 0.9, 0.95}) {
        const Eigen::MatrixXd x = testing::gaussian_matrix(120, 2, rng);
        const ToccModel m = fit_pam_tocc_df(x, 3, s);
        CHECK(m.thresholds().size() == 3);
        const auto preds = predict(m, x);
        std::vector<double> members(3, 0.0), accepted(3, 0.0);
        for (const auto& p : preds) {
            REQUIRE(p.cluster.has_value());
            members[static_cast<std::size_t>(*p.cluster)] += 1.0;
            accepted[static_cast<std::size_t>(*p.cluster)] += p.accepted ? 1.0 : 0.0;
        }
        for (std::size_t k = 0; k < 3; ++k) CHECK(accepted[k] / members[k] >= s);
    }
}

TEST_CASE("pam variant with one cluster uses the 1-medoid") {
    RngStream rng(36);
    const Eigen::MatrixXd x = testing::gaussian_matrix(30, 2, rng);
    const ToccModel m = fit_pam_tocc_df(x, 1, 0.9);
    const PamResult r = pam(x, 1);
    CHECK(m.prototypes().row(0) == x.row(r.medoids[0]));
}

TEST_CASE("prototype is accepted and far points are rejected") {
    RngStream rng(37);
    const Eigen::MatrixXd x = testing::gaussian_matrix(80, 2, rng);
    const double range = (x.colwise().maxCoeff() - x.colwise().minCoeff()).maxCoeff();
    const Eigen::VectorXd far = (x.colwise().maxCoeff().array() + 10.0 * range).transpose();
    for (const ToccModel& m : {fit_tocc_df(x, 0.9), fit_pam_tocc_df(x, 2, 0.9), fit_tocc_db(x, 0.9, quick_db(2))}) {
        for (Eigen::Index k = 0; k < m.prototype_count(); ++k) {
            const Eigen::VectorXd proto = m.prototypes().row(k).transpose();
            CHECK(m.score(proto, k).value == 1.0);
        }
        const Prediction pf = predict_one(m, far);
        CHECK(pf.score == 0.0);
        CHECK_FALSE(pf.accepted);
    }
}

TEST_CASE("pam variant beats the single prototype when non-targets sit between clusters") {
    RngStream rng(38);
    const Eigen::MatrixXd target = two_blobs(rng, 100);
    Eigen::MatrixXd between = 0.5 * testing::gaussian_matrix(100, 2, rng);
    const ToccModel single = fit_tocc_df(target, 0.9);
    const ToccModel split = fit_pam_tocc_df(target, 2, 0.9);
    const double spec_single = 1.0 - accept_rate(predict(single, between));
    const double spec_split = 1.0 - accept_rate(predict(split, between));
    CHECK(spec_split > spec_single);
    CHECK(accept_rate(predict(split, target)) >= 0.9);
}

TEST_CASE("threshold monotone in s and accepted sets nested") {
    RngStream rng(39);
    const Eigen::MatrixXd x = testing::gaussian_matrix(100, 2, rng);
    const ToccModel lo = fit_tocc_df(x, 0.8);
    const ToccModel hi = fit_tocc_df(x, 0.95);
    CHECK(lo.thresholds()[0] >= hi.thresholds()[0]);
    const auto a = predict(lo, x);
    const auto b = predict(hi, x);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].accepted) CHECK(b[i].accepted);
}

TEST_CASE("row permutation leaves scores unchanged") {
    RngStream rng(40);
    const Eigen::MatrixXd x = testing::gaussian_matrix(60, 2, rng);
    const Eigen::MatrixXd flipped = x.colwise().reverse();
    const Eigen::MatrixXd queries = testing::gaussian_matrix(20, 2, rng);
    const auto a = predict(fit_tocc_df(x, 0.9), queries);
    const auto b = predict(fit_tocc_df(flipped, 0.9), queries);
    const auto c = predict(fit_pam_tocc_df(x, 3, 0.9), queries);
    const auto d = predict(fit_pam_tocc_df(flipped, 3, 0.9), queries);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(testing::near(a[i].score, b[i].score, 1e-12));
        CHECK(c[i].score == d[i].score);
        CHECK(c[i].cluster == d[i].cluster);
    }
}

TEST_CASE("db predictions are deterministic") {
    RngStream rng(41);
    const Eigen::MatrixXd x = testing::gaussian_matrix(100, 2, rng);
    const ToccModel m = fit_tocc_db(x, 0.9, quick_db(8));
    const auto a = predict(m, x);
    const auto b = predict(m, x);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].score == b[i].score);
}

TEST_CASE("glass windows in two low-variance components reject about a tenth") {
    const DataMatrix glass = load_uci_glass(TOCC_DATA_DIR "/glass.data").rows_with(RowLabel::target);
    const PcaReduction red = pca_reduce(glass.values(), 2);
    const ToccModel m = fit_tocc_df(red.reduced, 0.9);
    const double rejected = 1.0 - accept_rate(predict(m, red.reduced));
    CHECK(rejected > 0.0);
    CHECK(rejected <= 0.1);
}

TEST_CASE("pam variant on glass with four clusters") {
    const DataMatrix glass = load_uci_glass(TOCC_DATA_DIR "/glass.data").rows_with(RowLabel::target);
    const ToccModel m = fit_pam_tocc_df(glass.select_features(std::vector<std::string>{"Si", "Mg"}).values(), 4, 0.9);
    CHECK(m.thresholds().size() == 4);
    CHECK(m.reference_sets().size() == 4);
}

TEST_CASE("fitting errors") {
    const Eigen::MatrixXd small = Eigen::MatrixXd::Random(4, 2);
    CHECK_THROWS_AS(fit_tocc_df(small, 0.9), InvalidArgument);
    CHECK_THROWS_AS(fit_tocc_df(Eigen::MatrixXd::Constant(20, 2, 3.0), 0.9), DegenerateData);
    RngStream rng(42);
    const Eigen::MatrixXd x = testing::gaussian_matrix(20, 2, rng);
    CHECK_THROWS_AS(fit_tocc_df(x, 1.0), InvalidArgument);
    CHECK_THROWS_AS(fit_tocc_df(x, 0.0), InvalidArgument);

    Eigen::MatrixXd lonely = 0.1 * testing::gaussian_matrix(20, 2, rng);
    lonely.row(0) << 100.0, 100.0;
    CHECK_THROWS_WITH_AS(fit_pam_tocc_df(lonely, 2, 0.9), doctest::Contains("smaller K"), DegenerateData);
    const std::vector<double> wrong{0.9, 0.9, 0.9};
    CHECK_THROWS_AS(fit_pam_tocc_df(x, 2, wrong), InvalidArgument);

    const ToccModel m = fit_tocc_df(x, 0.9);
    CHECK_THROWS_AS(predict(m, Eigen::MatrixXd::Zero(2, 3)), InvalidArgument);
}
