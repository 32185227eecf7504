#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"

#include <tocc/error.hpp>
#include <tocc/eval.hpp>

#include <cmath>
#include <limits>
#include <vector>

using namespace tocc;

namespace {

std::vector<RowLabel> labels(std::size_t targets, std::size_t others) {
    std::vector<RowLabel> out(targets, RowLabel::target);
    out.insert(out.end(), others, RowLabel::non_target);
    return out;
}

} // namespace

TEST_CASE("confusion metrics") {
    const auto truth = labels(2, 2);
    const ConfusionMetrics perfect = confusion_metrics({true, true, false, false}, truth);
    CHECK(*perfect.sensitivity == 1.0);
    CHECK(*perfect.specificity == 1.0);
    const ConfusionMetrics all = confusion_metrics({true, true, true, true}, truth);
    CHECK(*all.sensitivity == 1.0);
    CHECK(*all.specificity == 0.0);

    // 87 windows with 78 accepted, 51 others with 3 accepted.
    std::vector<bool> acc(138, false);
    for (int i = 0; i < 78; ++i) acc[static_cast<std::size_t>(i)] = true;
    for (int i = 87; i < 90; ++i) acc[static_cast<std::size_t>(i)] = true;
    const ConfusionMetrics glass = confusion_metrics(acc, labels(87, 51));
    CHECK(testing::near(*glass.sensitivity, 78.0 / 87.0, 1e-15));
    CHECK(testing::near(*glass.specificity, 48.0 / 51.0, 1e-15));
    CHECK(testing::near(*glass.specificity, 0.941, 5e-4));

    const ConfusionMetrics only = confusion_metrics({true}, labels(1, 0));
    CHECK_FALSE(only.specificity.has_value());
}

TEST_CASE("roc of perfect and uninformative scores") {
    const std::vector<double> sep{0.9, 0.8, 0.7, 0.1, 0.2, 0.3};
    const RocCurve a = roc_curve(sep, labels(3, 3));
    CHECK(a.auc == 1.0);
    CHECK(a.points.front().fpr == 0.0);
    CHECK(a.points.front().threshold == std::numeric_limits<double>::infinity());
    CHECK(a.points.back().tpr == 1.0);
    CHECK(a.points.back().fpr == 1.0);

    const std::vector<double> flat(6, 0.5);
    const RocCurve b = roc_curve(flat, labels(3, 3));
    CHECK(b.auc == 0.5);
    CHECK(b.points.size() == 3);
}

TEST_CASE("roc area equals the rank statistic") {
    RngStream rng(70);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t nt = 1 + rng.index(30);
        const std::size_t nn = 1 + rng.index(30);
        std::vector<double> scores;
        std::vector<double> t, o;
        for (std::size_t i = 0; i < nt; ++i) t.push_back(static_cast<double>(rng.index(10)));
        for (std::size_t i = 0; i < nn; ++i) o.push_back(static_cast<double>(rng.index(10)) - 2.0);
        scores = t;
        scores.insert(scores.end(), o.begin(), o.end());
        const RocCurve c = roc_curve(scores, labels(nt, nn));
        CHECK(testing::near(c.auc, oracle::rank_auc(t, o), 1e-12));
        for (std::size_t k = 1; k < c.points.size(); ++k) {
            CHECK(c.points[k].fpr >= c.points[k - 1].fpr);
            CHECK(c.points[k].tpr >= c.points[k - 1].tpr);
        }
        std::vector<double> warped;
        for (double s : scores) warped.push_back(std::exp(s) * 3.0 + 1.0);
        CHECK(roc_curve(warped, labels(nt, nn)).auc == c.auc);
    }
}

TEST_CASE("roc input errors") {
    const std::vector<double> s{0.1, 0.2};
    CHECK_THROWS_AS(roc_curve(s, labels(2, 0)), InvalidArgument);
    const std::vector<double> bad{0.1, std::nan("")};
    CHECK_THROWS_AS(roc_curve(bad, labels(1, 1)), InvalidArgument);
}

TEST_CASE("summary statistics use type-7 quartiles") {
    const std::vector<double> v{1, 2, 3, 4};
    const SummaryStats s = summarize(v);
    CHECK(s.min == 1.0);
    CHECK(s.q1 == 1.75);
    CHECK(s.median == 2.5);
    CHECK(s.q3 == 3.25);
    CHECK(s.max == 4.0);
    CHECK(s.count == 4);
    CHECK_THROWS(summarize(std::vector<double>{}));
}

TEST_CASE("method names round-trip") {
    for (MethodId id : all_methods()) CHECK(parse_method(to_string(id)) == id);
    CHECK(all_methods().size() == 7);
    CHECK(is_tocc(MethodId::pam_tocc_df));
    CHECK_FALSE(is_tocc(MethodId::kde));
    CHECK_THROWS_AS(parse_method("som"), InvalidArgument);
}

TEST_CASE("benchmark is reproducible and thread independent") {
    BenchmarkConfig cfg;
    cfg.methods = {MethodId::tocc_df, MethodId::pam_tocc_df, MethodId::gauss, MethodId::kmeans};
    cfg.scenario.id = ScenarioId::e;
    cfg.scenario.n_target = 100;
    cfg.replications = 4;
    cfg.seed = 5;
    const BenchmarkReport a = run_benchmark(cfg);
    cfg.threads = 3;
    const BenchmarkReport b = run_benchmark(cfg);
    REQUIRE(a.records.size() == 16);
    REQUIRE(b.records.size() == 16);
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].method == b.records[i].method);
        CHECK(a.records[i].replication == b.records[i].replication);
        CHECK(a.records[i].specificity == b.records[i].specificity);
        CHECK(a.records[i].auc == b.records[i].auc);
        CHECK(a.records[i].error == b.records[i].error);
    }
    CHECK(a.summaries.size() == 4);
    for (const auto& r : a.records) {
        CHECK(r.error.empty());
        CHECK(*r.sensitivity >= 0.9);
    }
}

TEST_CASE("single replication and failures are recorded") {
    BenchmarkConfig cfg;
    cfg.methods = {MethodId::tocc_df, MethodId::pam_tocc_df};
    cfg.scenario.n_target = 12;
    cfg.replications = 1;
    cfg.method.pam_k = 5;
    const BenchmarkReport r = run_benchmark(cfg);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].error.empty());
    CHECK_FALSE(r.records[1].error.empty());
    CHECK(r.summaries[1].failures == 1);
    CHECK_FALSE(r.summaries[1].specificity.has_value());
    CHECK(r.summaries[0].specificity->count == 1);
}
