#include <benchmark/benchmark.h>

#include <limits>

#include <tocc/classifier.hpp>
#include <tocc/density.hpp>
#include <tocc/featsel.hpp>
#include <tocc/numcore.hpp>
#include <tocc/pam.hpp>
#include <tocc/transvariation.hpp>

using namespace tocc;

namespace {

Eigen::MatrixXd normal_data(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
    RngStream rng(seed);
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    return x;
}

} // namespace

static void BM_MultivariateTp(benchmark::State& state) {
    const Eigen::MatrixXd x = normal_data(state.range(0), 2, 1);
    const Eigen::VectorXd m = spatial_median(x);
    const Eigen::Vector2d c(0.7, -0.4);
    for (auto _ : state) benchmark::DoNotOptimize(multivariate_tp(x, c, m).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MultivariateTp)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_SpatialMedian(benchmark::State& state) {
    const Eigen::MatrixXd x = normal_data(state.range(0), 3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(spatial_median(x));
}
BENCHMARK(BM_SpatialMedian)->Arg(100)->Arg(1000);

static void BM_Pam(benchmark::State& state) {
    const Eigen::MatrixXd x = normal_data(state.range(0), 2, 3);
    for (auto _ : state) benchmark::DoNotOptimize(pam(x, 4).total_cost);
}
BENCHMARK(BM_Pam)->Arg(100)->Arg(500);

static void BM_FitGmm(benchmark::State& state) {
    Eigen::MatrixXd x = normal_data(500, 2, 4);
    x.topRows(200).array() += 3.0;
    GmmConfig cfg;
    cfg.max_components = static_cast<int>(state.range(0));
    for (auto _ : state) {
        RngStream rng(5);
        benchmark::DoNotOptimize(fit_gmm(x, cfg, rng).bic);
    }
}
BENCHMARK(BM_FitGmm)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_OrthantProbability(benchmark::State& state) {
    OrthantIntegrator in;
    in.mc_samples = static_cast<std::size_t>(state.range(0));
    const OrthantEvaluator ev(MixtureDensity::standard_normal(2), in);
    const double inf = std::numeric_limits<double>::infinity();
    for (auto _ : state) benchmark::DoNotOptimize(ev.probability(Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(inf, inf)));
}
BENCHMARK(BM_OrthantProbability)->Arg(10000)->Arg(100000);

static void BM_RpSelect(benchmark::State& state) {
    const Eigen::MatrixXd x = normal_data(90, 9, 6);
    for (auto _ : state) benchmark::DoNotOptimize(rp_select(x, 2, 101, static_cast<int>(state.range(0)), RngStream(7)));
}
BENCHMARK(BM_RpSelect)->Arg(1)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_FitToccDf(benchmark::State& state) {
    const Eigen::MatrixXd x = normal_data(state.range(0), 2, 8);
    for (auto _ : state) benchmark::DoNotOptimize(fit_tocc_df(x, 0.9).thresholds());
}
BENCHMARK(BM_FitToccDf)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
