#include "minet/arima.hpp"
#include "minet/centrality.hpp"
#include "minet/modularity.hpp"
#include "minet/mutual_info.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace minet;

namespace {

HourWindow random_window(int tickers, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 0.001);
    HourWindow w;
    w.window_index = 1;
    w.prices.resize(60, tickers);
    for (int c = 0; c < tickers; ++c) {
        double p = 100;
        for (int r = 0; r < 60; ++r) w.prices(r, c) = p *= 1 + g(rng);
    }
    return w;
}

MiMatrix random_network(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    MiMatrix m;
    m.window_index = 1;
    m.weights = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m.weights(i, j) = m.weights(j, i) = u(rng);
    return m;
}

void BM_MiMatrix(benchmark::State& state) {
    const HourWindow w = random_window(static_cast<int>(state.range(0)), 1);
    MiOptions opt;
    for (auto _ : state) benchmark::DoNotOptimize(mi_matrix(w, opt));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MiMatrix)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_Betweenness(benchmark::State& state) {
    const MiMatrix m = random_network(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(betweenness_centrality(m));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Betweenness)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

void BM_EigenvectorCentrality(benchmark::State& state) {
    const MiMatrix m = random_network(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(eigenvector_centrality(m));
}
BENCHMARK(BM_EigenvectorCentrality)->Arg(128)->Arg(475)->Unit(benchmark::kMillisecond);

void BM_Modularity(benchmark::State& state) {
    const MiMatrix m = random_network(static_cast<int>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(modularity(m));
}
BENCHMARK(BM_Modularity)->Arg(128)->Arg(475)->Unit(benchmark::kMillisecond);

void BM_ArimaGridSearch(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> y{100.0};
    double e_prev = 0;
    for (int t = 1; t < state.range(0); ++t) {
        const double e = g(rng);
        y.push_back(y.back() + 0.4 * e_prev + e);
        e_prev = e;
    }
    for (auto _ : state) benchmark::DoNotOptimize(grid_search_order(y));
}
BENCHMARK(BM_ArimaGridSearch)->Arg(89)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
