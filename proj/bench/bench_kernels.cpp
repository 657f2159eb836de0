#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rankfolio/kernels.h"

namespace k = rankfolio::kernels;

namespace {

std::vector<double> random_vector(std::size_t n, double lo, double hi, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Arguments: rows, dim. Mirrors a kNN query against the training block.
template <bool Parallel>
void BM_SquaredDistances(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto dim = static_cast<std::size_t>(state.range(1));
    const auto data = random_vector(rows * dim, -1, 1, 1);
    const auto query = random_vector(dim, -1, 1, 2);
    std::vector<double> out(rows);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::squared_distances(data, dim, query, out);
        } else {
            k::squared_distances_serial(data, dim, query, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * dim));
}

// Arguments: samples, assets. Universal-portfolio wealth update.
template <bool Parallel>
void BM_LogGrowth(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto n = static_cast<std::size_t>(state.range(1));
    const auto samples = random_vector(m * n, 0, 1, 3);
    const auto x = random_vector(n, 0.9, 1.1, 4);
    std::vector<double> lw(m, 0.0);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::accumulate_log_growth(samples, x, lw);
        } else {
            k::accumulate_log_growth_serial(samples, x, lw);
        }
        benchmark::DoNotOptimize(lw.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m * n));
}

// Arguments: rows, dim. Pattern correlations over the history.
template <bool Parallel>
void BM_RowCorrelations(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto dim = static_cast<std::size_t>(state.range(1));
    const auto data = random_vector(rows * dim, 0.9, 1.1, 5);
    const auto query = random_vector(dim, 0.9, 1.1, 6);
    std::vector<double> out(rows);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::row_correlations(data, dim, query, out);
        } else {
            k::row_correlations_serial(data, dim, query, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * dim));
}

// Arguments: batch, in_dim, out_dim. One dense forward pass.
template <bool Parallel>
void BM_DenseForward(benchmark::State& state) {
    const auto batch = static_cast<std::size_t>(state.range(0));
    const auto in_dim = static_cast<std::size_t>(state.range(1));
    const auto out_dim = static_cast<std::size_t>(state.range(2));
    const auto in = random_vector(batch * in_dim, -1, 1, 7);
    const auto w = random_vector(out_dim * in_dim, -1, 1, 8);
    const auto b = random_vector(out_dim, -1, 1, 9);
    std::vector<double> out(batch * out_dim);
    for (auto _ : state) {
        if constexpr (Parallel) {
            k::dense_forward(in, batch, in_dim, w, b, out_dim, out);
        } else {
            k::dense_forward_serial(in, batch, in_dim, w, b, out_dim, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch * in_dim * out_dim));
}

}  // namespace

BENCHMARK(BM_SquaredDistances<false>)->Args({80, 40})->Args({1300, 40})->Args({20000, 64});
BENCHMARK(BM_SquaredDistances<true>)->Args({80, 40})->Args({1300, 40})->Args({20000, 64});
BENCHMARK(BM_LogGrowth<false>)->Args({10000, 10})->Args({100000, 10});
BENCHMARK(BM_LogGrowth<true>)->Args({10000, 10})->Args({100000, 10});
BENCHMARK(BM_RowCorrelations<false>)->Args({1300, 50})->Args({20000, 50});
BENCHMARK(BM_RowCorrelations<true>)->Args({1300, 50})->Args({20000, 50});
BENCHMARK(BM_DenseForward<false>)->Args({80, 40, 20})->Args({4096, 40, 64});
BENCHMARK(BM_DenseForward<true>)->Args({80, 40, 20})->Args({4096, 40, 64});

BENCHMARK_MAIN();
