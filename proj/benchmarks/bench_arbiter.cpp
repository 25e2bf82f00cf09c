#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "esam/arbiter.hpp"

namespace {

std::vector<esam::BitVector> request_set(std::size_t n, double density) {
    std::mt19937_64 rng(42);
    std::bernoulli_distribution d(density);
    std::vector<esam::BitVector> out;
    for (int k = 0; k < 256; ++k) {
        esam::BitVector v(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (d(rng)) {
                v.set(i);
            }
        }
        out.push_back(v);
    }
    return out;
}

void BM_ArbitrateFlat(benchmark::State& state) {
    const auto reqs = request_set(128, 0.1);
    const int ports = static_cast<int>(state.range(0));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(esam::arbitrate(reqs[i++ & 255], ports));
    }
}
BENCHMARK(BM_ArbitrateFlat)->DenseRange(1, 4);

void BM_ArbitrateTree(benchmark::State& state) {
    const auto reqs = request_set(128, 0.1);
    const int ports = static_cast<int>(state.range(0));
    const auto base = static_cast<std::size_t>(state.range(1));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(esam::arbitrate_tree(reqs[i++ & 255], ports, base));
    }
}
BENCHMARK(BM_ArbitrateTree)->ArgsProduct({{1, 4}, {8, 16, 32}});

} // namespace
