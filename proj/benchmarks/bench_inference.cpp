#include <benchmark/benchmark.h>

#include "esam/esam.hpp"

namespace {

struct Fixture {
    esam::HardwareConfig cfg = esam::load_config(ESAM_BENCH_DATA_DIR "/esam3nm.json");
    esam::ConvertedModel model = esam::load_converted(ESAM_BENCH_DATA_DIR "/mnist_snn.json");
    esam::SampleSet samples = esam::load_samples(ESAM_BENCH_DATA_DIR "/mnist_test.bin");
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_Inference(benchmark::State& state) {
    const Fixture& f = fixture();
    const esam::CellVariant v{static_cast<int>(state.range(0))};
    esam::Network net = esam::build_network(f.model, f.cfg, v);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& s = f.samples.samples[i++ % f.samples.samples.size()];
        benchmark::DoNotOptimize(esam::run_inference(net, s.spikes));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Inference)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
