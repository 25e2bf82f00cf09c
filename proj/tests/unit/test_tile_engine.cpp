#include <doctest.h>

#include "esam/convert.hpp"
#include "esam/error.hpp"
#include "esam/tile_engine.hpp"
#include "oracles.hpp"

using namespace esam;

namespace {

SnnLayer snn_layer(std::size_t rows, std::size_t cols, std::int32_t theta = 0) {
    SnnLayer l;
    l.rows = rows;
    l.cols = cols;
    l.weights.assign(rows, ~BitVector(cols));
    l.thresholds.assign(cols, theta);
    return l;
}

ConvertedModel model_of(const std::vector<std::size_t>& topology) {
    ConvertedModel m;
    for (std::size_t l = 0; l + 1 < topology.size(); ++l) {
        m.layers.push_back(snn_layer(topology[l], topology[l + 1]));
    }
    return m;
}

std::vector<bool> as_bools(const BitVector& v) {
    std::vector<bool> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = v.test(i);
    }
    return out;
}

} // namespace

TEST_CASE("layer mapping") {
    const HardwareConfig cfg = testing::unit_config();
    const Tile big(snn_layer(768, 256), cfg, CellVariant{4}, 16, false);
    CHECK(big.row_block_count() == 6);
    CHECK(big.col_block_count() == 2);
    CHECK(big.array_count() == 12);

    const Tile one(snn_layer(128, 128), cfg, CellVariant{4}, 16, false);
    CHECK(one.array_count() == 1);

    const Tile last(snn_layer(256, 10), cfg, CellVariant{4}, 16, true);
    CHECK(last.array_count() == 2);
    CHECK(last.row_blocks()[0].strips[0].cols() == 10);
}

TEST_CASE("network inventory for 768:256:256:256:10") {
    const HardwareConfig cfg = testing::unit_config();
    const Network net = build_network(model_of({768, 256, 256, 256, 10}), cfg, CellVariant{4});
    const HardwareInventory inv = net.inventory();
    std::size_t cells = 0;
    for (const auto& a : inv.arrays) {
        cells += a.rows * a.cols;
    }
    CHECK(cells == 330240);
    CHECK(inv.arbiter_widths.size() == 12);
    CHECK(inv.neurons == 778);
    CHECK(net.topology() == std::vector<std::size_t>{768, 256, 256, 256, 10});
}

TEST_CASE("seven spikes on four ports drain in two arbitration cycles") {
    const HardwareConfig cfg = testing::unit_config();
    Tile tile(snn_layer(16, 4), cfg, CellVariant{4}, 16, false);
    tile.latch(BitVector::from_indices(16, {0, 2, 3, 5, 8, 13, 15}));
    SimStats stats;

    const StepEvents first = tile.step(stats);
    CHECK(first.grants_per_block == std::vector<std::size_t>{4});
    CHECK(first.residual_per_block == std::vector<std::size_t>{3});
    CHECK(first.granted_rows == std::vector<std::size_t>{0, 2, 3, 5});
    CHECK(first.accumulations == 0); // grants sit in the pipeline register
    CHECK(tile.neurons()[0].v_mem == 0);

    const StepEvents second = tile.step(stats);
    CHECK(second.grants_per_block == std::vector<std::size_t>{3});
    CHECK(second.residual_per_block == std::vector<std::size_t>{0});
    CHECK(second.accumulations == 16);
    CHECK(tile.neurons()[0].v_mem == 4);
    CHECK_FALSE(tile.drained());

    const StepEvents flush = tile.step(stats);
    CHECK_FALSE(flush.arbitrated);
    CHECK(tile.drained());
    CHECK(tile.neurons()[0].v_mem == 7);
    CHECK(stats.total_grants == 7);
    CHECK(stats.arbiter_cycles == 2);
}

TEST_CASE("idle tile does nothing") {
    const HardwareConfig cfg = testing::unit_config();
    Tile tile(snn_layer(16, 4), cfg, CellVariant{2}, 16, false);
    tile.latch(BitVector(16));
    CHECK(tile.drained());
    SimStats stats;
    const StepEvents ev = tile.step(stats);
    CHECK_FALSE(ev.arbitrated);
    CHECK(ev.accumulations == 0);
    CHECK(stats.arbiter_cycles == 0);
}

TEST_CASE("blocks drain in parallel") {
    const HardwareConfig cfg = testing::unit_config();
    Tile tile(snn_layer(256, 8), cfg, CellVariant{4}, 16, false);
    tile.latch(BitVector::from_indices(256, {1, 2, 3, 4, 5, 200}));
    SimStats stats;
    int arbitration = 0;
    while (!tile.drained()) {
        if (tile.step(stats).arbitrated) {
            ++arbitration;
        }
    }
    CHECK(arbitration == 2);
}

TEST_CASE("fire before drain is an invariant violation") {
    const HardwareConfig cfg = testing::unit_config();
    Tile tile(snn_layer(8, 2), cfg, CellVariant{1}, 0, false);
    tile.latch(BitVector::from_indices(8, {1}));
    SimStats stats;
    CHECK_THROWS_AS(tile.fire(stats), InvariantError);
}

TEST_CASE("two-input neuron fires at threshold") {
    const HardwareConfig cfg = testing::unit_config();
    SnnLayer l = snn_layer(2, 1, 1);
    Tile tile(l, cfg, CellVariant{1}, 0, false);
    tile.latch(BitVector::from_string("10"));
    SimStats stats;
    while (!tile.drained()) {
        tile.step(stats);
    }
    CHECK(tile.neurons()[0].v_mem == 1);
    CHECK(tile.fire(stats) == 1);
    CHECK(tile.output_requests().to_string() == "1");
    tile.acknowledge(0);
    CHECK(tile.output_requests().none());
}

TEST_CASE("all-zero input costs only the pipeline constants") {
    const HardwareConfig cfg = testing::unit_config();
    Network net = build_network(model_of({128, 16, 4}), cfg, CellVariant{2});
    const InferenceResult r = run_inference(net, BitVector(128));
    // Every threshold is 0, so tile 0 fires all 16 neurons.
    CHECK(r.tile_cycles[0] == 2);
    CHECK(r.tile_cycles[1] == 2 + 8);
    CHECK(r.output_potentials == std::vector<std::int32_t>{16, 16, 16, 16});
    CHECK(r.predicted_class == 0);
}

TEST_CASE("input width mismatch is rejected") {
    const HardwareConfig cfg = testing::unit_config();
    Network net = build_network(model_of({16, 4, 2}), cfg, CellVariant{1});
    CHECK_THROWS_AS(run_inference(net, BitVector(15)), ValidationError);
}

TEST_CASE("oversized fan-in needs a wider register") {
    HardwareConfig cfg = testing::unit_config();
    cfg.neuron.vmem_bits = 4;
    CHECK_THROWS_AS(Tile(snn_layer(16, 2), cfg, CellVariant{1}, 0, false), ValidationError);
}

TEST_CASE("shipped model agrees with the BNN oracle") {
    const HardwareConfig cfg = load_config(testing::data_dir() / "esam3nm.json");
    const BnnModel bnn = load_bnn(testing::data_dir() / "mnist_bnn.json");
    const SampleSet set = load_samples(testing::data_dir() / "mnist_test.bin");
    Network net = build_network(bnn_to_snn(bnn), cfg, CellVariant{4});
    for (std::size_t i = 0; i < 25; ++i) {
        const auto& s = set.samples[i];
        CHECK(run_inference(net, s.spikes).predicted_class ==
              testing::bnn_forward(bnn, as_bools(s.spikes)));
    }
}

TEST_CASE("single-sample dataset accuracy is 0 or 1") {
    const HardwareConfig cfg = load_config(testing::data_dir() / "esam3nm.json");
    const ConvertedModel m = bnn_to_snn(load_bnn(testing::data_dir() / "mnist_bnn.json"));
    const SampleSet set = load_samples(testing::data_dir() / "mnist_test.bin");
    const Network net = build_network(m, cfg, CellVariant{0});
    const DatasetResult r = run_dataset(net, std::span(set.samples).first(1));
    CHECK((r.accuracy == 0.0 || r.accuracy == 1.0));
    CHECK(r.stats.samples == 1);
}

TEST_CASE("variants change timing but not predictions") {
    const HardwareConfig cfg = load_config(testing::data_dir() / "esam3nm.json");
    const ConvertedModel m = bnn_to_snn(load_bnn(testing::data_dir() / "mnist_bnn.json"));
    const SampleSet set = load_samples(testing::data_dir() / "mnist_test.bin");
    const auto subset = std::span(set.samples).first(40);
    const DatasetResult base = run_dataset(build_network(m, cfg, CellVariant{0}), subset);
    const DatasetResult four = run_dataset(build_network(m, cfg, CellVariant{4}), subset);
    CHECK(base.predictions == four.predictions);
    CHECK(base.stats.bottleneck_cycles > four.stats.bottleneck_cycles);
    CHECK(base.stats.total_port_reads == four.stats.total_port_reads);
}
