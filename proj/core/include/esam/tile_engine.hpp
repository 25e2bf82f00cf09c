#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "esam/arbiter.hpp"
#include "esam/bit_vector.hpp"
#include "esam/convert.hpp"
#include "esam/dataset.hpp"
#include "esam/memory.hpp"
#include "esam/neuron.hpp"
#include "esam/params.hpp"

namespace esam {

/// Up to max_rows consecutive inputs of a layer: one request register,
/// one p-port arbiter and one synapse array per column block.
struct RowBlock {
    std::size_t row_offset = 0;
    std::size_t rows = 0;
    BitVector requests;
    std::vector<SynapseArray> strips;
    std::optional<ArbiterResult> latched; // Arbiter -> SRAM+Neuron pipeline register
};

/// What happened in one clock cycle of a tile.
struct StepEvents {
    std::vector<std::size_t> grants_per_block;
    std::vector<std::size_t> residual_per_block;
    std::vector<std::size_t> granted_rows; // tile input indices granted this cycle
    std::size_t rows_read = 0;             // row activations, counted per array
    std::size_t accumulations = 0;         // valid bits delivered to neurons
    bool arbitrated = false;               // at least one grant was issued
};

/// Hardware for one fully connected layer.
class Tile {
public:
    Tile(const SnnLayer& layer, const HardwareConfig& cfg, CellVariant variant,
         std::size_t base_width, bool output_tile);

    std::size_t inputs() const { return inputs_; }
    std::size_t outputs() const { return neurons_.size(); }
    std::size_t row_block_count() const { return blocks_.size(); }
    std::size_t col_block_count() const { return col_offsets_.size(); }
    std::size_t array_count() const { return blocks_.size() * col_offsets_.size(); }
    int ports() const { return ports_; }
    bool is_output() const { return output_; }
    std::size_t fan_in() const { return inputs_; }

    const std::vector<RowBlock>& row_blocks() const { return blocks_; }
    const std::vector<NeuronState>& neurons() const { return neurons_; }

    void reset();
    /// Loads the request registers with the incoming spike vector.
    void latch(const BitVector& spikes);
    /// One clock: SRAM read + accumulate for last cycle's grants, then
    /// arbitration of the pending requests.
    StepEvents step(SimStats& stats);
    /// All request registers empty and the pipeline flushed (R_empty).
    bool drained() const;
    /// R_empty-gated compare on every neuron. Returns the number that fired.
    std::size_t fire(SimStats& stats);
    /// r bits of the neuron array.
    BitVector output_requests() const;
    /// Grant handshake from the downstream tile.
    void acknowledge(std::size_t neuron);

private:
    std::size_t inputs_ = 0;
    int ports_ = 1;
    std::size_t base_width_ = 0;
    bool output_ = false;
    std::vector<std::size_t> col_offsets_;
    std::vector<std::size_t> col_widths_;
    std::vector<RowBlock> blocks_;
    std::vector<NeuronState> neurons_;
};

struct ArrayShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

/// Physical resources of a built network, for area reporting.
struct HardwareInventory {
    std::vector<ArrayShape> arrays;
    std::vector<std::size_t> arbiter_widths; // rows served by each arbiter
    std::size_t neurons = 0;
};

class Network {
public:
    Network(std::vector<Tile> tiles, CellVariant variant, double clock_period_ns,
            PipelineParams pipeline);

    std::vector<Tile>& tiles() { return tiles_; }
    const std::vector<Tile>& tiles() const { return tiles_; }
    CellVariant variant() const { return variant_; }
    double clock_period_ns() const { return clock_ns_; }
    const PipelineParams& pipeline() const { return pipeline_; }
    std::size_t input_width() const { return tiles_.front().inputs(); }

    std::vector<std::size_t> topology() const;
    HardwareInventory inventory() const;
    void reset();

private:
    std::vector<Tile> tiles_;
    CellVariant variant_;
    double clock_ns_;
    PipelineParams pipeline_;
};

/// Splits every layer into ceil(in / max_rows) row blocks by
/// ceil(out / max_cols) column blocks. base_width overrides the config's
/// arbiter tree width (0 = flat encoder).
Network build_network(const ConvertedModel& model, const HardwareConfig& cfg, CellVariant variant,
                      std::optional<std::size_t> base_width = std::nullopt);

struct InferenceResult {
    int predicted_class = 0;
    std::vector<std::int32_t> output_potentials;
    std::vector<std::uint64_t> tile_cycles;
    SimStats stats;
};

/// Runs one sample through every tile. Tile cycles are
/// arbitration cycles + drain_cycles + fire_cycles.
InferenceResult run_inference(Network& network, const BitVector& input_spikes);

struct DatasetResult {
    std::size_t correct = 0;
    double accuracy = 0;
    std::vector<int> predictions;
    std::vector<std::vector<std::uint64_t>> tile_cycles; // per sample
    SimStats stats;
};

/// Simulates every sample (on `jobs` threads). Results are merged in sample
/// order, so any job count yields bit-identical output.
DatasetResult run_dataset(const Network& network, std::span<const Sample> samples, int jobs = 1);

} // namespace esam
