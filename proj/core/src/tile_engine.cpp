#include "esam/tile_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "esam/error.hpp"

namespace esam {

Tile::Tile(const SnnLayer& layer, const HardwareConfig& cfg, CellVariant variant,
           std::size_t base_width, bool output_tile)
    : inputs_(layer.rows), ports_(variant.inference_ports()), base_width_(base_width),
      output_(output_tile) {
    const std::size_t max_rows = cfg.limits.max_rows;
    const std::size_t max_cols = cfg.limits.max_cols;

    // Every reachable v_mem and the clamped threshold fit the register.
    const auto fan_in = static_cast<std::int64_t>(layer.rows);
    if (required_register_bits(fan_in + 1) > cfg.neuron.vmem_bits) {
        throw ValidationError("fan-in " + std::to_string(fan_in) + " needs a " +
                              std::to_string(required_register_bits(fan_in + 1)) +
                              "-bit V_mem register; config provides " +
                              std::to_string(cfg.neuron.vmem_bits));
    }

    for (std::size_t c = 0; c < layer.cols; c += max_cols) {
        col_offsets_.push_back(c);
        col_widths_.push_back(std::min(max_cols, layer.cols - c));
    }
    for (std::size_t r = 0; r < layer.rows; r += max_rows) {
        RowBlock block;
        block.row_offset = r;
        block.rows = std::min(max_rows, layer.rows - r);
        block.requests = BitVector(block.rows);
        for (std::size_t c = 0; c < col_offsets_.size(); ++c) {
            std::vector<BitVector> rows;
            rows.reserve(block.rows);
            for (std::size_t i = 0; i < block.rows; ++i) {
                rows.push_back(layer.weights[r + i].slice(col_offsets_[c], col_widths_[c]));
            }
            block.strips.push_back(SynapseArray::from_rows(rows, variant, cfg.limits));
        }
        blocks_.push_back(std::move(block));
    }

    // S ranges over [-fan_in, fan_in], so clamping the threshold into
    // [-fan_in, fan_in + 1] leaves every fire decision unchanged.
    neurons_.resize(layer.cols);
    for (std::size_t j = 0; j < layer.cols; ++j) {
        const std::int64_t th = std::clamp<std::int64_t>(layer.thresholds[j], -fan_in, fan_in + 1);
        neurons_[j].v_th = static_cast<std::int32_t>(th);
    }
}

void Tile::reset() {
    for (auto& n : neurons_) {
        n.v_mem = 0;
        n.request = false;
    }
    for (auto& b : blocks_) {
        b.requests.clear();
        b.latched.reset();
    }
}

void Tile::latch(const BitVector& spikes) {
    if (spikes.size() != inputs_) {
        throw ValidationError("tile expects " + std::to_string(inputs_) + " input spikes, got " +
                              std::to_string(spikes.size()));
    }
    for (auto& b : blocks_) {
        b.requests = spikes.slice(b.row_offset, b.rows);
    }
}

StepEvents Tile::step(SimStats& stats) {
    StepEvents ev;
    const auto fan_in = static_cast<std::int32_t>(inputs_);
    if (stats.grants_per_port.size() < static_cast<std::size_t>(ports_)) {
        stats.grants_per_port.resize(static_cast<std::size_t>(ports_), 0);
    }

    // Stage 2: SRAM read + neuron accumulation of last cycle's grants.
    std::vector<PortReadout> readouts;
    std::vector<std::uint8_t> bits;
    std::vector<std::uint8_t> valids;
    for (std::size_t c = 0; c < col_offsets_.size(); ++c) {
        readouts.clear();
        for (auto& b : blocks_) {
            if (!b.latched || b.latched->valid_count() == 0) {
                continue;
            }
            readouts.push_back(b.strips[c].read_rows(*b.latched));
            const std::size_t valid = b.latched->valid_count();
            ev.rows_read += valid;
            ev.accumulations += valid * col_widths_[c];
        }
        if (readouts.empty()) {
            continue;
        }
        for (std::size_t j = 0; j < col_widths_[c]; ++j) {
            bits.clear();
            valids.clear();
            for (const PortReadout& r : readouts) {
                for (std::size_t k = 0; k < r.bits.size(); ++k) {
                    bits.push_back(r.valid[k] && r.bits[k].test(j) ? 1 : 0);
                    valids.push_back(r.valid[k] ? 1 : 0);
                }
            }
            NeuronState& n = neurons_[col_offsets_[c] + j];
            n = accumulate(n, bits, valids);
            if (std::abs(n.v_mem) > fan_in) {
                throw InvariantError("V_mem " + std::to_string(n.v_mem) + " exceeds fan-in " +
                                     std::to_string(fan_in));
            }
        }
    }
    stats.total_row_reads += ev.rows_read;
    stats.total_port_reads += ev.accumulations;
    stats.total_neuron_adds += ev.accumulations;

    // Stage 1: arbitration of the pending requests.
    for (auto& b : blocks_) {
        if (b.requests.none()) {
            b.latched.reset();
            ev.grants_per_block.push_back(0);
            ev.residual_per_block.push_back(0);
            continue;
        }
        ArbiterResult res = arbitrate_with(b.requests, ports_, base_width_);
        ++stats.arbiter_cycles;
        std::size_t granted = 0;
        for (std::size_t k = 0; k < res.valid.size(); ++k) {
            if (!res.valid[k]) {
                continue;
            }
            ++granted;
            ++stats.grants_per_port[k];
            ev.granted_rows.push_back(b.row_offset + *res.granted_row(k));
        }
        stats.total_grants += granted;
        b.requests = res.residual;
        ev.grants_per_block.push_back(granted);
        ev.residual_per_block.push_back(b.requests.popcount());
        ev.arbitrated = ev.arbitrated || granted > 0;
        b.latched = std::move(res);
    }

    for (auto& b : blocks_) {
        for (auto& s : b.strips) {
            s.next_cycle();
        }
    }
    return ev;
}

bool Tile::drained() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const RowBlock& b) {
        return b.requests.none() && (!b.latched || b.latched->valid_count() == 0);
    });
}

std::size_t Tile::fire(SimStats& stats) {
    const bool r_empty = drained();
    if (!r_empty) {
        throw InvariantError("fire requested before the tile drained its requests");
    }
    std::size_t fired = 0;
    for (auto& n : neurons_) {
        const FireResult res = fire_check(n, r_empty);
        n = res.state;
        ++stats.total_compares;
        if (res.fired) {
            ++fired;
            ++stats.total_fires;
        }
        if (res.overlapped_request) {
            ++stats.refire_warnings;
        }
    }
    return fired;
}

BitVector Tile::output_requests() const {
    BitVector out(neurons_.size());
    for (std::size_t j = 0; j < neurons_.size(); ++j) {
        if (neurons_[j].request) {
            out.set(j);
        }
    }
    return out;
}

void Tile::acknowledge(std::size_t neuron) {
    neurons_.at(neuron) = grant_ack(neurons_.at(neuron), true);
}

Network::Network(std::vector<Tile> tiles, CellVariant variant, double clock_period_ns,
                 PipelineParams pipeline)
    : tiles_(std::move(tiles)), variant_(variant), clock_ns_(clock_period_ns),
      pipeline_(pipeline) {
    if (tiles_.empty()) {
        throw ValidationError("network needs at least one tile");
    }
    for (std::size_t t = 1; t < tiles_.size(); ++t) {
        if (tiles_[t].inputs() != tiles_[t - 1].outputs()) {
            throw ValidationError("tile " + std::to_string(t) + " input width does not match tile " +
                                  std::to_string(t - 1) + " neuron count");
        }
    }
}

std::vector<std::size_t> Network::topology() const {
    std::vector<std::size_t> t{tiles_.front().inputs()};
    for (const auto& tile : tiles_) {
        t.push_back(tile.outputs());
    }
    return t;
}

HardwareInventory Network::inventory() const {
    HardwareInventory inv;
    for (const auto& tile : tiles_) {
        for (const auto& b : tile.row_blocks()) {
            inv.arbiter_widths.push_back(b.rows);
            for (const auto& s : b.strips) {
                inv.arrays.push_back({s.rows(), s.cols()});
            }
        }
        inv.neurons += tile.outputs();
    }
    return inv;
}

void Network::reset() {
    for (auto& t : tiles_) {
        t.reset();
    }
}

Network build_network(const ConvertedModel& model, const HardwareConfig& cfg, CellVariant variant,
                      std::optional<std::size_t> base_width) {
    model.validate();
    const std::size_t width = base_width.value_or(cfg.arbiter.base_width);
    if (width == 1) {
        throw ValidationError("arbiter base width must be 0 (flat) or >= 2");
    }
    std::vector<Tile> tiles;
    tiles.reserve(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        tiles.emplace_back(model.layers[l], cfg, variant, width, l + 1 == model.layers.size());
    }
    return Network(std::move(tiles), variant, clock_period_ns(cfg, variant), cfg.pipeline);
}

InferenceResult run_inference(Network& network, const BitVector& input_spikes) {
    if (input_spikes.size() != network.input_width()) {
        throw ValidationError("input has " + std::to_string(input_spikes.size()) +
                              " spikes; network expects " + std::to_string(network.input_width()));
    }
    network.reset();
    auto& tiles = network.tiles();
    const auto constant_cycles =
        static_cast<std::uint64_t>(network.pipeline().drain_cycles + network.pipeline().fire_cycles);

    InferenceResult out;
    out.stats.samples = 1;
    BitVector requests = input_spikes;
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        Tile& tile = tiles[t];
        const std::uint64_t grants_before = out.stats.total_grants;
        out.stats.input_spikes += requests.popcount();
        tile.latch(requests);

        std::uint64_t arbitration_cycles = 0;
        while (!tile.drained()) {
            const StepEvents ev = tile.step(out.stats);
            if (ev.arbitrated) {
                ++arbitration_cycles;
            }
            if (t > 0) {
                for (std::size_t row : ev.granted_rows) {
                    tiles[t - 1].acknowledge(row);
                }
            }
        }
        if (out.stats.total_grants - grants_before != requests.popcount()) {
            throw InvariantError("tile " + std::to_string(t) + " granted " +
                                 std::to_string(out.stats.total_grants - grants_before) + " of " +
                                 std::to_string(requests.popcount()) + " spikes");
        }
        if (t > 0 && tiles[t - 1].output_requests().any()) {
            throw InvariantError("tile " + std::to_string(t - 1) + " still has ungranted spike requests");
        }
        out.tile_cycles.push_back(arbitration_cycles + constant_cycles);

        if (!tile.is_output()) {
            tile.fire(out.stats);
            requests = tile.output_requests();
        }
    }

    const Tile& last = tiles.back();
    out.output_potentials.reserve(last.outputs());
    for (const auto& n : last.neurons()) {
        out.output_potentials.push_back(n.v_mem);
    }
    out.predicted_class = static_cast<int>(
        std::max_element(out.output_potentials.begin(), out.output_potentials.end()) -
        out.output_potentials.begin());

    out.stats.cycles_per_tile = out.tile_cycles;
    out.stats.bottleneck_cycles = *std::max_element(out.tile_cycles.begin(), out.tile_cycles.end());
    out.stats.wall_time_ns = static_cast<double>(out.stats.bottleneck_cycles) * network.clock_period_ns();
    return out;
}

DatasetResult run_dataset(const Network& network, std::span<const Sample> samples, int jobs) {
    std::vector<InferenceResult> results(samples.size());

    auto worker = [&](std::atomic<std::size_t>& next) {
        Network local = network;
        for (std::size_t i = next.fetch_add(1); i < samples.size(); i = next.fetch_add(1)) {
            results[i] = run_inference(local, samples[i].spikes);
        }
    };

    std::atomic<std::size_t> next{0};
    const std::size_t threads =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                                std::max<std::size_t>(samples.size(), 1));
    if (threads == 1) {
        worker(next);
    } else {
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                try {
                    worker(next);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                    next.store(samples.size());
                }
            });
        }
        pool.clear();
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    DatasetResult out;
    out.predictions.reserve(samples.size());
    out.tile_cycles.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.predictions.push_back(results[i].predicted_class);
        out.tile_cycles.push_back(results[i].tile_cycles);
        if (results[i].predicted_class == static_cast<int>(samples[i].label)) {
            ++out.correct;
        }
        out.stats.merge(results[i].stats);
    }
    out.accuracy = samples.empty() ? 0.0
                                   : static_cast<double>(out.correct) / static_cast<double>(samples.size());
    return out;
}

} // namespace esam
