#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "esam/params.hpp"
#include "esam/tile_engine.hpp"

namespace esam {

/// Energy of a run split by event class, in pJ.
struct EnergyBreakdown {
    double arbiter_pj = 0;
    double port_read_pj = 0;
    double neuron_accumulate_pj = 0;
    double fire_compare_pj = 0;
    double transposed_pj = 0;
    double leakage_pj = 0;

    double total_pj() const {
        return arbiter_pj + port_read_pj + neuron_accumulate_pj + fire_compare_pj + transposed_pj +
               leakage_pj;
    }
    EnergyBreakdown scaled(double k) const;
};

/// Sum of event counts times per-event energies plus leakage x wall time.
/// Linear in every counter of `stats`.
EnergyBreakdown energy_of_run(const SimStats& stats, const HardwareConfig& cfg, CellVariant variant);

/// Steady-state pipelined throughput in inferences per second:
/// 1 / (max per-tile cycles x clock period).
double throughput(std::span<const double> per_tile_cycles, const HardwareConfig& cfg,
                  CellVariant variant);
double throughput(std::span<const double> per_tile_cycles, double clock_period_ns);

struct AreaBreakdown {
    double cell_array_um2 = 0;
    double periphery_um2 = 0;
    double arbiter_um2 = 0; // includes the tree overhead
    double neuron_um2 = 0;
    std::size_t arrays = 0;
    std::size_t arbiters = 0;

    double total_um2() const { return cell_array_um2 + periphery_um2 + arbiter_um2 + neuron_um2; }
};

AreaBreakdown area_estimate(const HardwareInventory& inventory, const HardwareConfig& cfg,
                            CellVariant variant);
AreaBreakdown area_estimate(const Network& network, const HardwareConfig& cfg, CellVariant variant);

/// Cost of reading and rewriting one full synapse column.
struct LearningLatency {
    CellVariant variant;
    std::size_t rows = 0;
    std::size_t cols = 0;
    // Row-by-row update through the 6T array's single RW port.
    std::uint64_t baseline_cycles = 0;
    double baseline_time_ns = 0;
    double baseline_energy_pj = 0;
    // Column update through the transposed port.
    std::uint64_t cycles = 0;
    double time_ns = 0;
    double energy_pj = 0;

    double time_ratio() const { return baseline_time_ns / time_ns; }
    double energy_ratio() const { return baseline_energy_pj / energy_pj; }
};

/// The baseline needs 2 x rows cycles at the 1RW clock; the transposed port
/// needs 2 x col_mux_factor cycles at the variant clock. A 1RW variant has
/// no decoupled inference ports, so its "proposed" figures equal the baseline.
LearningLatency learning_latency(const HardwareConfig& cfg, CellVariant variant, std::size_t rows,
                                 std::size_t cols);

/// Peak spike-consumption rate of b over a: (p_b / clock_b) / (p_a / clock_a).
double port_speedup(const HardwareConfig& cfg, CellVariant a, CellVariant b);

/// Power, performance and area summary of a dataset run.
struct PpaReport {
    std::string variant;
    std::size_t samples = 0;
    double clock_period_ns = 0;
    double throughput_inf_per_s = 0;
    double energy_per_inference_pj = 0;
    double average_power_mw = 0;
    double total_area_um2 = 0;
    double mean_bottleneck_cycles = 0;
    std::vector<double> mean_cycles_per_tile;
    std::vector<double> port_utilization;
    EnergyBreakdown energy_per_inference; // per-event ledger, per inference
    AreaBreakdown area;
};

PpaReport make_report(const SimStats& stats, const Network& network, const HardwareConfig& cfg);

std::string report_to_json(const PpaReport& report);
std::string report_csv_header();
std::string report_csv_row(const PpaReport& report);

} // namespace esam
