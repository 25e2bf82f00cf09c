#include "esam/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "esam/error.hpp"
#include "json_util.hpp"

namespace esam {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

detail::ordered_json energy_json(const EnergyBreakdown& e) {
    detail::ordered_json j;
    j["arbiter_pj"] = e.arbiter_pj;
    j["port_read_pj"] = e.port_read_pj;
    j["neuron_accumulate_pj"] = e.neuron_accumulate_pj;
    j["fire_compare_pj"] = e.fire_compare_pj;
    j["transposed_pj"] = e.transposed_pj;
    j["leakage_pj"] = e.leakage_pj;
    j["total_pj"] = e.total_pj();
    return j;
}

} // namespace

EnergyBreakdown EnergyBreakdown::scaled(double k) const {
    return {arbiter_pj * k,      port_read_pj * k, neuron_accumulate_pj * k,
            fire_compare_pj * k, transposed_pj * k, leakage_pj * k};
}

EnergyBreakdown energy_of_run(const SimStats& stats, const HardwareConfig& cfg, CellVariant variant) {
    const VariantParams& v = cfg.at(variant);
    EnergyBreakdown e;
    e.arbiter_pj = static_cast<double>(stats.arbiter_cycles) * v.arbiter_energy_per_cycle_pj;
    e.port_read_pj = static_cast<double>(stats.total_port_reads) * v.read_energy_per_port_access_pj;
    e.neuron_accumulate_pj =
        static_cast<double>(stats.total_neuron_adds) * v.neuron_accumulate_energy_per_bit_pj;
    e.fire_compare_pj = static_cast<double>(stats.total_compares) * v.fire_compare_energy_pj;
    e.transposed_pj =
        static_cast<double>(stats.transposed_read_cycles) * v.transposed_read_cycle_energy_pj +
        static_cast<double>(stats.transposed_write_cycles) * v.transposed_write_cycle_energy_pj;
    // mW x ns = pJ
    e.leakage_pj = v.leakage_power_mw * stats.wall_time_ns;
    return e;
}

double throughput(std::span<const double> per_tile_cycles, double clock_period_ns) {
    if (per_tile_cycles.empty()) {
        throw ValidationError("throughput: no tile cycle counts");
    }
    const double bottleneck = *std::max_element(per_tile_cycles.begin(), per_tile_cycles.end());
    if (!(bottleneck > 0) || !(clock_period_ns > 0)) {
        throw ValidationError("throughput: bottleneck cycles and clock period must be positive");
    }
    return 1.0 / (bottleneck * clock_period_ns * 1e-9);
}

double throughput(std::span<const double> per_tile_cycles, const HardwareConfig& cfg,
                  CellVariant variant) {
    return throughput(per_tile_cycles, clock_period_ns(cfg, variant));
}

AreaBreakdown area_estimate(const HardwareInventory& inventory, const HardwareConfig& cfg,
                            CellVariant variant) {
    AreaBreakdown a;
    const double cell = cfg.cell_area_um2(variant);
    for (const ArrayShape& s : inventory.arrays) {
        a.cell_array_um2 += static_cast<double>(s.rows * s.cols) * cell;
    }
    a.periphery_um2 = a.cell_array_um2 * cfg.area.periphery_overhead;

    const double tree = cfg.arbiter.base_width > 0 ? 1.0 + cfg.arbiter.tree_area_overhead : 1.0;
    for (std::size_t width : inventory.arbiter_widths) {
        a.arbiter_um2 += static_cast<double>(width) * variant.inference_ports() *
                         cfg.arbiter.area_per_port_row_um2 * tree;
    }
    a.neuron_um2 = static_cast<double>(inventory.neurons) * cfg.neuron.area_um2;
    a.arrays = inventory.arrays.size();
    a.arbiters = inventory.arbiter_widths.size();
    return a;
}

AreaBreakdown area_estimate(const Network& network, const HardwareConfig& cfg, CellVariant variant) {
    return area_estimate(network.inventory(), cfg, variant);
}

LearningLatency learning_latency(const HardwareConfig& cfg, CellVariant variant, std::size_t rows,
                                 std::size_t cols) {
    if (rows < 1 || cols < 1 || rows > cfg.limits.max_rows || cols > cfg.limits.max_cols) {
        throw ValidationError("learning_latency: array " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " outside the configured limits");
    }
    const CellVariant base{0};
    const VariantParams& b = cfg.at(base);
    const VariantParams& v = cfg.at(variant);

    LearningLatency out;
    out.variant = variant;
    out.rows = rows;
    out.cols = cols;
    out.baseline_cycles = 2 * rows;
    out.baseline_time_ns = static_cast<double>(out.baseline_cycles) * clock_period_ns(cfg, base);
    out.baseline_energy_pj =
        static_cast<double>(rows) * (b.transposed_read_cycle_energy_pj + b.transposed_write_cycle_energy_pj);

    if (variant.is_baseline()) {
        out.cycles = out.baseline_cycles;
        out.time_ns = out.baseline_time_ns;
        out.energy_pj = out.baseline_energy_pj;
        return out;
    }
    const auto mux = static_cast<std::uint64_t>(cfg.limits.col_mux_factor);
    out.cycles = 2 * mux;
    out.time_ns = static_cast<double>(out.cycles) * clock_period_ns(cfg, variant);
    out.energy_pj = static_cast<double>(mux) *
                    (v.transposed_read_cycle_energy_pj + v.transposed_write_cycle_energy_pj);
    return out;
}

double port_speedup(const HardwareConfig& cfg, CellVariant a, CellVariant b) {
    const double rate_a = a.inference_ports() / clock_period_ns(cfg, a);
    const double rate_b = b.inference_ports() / clock_period_ns(cfg, b);
    return rate_b / rate_a;
}

PpaReport make_report(const SimStats& stats, const Network& network, const HardwareConfig& cfg) {
    if (stats.samples == 0 || !(stats.wall_time_ns > 0)) {
        throw ValidationError("make_report: stats contain no simulated inference");
    }
    const CellVariant variant = network.variant();
    const auto n = static_cast<double>(stats.samples);

    PpaReport r;
    r.variant = variant.name();
    r.samples = stats.samples;
    r.clock_period_ns = network.clock_period_ns();
    r.mean_bottleneck_cycles = static_cast<double>(stats.bottleneck_cycles) / n;
    // Each inference occupies the pipeline for its bottleneck tile's cycles.
    r.throughput_inf_per_s = n / (stats.wall_time_ns * 1e-9);

    const EnergyBreakdown total = energy_of_run(stats, cfg, variant);
    r.energy_per_inference = total.scaled(1.0 / n);
    r.energy_per_inference_pj = total.total_pj() / n;
    r.average_power_mw = r.energy_per_inference_pj * r.throughput_inf_per_s * 1e-9;

    for (auto c : stats.cycles_per_tile) {
        r.mean_cycles_per_tile.push_back(static_cast<double>(c) / n);
    }
    for (auto g : stats.grants_per_port) {
        r.port_utilization.push_back(
            stats.arbiter_cycles == 0 ? 0.0
                                      : static_cast<double>(g) / static_cast<double>(stats.arbiter_cycles));
    }
    r.area = area_estimate(network, cfg, variant);
    r.total_area_um2 = r.area.total_um2();
    return r;
}

std::string report_to_json(const PpaReport& r) {
    detail::ordered_json j;
    j["variant"] = r.variant;
    j["samples"] = r.samples;
    j["clock_period_ns"] = r.clock_period_ns;
    j["throughput_inf_per_s"] = r.throughput_inf_per_s;
    j["energy_per_inference_pj"] = r.energy_per_inference_pj;
    j["average_power_mw"] = r.average_power_mw;
    j["total_area_um2"] = r.total_area_um2;
    j["mean_bottleneck_cycles"] = r.mean_bottleneck_cycles;
    j["mean_cycles_per_tile"] = r.mean_cycles_per_tile;
    j["port_utilization"] = r.port_utilization;
    j["energy_per_inference"] = energy_json(r.energy_per_inference);
    detail::ordered_json a;
    a["cell_array_um2"] = r.area.cell_array_um2;
    a["periphery_um2"] = r.area.periphery_um2;
    a["arbiter_um2"] = r.area.arbiter_um2;
    a["neuron_um2"] = r.area.neuron_um2;
    a["arrays"] = r.area.arrays;
    a["arbiters"] = r.area.arbiters;
    j["area"] = a;
    return j.dump(2);
}

std::string report_csv_header() {
    return "variant,samples,clock_period_ns,throughput_inf_per_s,energy_per_inference_pj,"
           "average_power_mw,total_area_um2,mean_bottleneck_cycles,arbiter_pj,port_read_pj,"
           "neuron_accumulate_pj,fire_compare_pj,leakage_pj";
}

std::string report_csv_row(const PpaReport& r) {
    const EnergyBreakdown& e = r.energy_per_inference;
    std::string row = r.variant + "," + std::to_string(r.samples);
    for (double v : {r.clock_period_ns, r.throughput_inf_per_s, r.energy_per_inference_pj,
                     r.average_power_mw, r.total_area_um2, r.mean_bottleneck_cycles, e.arbiter_pj,
                     e.port_read_pj, e.neuron_accumulate_pj, e.fire_compare_pj, e.leakage_pj}) {
        row += "," + fmt(v);
    }
    return row;
}

} // namespace esam
