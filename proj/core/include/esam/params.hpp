#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace esam {

/// Hard upper bound on any array dimension (write-assist yield limit).
inline constexpr std::size_t kMaxArrayDim = 128;
/// Only four read bitlines fit the pitch of the widest cell.
inline constexpr int kMaxReadPorts = 4;

/// SRAM cell flavour. read_ports = 0 is the 6T baseline whose single RW
/// port is shared by inference and learning; 1..4 are the 1RW+pR cells
/// with p decoupled row-wise read ports.
struct CellVariant {
    int read_ports = 0;

    /// Accepts "1rw", "1rw1r", "1rw2r", "1rw3r", "1rw4r".
    static CellVariant from_name(std::string_view name);
    std::string name() const;
    /// Human-readable label, e.g. "1RW+4R".
    std::string label() const;

    bool is_baseline() const { return read_ports == 0; }
    /// Rows that can be read per cycle for inference.
    int inference_ports() const { return read_ports == 0 ? 1 : read_ports; }
    /// Every variant keeps the column-wise RW port.
    static constexpr bool has_transposed_rw() { return true; }

    auto operator<=>(const CellVariant&) const = default;
};

std::vector<CellVariant> all_variants();

/// Per-cell-variant timing, energy and area scalars.
struct VariantParams {
    int read_ports = 0;
    double arbiter_stage_ns = 0;
    double sram_neuron_stage_ns = 0;
    double area_multiplier = 0;
    double read_energy_per_port_access_pj = 0;      // one cell bit on one read port
    double arbiter_energy_per_cycle_pj = 0;         // one p-port arbiter, one active cycle
    double neuron_accumulate_energy_per_bit_pj = 0; // one valid bit into one neuron
    double fire_compare_energy_pj = 0;              // one V_mem >= V_th compare
    double transposed_read_cycle_energy_pj = 0;
    double transposed_write_cycle_energy_pj = 0;
    double leakage_power_mw = 0;

    bool operator==(const VariantParams&) const = default;
};

struct ArrayLimits {
    std::size_t max_rows = kMaxArrayDim;
    std::size_t max_cols = kMaxArrayDim;
    int col_mux_factor = 4;

    bool operator==(const ArrayLimits&) const = default;
};

struct PipelineParams {
    int drain_cycles = 1; // 2-stage pipeline flush after the last grant
    int fire_cycles = 1;  // compare + handoff to the next tile

    bool operator==(const PipelineParams&) const = default;
};

struct ArbiterParams {
    std::size_t base_width = 16; // 0 selects the flat priority encoder
    double tree_area_overhead = 0.08;
    double area_per_port_row_um2 = 0;

    bool operator==(const ArbiterParams&) const = default;
};

struct NeuronParams {
    int vmem_bits = 11;
    double area_um2 = 0;

    bool operator==(const NeuronParams&) const = default;
};

struct AreaParams {
    double base_cell_area_um2 = 0.01512;
    double periphery_overhead = 0;

    bool operator==(const AreaParams&) const = default;
};

/// Immutable calibration for one technology. Built via load_config() or
/// parse_config(), both of which validate every field.
struct HardwareConfig {
    std::string name;
    std::string technology;
    ArrayLimits limits;
    PipelineParams pipeline;
    ArbiterParams arbiter;
    NeuronParams neuron;
    AreaParams area;
    std::map<int, VariantParams> variants; // keyed by read_ports
    std::map<std::string, std::string> notes;

    bool has(CellVariant v) const { return variants.contains(v.read_ports); }
    const VariantParams& at(CellVariant v) const;
    std::vector<CellVariant> variant_list() const;
    double cell_area_um2(CellVariant v) const;

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    bool operator==(const HardwareConfig&) const = default;
};

HardwareConfig parse_config(std::string_view json_text);
HardwareConfig load_config(const std::filesystem::path& path);

/// max(arbiter stage, SRAM + neuron stage) for the variant.
double clock_period_ns(const HardwareConfig& cfg, CellVariant variant);

/// Event ledger of one or more simulated inferences. Every counter is an
/// exact event count; energy is derived from it by the metrics module.
struct SimStats {
    std::uint64_t samples = 0;
    std::vector<std::uint64_t> cycles_per_tile; // summed over samples
    std::uint64_t bottleneck_cycles = 0;        // sum over samples of max tile cycles
    std::uint64_t input_spikes = 0;             // spikes latched into tile request registers
    std::uint64_t total_grants = 0;
    std::vector<std::uint64_t> grants_per_port;
    std::uint64_t arbiter_cycles = 0;   // arbiter-cycles with a pending request
    std::uint64_t total_row_reads = 0;  // row activations, counted per array
    std::uint64_t total_port_reads = 0; // cell bits sensed on read ports
    std::uint64_t total_neuron_adds = 0;
    std::uint64_t total_compares = 0;
    std::uint64_t total_fires = 0;
    std::uint64_t refire_warnings = 0;
    std::uint64_t transposed_read_cycles = 0;
    std::uint64_t transposed_write_cycles = 0;
    double wall_time_ns = 0;

    /// Element-wise sum. Vectors are widened to the longer operand.
    SimStats& merge(const SimStats& other);
    /// Multiplies every counter and the wall time by k.
    SimStats scaled(std::uint64_t k) const;

    bool operator==(const SimStats&) const = default;
};

} // namespace esam
