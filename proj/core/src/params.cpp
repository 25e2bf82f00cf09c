#include "esam/params.hpp"

#include <algorithm>

#include "esam/error.hpp"
#include "json_util.hpp"

namespace esam {

namespace {

constexpr std::int64_t kConfigFormatVersion = 1;

VariantParams read_variant(const detail::json& j, std::size_t index) {
    detail::ObjectReader r(j, "variants[" + std::to_string(index) + "]");
    VariantParams v;
    // The range check runs before anything else so that an out-of-range
    // port count is reported as such rather than as a missing field.
    v.read_ports = static_cast<int>(r.integer_in("read_ports", 0, kMaxReadPorts));
    v.arbiter_stage_ns = r.positive("arbiter_stage_ns");
    v.sram_neuron_stage_ns = r.positive("sram_neuron_stage_ns");
    v.area_multiplier = r.positive("area_multiplier");
    v.read_energy_per_port_access_pj = r.positive("read_energy_per_port_access_pj");
    v.arbiter_energy_per_cycle_pj = r.positive("arbiter_energy_per_cycle_pj");
    v.neuron_accumulate_energy_per_bit_pj = r.positive("neuron_accumulate_energy_per_bit_pj");
    v.fire_compare_energy_pj = r.positive("fire_compare_energy_pj");
    v.transposed_read_cycle_energy_pj = r.positive("transposed_read_cycle_energy_pj");
    v.transposed_write_cycle_energy_pj = r.positive("transposed_write_cycle_energy_pj");
    v.leakage_power_mw = r.positive("leakage_power_mw");
    r.finish();
    return v;
}

} // namespace

CellVariant CellVariant::from_name(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    lower.erase(std::remove_if(lower.begin(), lower.end(), [](char c) { return c == '+'; }),
                lower.end());
    if (lower == "1rw") {
        return CellVariant{0};
    }
    if (lower.size() == 5 && lower.starts_with("1rw") && lower[4] == 'r' && lower[3] >= '1' &&
        lower[3] <= '0' + kMaxReadPorts) {
        return CellVariant{lower[3] - '0'};
    }
    throw ValidationError("unknown cell variant '" + std::string(name) +
                          "' (expected 1rw, 1rw1r, 1rw2r, 1rw3r or 1rw4r)");
}

std::string CellVariant::name() const {
    return read_ports == 0 ? "1rw" : "1rw" + std::to_string(read_ports) + "r";
}

std::string CellVariant::label() const {
    return read_ports == 0 ? "1RW" : "1RW+" + std::to_string(read_ports) + "R";
}

std::vector<CellVariant> all_variants() {
    std::vector<CellVariant> out;
    for (int p = 0; p <= kMaxReadPorts; ++p) {
        out.push_back(CellVariant{p});
    }
    return out;
}

const VariantParams& HardwareConfig::at(CellVariant v) const {
    auto it = variants.find(v.read_ports);
    if (it == variants.end()) {
        throw ValidationError("cell variant " + v.label() + " is not present in config '" +
                              name + "'");
    }
    return it->second;
}

std::vector<CellVariant> HardwareConfig::variant_list() const {
    std::vector<CellVariant> out;
    for (const auto& [ports, _] : variants) {
        out.push_back(CellVariant{ports});
    }
    return out;
}

double HardwareConfig::cell_area_um2(CellVariant v) const {
    return area.base_cell_area_um2 * at(v).area_multiplier;
}

void HardwareConfig::validate() const {
    auto bad = [](const std::string& what) { throw ValidationError(what); };
    if (limits.max_rows < 1 || limits.max_rows > kMaxArrayDim) {
        bad("limits.max_rows: " + std::to_string(limits.max_rows) + " outside [1, " +
            std::to_string(kMaxArrayDim) + "]");
    }
    if (limits.max_cols < 1 || limits.max_cols > kMaxArrayDim) {
        bad("limits.max_cols: " + std::to_string(limits.max_cols) + " outside [1, " +
            std::to_string(kMaxArrayDim) + "]");
    }
    if (limits.col_mux_factor < 1) {
        bad("limits.col_mux_factor: must be >= 1");
    }
    if (pipeline.drain_cycles < 0 || pipeline.fire_cycles < 0) {
        bad("pipeline: cycle constants must be non-negative");
    }
    if (arbiter.base_width == 1) {
        bad("arbiter.base_width: must be 0 (flat) or >= 2");
    }
    if (arbiter.tree_area_overhead < 0 || arbiter.area_per_port_row_um2 < 0) {
        bad("arbiter: area figures must be non-negative");
    }
    if (neuron.vmem_bits < 2 || neuron.vmem_bits > 31) {
        bad("neuron.vmem_bits: " + std::to_string(neuron.vmem_bits) + " outside [2, 31]");
    }
    if (neuron.area_um2 < 0 || area.periphery_overhead < 0) {
        bad("area: overheads must be non-negative");
    }
    if (!(area.base_cell_area_um2 > 0)) {
        bad("area.base_cell_area_um2: must be strictly positive");
    }
    if (variants.empty()) {
        bad("variants: at least one cell variant is required");
    }
    for (const auto& [ports, v] : variants) {
        const std::string where = "variants[" + CellVariant{ports}.name() + "]";
        if (ports != v.read_ports || ports < 0 || ports > kMaxReadPorts) {
            bad(where + ".read_ports: " + std::to_string(v.read_ports) + " outside [0, " +
                std::to_string(kMaxReadPorts) + "]");
        }
        for (double x : {v.arbiter_stage_ns, v.sram_neuron_stage_ns, v.area_multiplier,
                         v.read_energy_per_port_access_pj, v.arbiter_energy_per_cycle_pj,
                         v.neuron_accumulate_energy_per_bit_pj, v.fire_compare_energy_pj,
                         v.transposed_read_cycle_energy_pj, v.transposed_write_cycle_energy_pj,
                         v.leakage_power_mw}) {
            if (!(x > 0)) {
                bad(where + ": all times, energies and areas must be strictly positive");
            }
        }
    }
}

HardwareConfig parse_config(std::string_view json_text) {
    const detail::json root = detail::parse_json(json_text, "config");
    detail::ObjectReader r(root, "config");

    const auto version = r.integer("format_version");
    if (version != kConfigFormatVersion) {
        r.fail("unsupported format_version " + std::to_string(version));
    }

    HardwareConfig cfg;
    cfg.name = r.string("name");
    cfg.technology = r.string("technology");

    {
        detail::ObjectReader lr(r.raw("limits"), "config.limits");
        cfg.limits.max_rows =
            static_cast<std::size_t>(lr.integer_in("max_rows", 1, static_cast<std::int64_t>(kMaxArrayDim)));
        cfg.limits.max_cols =
            static_cast<std::size_t>(lr.integer_in("max_cols", 1, static_cast<std::int64_t>(kMaxArrayDim)));
        cfg.limits.col_mux_factor = static_cast<int>(lr.integer_in("col_mux_factor", 1, 64));
        lr.finish();
    }
    {
        detail::ObjectReader pr(r.raw("pipeline"), "config.pipeline");
        cfg.pipeline.drain_cycles = static_cast<int>(pr.integer_in("drain_cycles", 0, 16));
        cfg.pipeline.fire_cycles = static_cast<int>(pr.integer_in("fire_cycles", 0, 16));
        pr.finish();
    }
    {
        detail::ObjectReader ar(r.raw("arbiter"), "config.arbiter");
        const auto bw = ar.integer_in("base_width", 0, static_cast<std::int64_t>(kMaxArrayDim));
        if (bw == 1) {
            ar.fail("base_width must be 0 (flat) or >= 2");
        }
        cfg.arbiter.base_width = static_cast<std::size_t>(bw);
        cfg.arbiter.tree_area_overhead = ar.non_negative("tree_area_overhead");
        cfg.arbiter.area_per_port_row_um2 = ar.non_negative("area_per_port_row_um2");
        ar.finish();
    }
    {
        detail::ObjectReader nr(r.raw("neuron"), "config.neuron");
        cfg.neuron.vmem_bits = static_cast<int>(nr.integer_in("vmem_bits", 2, 31));
        cfg.neuron.area_um2 = nr.non_negative("area_um2");
        nr.finish();
    }
    {
        detail::ObjectReader ar(r.raw("area"), "config.area");
        cfg.area.base_cell_area_um2 = ar.positive("base_cell_area_um2");
        cfg.area.periphery_overhead = ar.non_negative("periphery_overhead");
        ar.finish();
    }
    {
        const detail::json& vs = r.raw("variants");
        if (!vs.is_array() || vs.empty()) {
            r.fail("variants: expected a non-empty array");
        }
        for (std::size_t i = 0; i < vs.size(); ++i) {
            VariantParams v = read_variant(vs[i], i);
            if (!cfg.variants.emplace(v.read_ports, v).second) {
                r.fail("variants[" + std::to_string(i) + "]: duplicate read_ports " +
                       std::to_string(v.read_ports));
            }
        }
    }
    if (r.has("notes")) {
        const detail::json& notes = r.raw("notes");
        if (!notes.is_object()) {
            r.fail("notes: expected an object of strings");
        }
        for (auto it = notes.begin(); it != notes.end(); ++it) {
            if (!it.value().is_string()) {
                r.fail("notes." + it.key() + ": expected a string");
            }
            cfg.notes.emplace(it.key(), it.value().get<std::string>());
        }
    }
    r.finish();

    cfg.validate();
    return cfg;
}

HardwareConfig load_config(const std::filesystem::path& path) {
    const std::string text = detail::read_text_file(path);
    try {
        return parse_config(text);
    } catch (const ValidationError& e) {
        throw ValidationError(path.filename().string() + ": " + e.what());
    }
}

double clock_period_ns(const HardwareConfig& cfg, CellVariant variant) {
    const VariantParams& v = cfg.at(variant);
    return std::max(v.arbiter_stage_ns, v.sram_neuron_stage_ns);
}

SimStats& SimStats::merge(const SimStats& o) {
    auto add_vec = [](std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
        if (a.size() < b.size()) {
            a.resize(b.size(), 0);
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            a[i] += b[i];
        }
    };
    samples += o.samples;
    add_vec(cycles_per_tile, o.cycles_per_tile);
    bottleneck_cycles += o.bottleneck_cycles;
    input_spikes += o.input_spikes;
    total_grants += o.total_grants;
    add_vec(grants_per_port, o.grants_per_port);
    arbiter_cycles += o.arbiter_cycles;
    total_row_reads += o.total_row_reads;
    total_port_reads += o.total_port_reads;
    total_neuron_adds += o.total_neuron_adds;
    total_compares += o.total_compares;
    total_fires += o.total_fires;
    refire_warnings += o.refire_warnings;
    transposed_read_cycles += o.transposed_read_cycles;
    transposed_write_cycles += o.transposed_write_cycles;
    wall_time_ns += o.wall_time_ns;
    return *this;
}

SimStats SimStats::scaled(std::uint64_t k) const {
    SimStats s = *this;
    s.samples *= k;
    for (auto& c : s.cycles_per_tile) {
        c *= k;
    }
    s.bottleneck_cycles *= k;
    s.input_spikes *= k;
    s.total_grants *= k;
    for (auto& g : s.grants_per_port) {
        g *= k;
    }
    s.arbiter_cycles *= k;
    s.total_row_reads *= k;
    s.total_port_reads *= k;
    s.total_neuron_adds *= k;
    s.total_compares *= k;
    s.total_fires *= k;
    s.refire_warnings *= k;
    s.transposed_read_cycles *= k;
    s.transposed_write_cycles *= k;
    s.wall_time_ns *= static_cast<double>(k);
    return s;
}

} // namespace esam
