#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "esam/esam.hpp"

namespace esam::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

/// Accepts a BNN file (converted on load) or an already converted model.
ConvertedModel load_any_model(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::string kind;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.is_object() && doc.contains("kind") && doc["kind"].is_string()) {
            kind = doc["kind"].get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    if (kind == "bnn") {
        return bnn_to_snn(parse_bnn(text));
    }
    return parse_converted(text);
}

std::vector<Sample> select_samples(const SampleSet& set, const RunManifest& m) {
    std::vector<std::size_t> order(set.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    if (m.shuffle) {
        // Fisher-Yates on raw mt19937_64 output, which is fixed by the standard.
        std::mt19937_64 rng(m.seed);
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng() % i]);
        }
    }
    const std::size_t n = std::min(order.size(), m.limit.value_or(order.size()));
    std::vector<Sample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(set.samples[order[i]]);
    }
    return out;
}

struct VariantRun {
    DatasetResult result;
    PpaReport report;
};

VariantRun run_variant(const HardwareConfig& cfg, const ConvertedModel& model,
                       std::span<const Sample> samples, CellVariant variant, const RunManifest& m) {
    if (samples.empty()) {
        throw ValidationError("no samples selected");
    }
    const Network net = build_network(model, cfg, variant, m.base_width);
    VariantRun run;
    run.result = run_dataset(net, samples, m.jobs);
    run.report = make_report(run.result.stats, net, cfg);
    return run;
}

ordered_json manifest_json(const RunManifest& m) {
    // --jobs is left out on purpose: it must not change any output byte.
    ordered_json j;
    j["config"] = m.config.generic_string();
    j["model"] = m.model.generic_string();
    j["data"] = m.data.generic_string();
    j["variant"] = m.variant;
    j["limit"] = m.limit ? ordered_json(*m.limit) : ordered_json(nullptr);
    j["shuffle"] = m.shuffle;
    j["seed"] = m.seed;
    j["base_width"] = m.base_width ? ordered_json(*m.base_width) : ordered_json(nullptr);
    return j;
}

ordered_json histogram_json(const DatasetResult& r) {
    const std::size_t tiles = r.tile_cycles.empty() ? 0 : r.tile_cycles.front().size();
    ordered_json out = ordered_json::array();
    for (std::size_t t = 0; t < tiles; ++t) {
        std::map<std::uint64_t, std::size_t> counts;
        for (const auto& cycles : r.tile_cycles) {
            ++counts[cycles[t]];
        }
        ordered_json bins = ordered_json::array();
        for (const auto& [cycles, count] : counts) {
            bins.push_back({{"cycles", cycles}, {"count", count}});
        }
        out.push_back({{"tile", t}, {"bins", bins}});
    }
    return out;
}

ordered_json port_table_json(const SimStats& s) {
    ordered_json out = ordered_json::array();
    for (std::size_t p = 0; p < s.grants_per_port.size(); ++p) {
        const double util = s.arbiter_cycles == 0 ? 0.0
                                                  : static_cast<double>(s.grants_per_port[p]) /
                                                        static_cast<double>(s.arbiter_cycles);
        out.push_back({{"port", p}, {"grants", s.grants_per_port[p]}, {"utilization", util}});
    }
    return out;
}

std::string csv_header() { return report_csv_header() + ",accuracy"; }

std::string csv_row(const VariantRun& run) {
    return report_csv_row(run.report) + "," + fmt("%.10g", run.result.accuracy);
}

void print_summary(std::ostream& out, const CellVariant& v, const VariantRun& run) {
    const PpaReport& r = run.report;
    out << v.label() << ": " << r.samples << " samples, accuracy "
        << fmt("%.4f", run.result.accuracy) << ", clock " << fmt("%.3f", r.clock_period_ns)
        << " ns, throughput " << fmt("%.3f", r.throughput_inf_per_s / 1e6) << " M inf/s, energy "
        << fmt("%.2f", r.energy_per_inference_pj) << " pJ/inf, power "
        << fmt("%.3f", r.average_power_mw) << " mW, area " << fmt("%.1f", r.total_area_um2)
        << " um2\n";
}

int cmd_convert(const std::filesystem::path& in, const std::filesystem::path& out_path,
                std::ostream& out) {
    const BnnModel bnn = load_bnn(in);
    const ConvertedModel snn = bnn_to_snn(bnn);
    save_model(out_path, snn);
    out << "layer rows cols theta_min theta_max theta_mean\n";
    for (std::size_t l = 0; l < snn.layers.size(); ++l) {
        const auto& th = snn.layers[l].thresholds;
        const auto [lo, hi] = std::minmax_element(th.begin(), th.end());
        double sum = 0;
        for (auto t : th) {
            sum += t;
        }
        out << l << " " << snn.layers[l].rows << " " << snn.layers[l].cols << " " << *lo << " "
            << *hi << " " << fmt("%.3f", sum / static_cast<double>(th.size())) << "\n";
    }
    out << "wrote " << out_path.string() << "\n";
    return kOk;
}

int cmd_simulate(const RunManifest& m, std::ostream& out) {
    m.check_inputs();
    const HardwareConfig cfg = load_config(m.config);
    const CellVariant variant = CellVariant::from_name(m.variant);
    cfg.at(variant);
    const ConvertedModel model = load_any_model(m.model);
    const SampleSet set = load_samples(m.data);
    const std::vector<Sample> samples = select_samples(set, m);

    const VariantRun run = run_variant(cfg, model, samples, variant, m);

    ordered_json j;
    j["manifest"] = manifest_json(m);
    ordered_json acc;
    acc["samples"] = samples.size();
    acc["correct"] = run.result.correct;
    acc["accuracy"] = run.result.accuracy;
    acc["recorded_bnn_accuracy"] = model.metadata.bnn_accuracy
                                       ? ordered_json(*model.metadata.bnn_accuracy)
                                       : ordered_json(nullptr);
    j["accuracy"] = acc;
    j["report"] = ordered_json::parse(report_to_json(run.report));
    j["tile_cycle_histogram"] = histogram_json(run.result);
    j["port_utilization"] = port_table_json(run.result.stats);
    j["predictions"] = run.result.predictions;

    if (!m.out_json.empty()) {
        write_file(m.out_json, j.dump(2) + "\n");
    }
    if (!m.out_csv.empty()) {
        write_file(m.out_csv, csv_header() + "\n" + csv_row(run) + "\n");
    }
    print_summary(out, variant, run);
    return kOk;
}

int cmd_sweep_ports(const RunManifest& m, std::ostream& out) {
    m.check_inputs();
    const HardwareConfig cfg = load_config(m.config);
    const ConvertedModel model = load_any_model(m.model);
    const SampleSet set = load_samples(m.data);
    const std::vector<Sample> samples = select_samples(set, m);

    std::string csv = csv_header() + "\n";
    ordered_json runs = ordered_json::array();
    for (const CellVariant v : cfg.variant_list()) {
        const VariantRun run = run_variant(cfg, model, samples, v, m);
        csv += csv_row(run) + "\n";
        ordered_json entry;
        entry["accuracy"] = run.result.accuracy;
        entry["report"] = ordered_json::parse(report_to_json(run.report));
        runs.push_back(entry);
        print_summary(out, v, run);
    }
    if (!m.out_csv.empty()) {
        write_file(m.out_csv, csv);
    } else {
        out << csv;
    }
    if (!m.out_json.empty()) {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        j["variants"] = runs;
        write_file(m.out_json, j.dump(2) + "\n");
    }
    return kOk;
}

int cmd_learn_latency(const std::filesystem::path& config_path,
                      const std::vector<std::string>& variant_names, std::optional<std::size_t> rows,
                      std::optional<std::size_t> cols, const std::filesystem::path& out_csv,
                      std::ostream& out) {
    const HardwareConfig cfg = load_config(config_path);
    std::vector<CellVariant> variants;
    for (const auto& name : variant_names) {
        variants.push_back(CellVariant::from_name(name));
    }
    if (variants.empty()) {
        variants = cfg.variant_list();
    }
    const std::size_t r = rows.value_or(cfg.limits.max_rows);
    const std::size_t c = cols.value_or(cfg.limits.max_cols);

    std::string csv = "variant,rows,cols,baseline_cycles,baseline_time_ns,baseline_energy_pj,"
                      "cycles,time_ns,energy_pj,time_ratio,energy_ratio\n";
    for (const CellVariant v : variants) {
        const LearningLatency l = learning_latency(cfg, v, r, c);
        csv += v.name() + "," + std::to_string(r) + "," + std::to_string(c) + "," +
               std::to_string(l.baseline_cycles) + "," + fmt("%.10g", l.baseline_time_ns) + "," +
               fmt("%.10g", l.baseline_energy_pj) + "," + std::to_string(l.cycles) + "," +
               fmt("%.10g", l.time_ns) + "," + fmt("%.10g", l.energy_pj) + "," +
               fmt("%.10g", l.time_ratio()) + "," + fmt("%.10g", l.energy_ratio()) + "\n";
        out << v.label() << " " << r << "x" << c << ": baseline " << l.baseline_cycles
            << " cycles " << fmt("%.1f", l.baseline_time_ns) << " ns "
            << fmt("%.1f", l.baseline_energy_pj) << " pJ; column port " << l.cycles << " cycles "
            << fmt("%.2f", l.time_ns) << " ns " << fmt("%.2f", l.energy_pj) << " pJ ("
            << fmt("%.1f", l.time_ratio()) << "x time, " << fmt("%.1f", l.energy_ratio())
            << "x energy)\n";
    }
    if (!out_csv.empty()) {
        write_file(out_csv, csv);
    }
    return kOk;
}

void add_run_options(CLI::App* cmd, RunManifest& m, bool with_variant) {
    cmd->add_option("--config", m.config, "Hardware config JSON")->required();
    cmd->add_option("--model", m.model, "BNN or converted model JSON")->required();
    cmd->add_option("--data", m.data, "Binarized sample file")->required();
    if (with_variant) {
        cmd->add_option("--variant", m.variant, "1rw, 1rw1r, 1rw2r, 1rw3r or 1rw4r");
    }
    cmd->add_option("--limit", m.limit, "Use only N samples");
    cmd->add_flag("--shuffle", m.shuffle, "Pick the --limit subset at random using --seed");
    cmd->add_option("--seed", m.seed, "Seed for --shuffle");
    cmd->add_option("--jobs", m.jobs, "Worker threads")->check(CLI::Range(1, 1024));
    cmd->add_option("--base-width", m.base_width, "Arbiter tree base width (0 = flat)");
    cmd->add_option("--out-json", m.out_json, "Write the JSON report here");
    cmd->add_option("--out-csv", m.out_csv, "Write the CSV report here");
}

} // namespace

void RunManifest::check_inputs() const {
    for (const auto* p : {&config, &model, &data}) {
        if (!std::filesystem::is_regular_file(*p)) {
            throw IoError("no such file: " + p->string());
        }
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiport-SRAM SNN accelerator simulator and PPA model", "esam"};
    app.require_subcommand(1);

    std::filesystem::path convert_in;
    std::filesystem::path convert_out;
    auto* convert = app.add_subcommand("convert", "Convert a BNN file into a binary SNN model");
    convert->add_option("--model", convert_in, "BNN model JSON")->required();
    convert->add_option("--out", convert_out, "Converted model output path")->required();

    RunManifest sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate a dataset on one cell variant");
    add_run_options(simulate, sim, true);

    RunManifest sweep;
    auto* sweep_cmd = app.add_subcommand("sweep-ports", "Simulate every cell variant in the config");
    add_run_options(sweep_cmd, sweep, false);

    std::filesystem::path ll_config;
    std::vector<std::string> ll_variants;
    std::optional<std::size_t> ll_rows;
    std::optional<std::size_t> ll_cols;
    std::filesystem::path ll_csv;
    auto* learn = app.add_subcommand("learn-latency", "Column read+write cost vs the 6T baseline");
    learn->add_option("--config", ll_config, "Hardware config JSON")->required();
    learn->add_option("--variant", ll_variants, "Variants (default: all in config)");
    learn->add_option("--rows", ll_rows, "Array rows (default: max_rows)");
    learn->add_option("--cols", ll_cols, "Array columns (default: max_cols)");
    learn->add_option("--out-csv", ll_csv, "Write the table as CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        if (*convert) {
            return cmd_convert(convert_in, convert_out, out);
        }
        if (*simulate) {
            return cmd_simulate(sim, out);
        }
        if (*sweep_cmd) {
            return cmd_sweep_ports(sweep, out);
        }
        if (*learn) {
            return cmd_learn_latency(ll_config, ll_variants, ll_rows, ll_cols, ll_csv, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const InvariantError& e) {
        err << "invariant violated: " << e.what() << "\n";
        return kInvariantError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInvariantError;
    }
    return kValidationError;
}

} // namespace esam::cli
