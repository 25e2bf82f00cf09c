#include "esam/convert.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "esam/error.hpp"
#include "json_util.hpp"

namespace esam {

namespace {

constexpr std::int64_t kModelFormatVersion = 1;
constexpr std::string_view kKindBnn = "bnn";
constexpr std::string_view kKindSnn = "binary_snn";

std::string layer_path(std::size_t l) { return "layers[" + std::to_string(l) + "]"; }

template <typename Layer>
std::vector<std::size_t> topology_of(const std::vector<Layer>& layers) {
    std::vector<std::size_t> t;
    if (layers.empty()) {
        return t;
    }
    t.push_back(layers.front().rows);
    for (const auto& l : layers) {
        t.push_back(l.cols);
    }
    return t;
}

template <typename Layer>
void check_chaining(const std::vector<Layer>& layers) {
    if (layers.empty()) {
        throw ValidationError("model has no layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].rows == 0 || layers[l].cols == 0) {
            throw ValidationError(layer_path(l) + ": empty layer");
        }
        if (l > 0 && layers[l].rows != layers[l - 1].cols) {
            throw ValidationError(layer_path(l) + ": " + std::to_string(layers[l].rows) +
                                  " inputs do not match the " + std::to_string(layers[l - 1].cols) +
                                  " outputs of " + layer_path(l - 1));
        }
    }
}

// ---- serialization -------------------------------------------------------

std::string dump_scalar(const detail::json& j) { return j.dump(); }

void write_metadata(std::ostringstream& os, const ModelMetadata& m) {
    detail::ordered_json j = detail::ordered_json::object();
    if (m.bnn_accuracy) {
        j["bnn_accuracy"] = *m.bnn_accuracy;
    }
    if (m.accuracy_samples) {
        j["accuracy_samples"] = *m.accuracy_samples;
    }
    if (m.trainer_seed) {
        j["trainer_seed"] = *m.trainer_seed;
    }
    if (!m.preprocessing.empty()) {
        j["preprocessing"] = m.preprocessing;
    }
    if (!m.description.empty()) {
        j["description"] = m.description;
    }
    os << "  \"metadata\": " << j.dump() << ",\n";
}

void write_header(std::ostringstream& os, std::string_view kind,
                  const std::vector<std::size_t>& topology) {
    os << "{\n  \"format_version\": " << kModelFormatVersion << ",\n";
    os << "  \"kind\": \"" << kind << "\",\n";
    os << "  \"topology\": [";
    for (std::size_t i = 0; i < topology.size(); ++i) {
        os << (i ? ", " : "") << topology[i];
    }
    os << "],\n";
}

template <typename T>
void write_number_list(std::ostringstream& os, const std::vector<T>& values) {
    os << "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << (i ? ", " : "") << dump_scalar(detail::json(values[i]));
    }
    os << "]";
}

// ---- parsing -------------------------------------------------------------

ModelMetadata read_metadata(detail::ObjectReader& root) {
    ModelMetadata m;
    if (!root.has("metadata")) {
        return m;
    }
    detail::ObjectReader r(root.raw("metadata"), "metadata");
    if (r.has("bnn_accuracy")) {
        m.bnn_accuracy = r.number("bnn_accuracy");
    }
    if (r.has("accuracy_samples")) {
        m.accuracy_samples = r.integer("accuracy_samples");
    }
    if (r.has("trainer_seed")) {
        m.trainer_seed = r.integer("trainer_seed");
    }
    if (r.has("preprocessing")) {
        m.preprocessing = r.string("preprocessing");
    }
    if (r.has("description")) {
        m.description = r.string("description");
    }
    r.finish();
    return m;
}

void check_header(detail::ObjectReader& r, std::string_view expected_kind) {
    const auto version = r.integer("format_version");
    if (version != kModelFormatVersion) {
        r.fail("unsupported format_version " + std::to_string(version));
    }
    const std::string kind = r.string("kind");
    if (kind != expected_kind) {
        r.fail("kind is '" + kind + "', expected '" + std::string(expected_kind) + "'");
    }
}

std::vector<std::size_t> read_topology(detail::ObjectReader& r) {
    const detail::json& t = r.raw("topology");
    if (!t.is_array()) {
        r.fail("topology: expected an array");
    }
    std::vector<std::size_t> out;
    for (const auto& v : t) {
        if (!v.is_number_unsigned()) {
            r.fail("topology: entries must be non-negative integers");
        }
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

std::pair<std::size_t, std::size_t> read_dims(detail::ObjectReader& lr) {
    const auto rows = lr.integer_in("rows", 1, 1 << 20);
    const auto cols = lr.integer_in("cols", 1, 1 << 20);
    return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)};
}

const detail::json& read_row_list(detail::ObjectReader& lr, std::string_view key, std::size_t rows,
                                  const std::string& where) {
    const detail::json& w = lr.raw(key);
    if (!w.is_array() || w.size() != rows) {
        throw ValidationError(where + "." + std::string(key) + ": expected " + std::to_string(rows) +
                              " rows");
    }
    return w;
}

} // namespace

// ---- preprocessing ---------------------------------------------------------

bool is_cropped_pixel(std::size_t row, std::size_t col) {
    const auto edge = [](std::size_t x) {
        return x < kCornerCrop || x >= kImageSide - kCornerCrop;
    };
    return edge(row) && edge(col);
}

const std::vector<std::size_t>& kept_pixel_indices() {
    static const std::vector<std::size_t> indices = [] {
        std::vector<std::size_t> v;
        v.reserve(kInputWidth);
        for (std::size_t r = 0; r < kImageSide; ++r) {
            for (std::size_t c = 0; c < kImageSide; ++c) {
                if (!is_cropped_pixel(r, c)) {
                    v.push_back(r * kImageSide + c);
                }
            }
        }
        return v;
    }();
    return indices;
}

BitVector preprocess_image(std::span<const float> pixels) {
    if (pixels.size() != kImagePixels) {
        throw ValidationError("preprocess_image: expected a 28x28 image (784 pixels), got " +
                              std::to_string(pixels.size()));
    }
    const auto& kept = kept_pixel_indices();
    BitVector spikes(kInputWidth);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (pixels[kept[i]] > kSpikeThreshold) {
            spikes.set(i);
        }
    }
    return spikes;
}

// ---- models --------------------------------------------------------------

std::vector<std::size_t> BnnModel::topology() const { return topology_of(layers); }
std::vector<std::size_t> ConvertedModel::topology() const { return topology_of(layers); }

void BnnModel::validate() const {
    check_chaining(layers);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const BnnLayer& layer = layers[l];
        if (layer.weights.size() != layer.rows * layer.cols) {
            throw ValidationError(layer_path(l) + ": weight count does not match rows x cols");
        }
        if (layer.biases.size() != layer.cols) {
            throw ValidationError(layer_path(l) + ": expected " + std::to_string(layer.cols) +
                                  " biases");
        }
        for (std::size_t k = 0; k < layer.weights.size(); ++k) {
            if (layer.weights[k] != 1 && layer.weights[k] != -1) {
                throw ValidationError(layer_path(l) + ".weights[" + std::to_string(k / layer.cols) +
                                      "][" + std::to_string(k % layer.cols) + "]: weight " +
                                      std::to_string(layer.weights[k]) + " is not -1 or +1");
            }
        }
        for (std::size_t j = 0; j < layer.biases.size(); ++j) {
            if (!std::isfinite(layer.biases[j])) {
                throw ValidationError(layer_path(l) + ".biases[" + std::to_string(j) +
                                      "]: bias must be finite");
            }
        }
    }
}

void ConvertedModel::validate() const {
    check_chaining(layers);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const SnnLayer& layer = layers[l];
        if (layer.weights.size() != layer.rows) {
            throw ValidationError(layer_path(l) + ": expected " + std::to_string(layer.rows) +
                                  " weight rows");
        }
        for (std::size_t i = 0; i < layer.rows; ++i) {
            if (layer.weights[i].size() != layer.cols) {
                throw ValidationError(layer_path(l) + ".weights[" + std::to_string(i) + "]: expected " +
                                      std::to_string(layer.cols) + " bits");
            }
        }
        if (layer.thresholds.size() != layer.cols) {
            throw ValidationError(layer_path(l) + ": expected " + std::to_string(layer.cols) +
                                  " thresholds");
        }
    }
}

std::int32_t snn_threshold(std::int64_t weight_sum, double bias) {
    const double t = std::ceil((static_cast<double>(weight_sum) - bias) / 2.0);
    if (!(t >= std::numeric_limits<std::int32_t>::min() && t <= std::numeric_limits<std::int32_t>::max())) {
        throw ValidationError("threshold " + std::to_string(t) + " does not fit a 32-bit register");
    }
    return static_cast<std::int32_t>(t);
}

ConvertedModel bnn_to_snn(const BnnModel& model) {
    model.validate();
    ConvertedModel out;
    out.metadata = model.metadata;
    for (const BnnLayer& in : model.layers) {
        SnnLayer layer;
        layer.rows = in.rows;
        layer.cols = in.cols;
        layer.weights.assign(in.rows, BitVector(in.cols));
        std::vector<std::int64_t> weight_sums(in.cols, 0);
        for (std::size_t i = 0; i < in.rows; ++i) {
            for (std::size_t j = 0; j < in.cols; ++j) {
                const std::int8_t w = in.weight(i, j);
                layer.weights[i].set(j, w > 0);
                weight_sums[j] += w;
            }
        }
        layer.thresholds.reserve(in.cols);
        for (std::size_t j = 0; j < in.cols; ++j) {
            layer.thresholds.push_back(snn_threshold(weight_sums[j], in.biases[j]));
        }
        out.layers.push_back(std::move(layer));
    }
    return out;
}

std::string to_json(const BnnModel& model) {
    model.validate();
    std::ostringstream os;
    write_header(os, kKindBnn, model.topology());
    write_metadata(os, model.metadata);
    os << "  \"layers\": [\n";
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const BnnLayer& layer = model.layers[l];
        os << "    {\n      \"rows\": " << layer.rows << ",\n      \"cols\": " << layer.cols
           << ",\n      \"weights\": [\n";
        for (std::size_t i = 0; i < layer.rows; ++i) {
            os << "        [";
            for (std::size_t j = 0; j < layer.cols; ++j) {
                os << (j ? "," : "") << static_cast<int>(layer.weight(i, j));
            }
            os << "]" << (i + 1 < layer.rows ? "," : "") << "\n";
        }
        os << "      ],\n      \"biases\": ";
        write_number_list(os, layer.biases);
        os << "\n    }" << (l + 1 < model.layers.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string to_json(const ConvertedModel& model) {
    model.validate();
    std::ostringstream os;
    write_header(os, kKindSnn, model.topology());
    write_metadata(os, model.metadata);
    os << "  \"layers\": [\n";
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const SnnLayer& layer = model.layers[l];
        os << "    {\n      \"rows\": " << layer.rows << ",\n      \"cols\": " << layer.cols
           << ",\n      \"weights\": [\n";
        for (std::size_t i = 0; i < layer.rows; ++i) {
            os << "        \"" << layer.weights[i].to_string() << "\""
               << (i + 1 < layer.rows ? "," : "") << "\n";
        }
        os << "      ],\n      \"thresholds\": ";
        write_number_list(os, layer.thresholds);
        os << "\n    }" << (l + 1 < model.layers.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

BnnModel parse_bnn(std::string_view json_text) {
    const detail::json root = detail::parse_json(json_text, "model");
    detail::ObjectReader r(root, "model");
    check_header(r, kKindBnn);
    const auto topology = read_topology(r);

    BnnModel model;
    model.metadata = read_metadata(r);
    const detail::json& layers = r.raw("layers");
    if (!layers.is_array()) {
        r.fail("layers: expected an array");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string where = layer_path(l);
        detail::ObjectReader lr(layers[l], where);
        BnnLayer layer;
        std::tie(layer.rows, layer.cols) = read_dims(lr);
        const detail::json& w = read_row_list(lr, "weights", layer.rows, where);
        layer.weights.reserve(layer.rows * layer.cols);
        for (std::size_t i = 0; i < layer.rows; ++i) {
            const detail::json& row = w[i];
            const std::string row_where = where + ".weights[" + std::to_string(i) + "]";
            if (!row.is_array() || row.size() != layer.cols) {
                throw ValidationError(row_where + ": expected " + std::to_string(layer.cols) +
                                      " weights");
            }
            for (std::size_t j = 0; j < layer.cols; ++j) {
                const detail::json& v = row[j];
                if (!v.is_number_integer() || (v.get<std::int64_t>() != 1 && v.get<std::int64_t>() != -1)) {
                    throw ValidationError(row_where + "[" + std::to_string(j) + "]: weight " +
                                          v.dump() + " is not -1 or +1");
                }
                layer.weights.push_back(static_cast<std::int8_t>(v.get<std::int64_t>()));
            }
        }
        const detail::json& b = lr.raw("biases");
        if (!b.is_array() || b.size() != layer.cols) {
            throw ValidationError(where + ".biases: expected " + std::to_string(layer.cols) + " numbers");
        }
        for (std::size_t j = 0; j < layer.cols; ++j) {
            if (!b[j].is_number() || !std::isfinite(b[j].get<double>())) {
                throw ValidationError(where + ".biases[" + std::to_string(j) + "]: expected a finite number");
            }
            layer.biases.push_back(b[j].get<double>());
        }
        lr.finish();
        model.layers.push_back(std::move(layer));
    }
    r.finish();
    model.validate();
    if (topology != model.topology()) {
        r.fail("topology does not match the layer dimensions");
    }
    return model;
}

ConvertedModel parse_converted(std::string_view json_text) {
    const detail::json root = detail::parse_json(json_text, "model");
    detail::ObjectReader r(root, "model");
    check_header(r, kKindSnn);
    const auto topology = read_topology(r);

    ConvertedModel model;
    model.metadata = read_metadata(r);
    const detail::json& layers = r.raw("layers");
    if (!layers.is_array()) {
        r.fail("layers: expected an array");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string where = layer_path(l);
        detail::ObjectReader lr(layers[l], where);
        SnnLayer layer;
        std::tie(layer.rows, layer.cols) = read_dims(lr);
        const detail::json& w = read_row_list(lr, "weights", layer.rows, where);
        for (std::size_t i = 0; i < layer.rows; ++i) {
            const std::string row_where = where + ".weights[" + std::to_string(i) + "]";
            if (!w[i].is_string()) {
                throw ValidationError(row_where + ": expected a 0/1 bit string");
            }
            const auto& bits = w[i].get_ref<const std::string&>();
            if (bits.size() != layer.cols) {
                throw ValidationError(row_where + ": expected " + std::to_string(layer.cols) + " bits");
            }
            try {
                layer.weights.push_back(BitVector::from_string(bits));
            } catch (const ValidationError& e) {
                throw ValidationError(row_where + ": " + e.what());
            }
        }
        const detail::json& t = lr.raw("thresholds");
        if (!t.is_array() || t.size() != layer.cols) {
            throw ValidationError(where + ".thresholds: expected " + std::to_string(layer.cols) + " integers");
        }
        for (std::size_t j = 0; j < layer.cols; ++j) {
            const detail::json& v = t[j];
            const std::string tw = where + ".thresholds[" + std::to_string(j) + "]";
            if (!v.is_number_integer()) {
                throw ValidationError(tw + ": non-integral threshold " + v.dump());
            }
            const auto x = v.get<std::int64_t>();
            if (x < std::numeric_limits<std::int32_t>::min() || x > std::numeric_limits<std::int32_t>::max()) {
                throw ValidationError(tw + ": threshold out of 32-bit range");
            }
            layer.thresholds.push_back(static_cast<std::int32_t>(x));
        }
        lr.finish();
        model.layers.push_back(std::move(layer));
    }
    r.finish();
    model.validate();
    if (topology != model.topology()) {
        r.fail("topology does not match the layer dimensions");
    }
    return model;
}

BnnModel load_bnn(const std::filesystem::path& path) {
    return parse_bnn(detail::read_text_file(path));
}

ConvertedModel load_converted(const std::filesystem::path& path) {
    return parse_converted(detail::read_text_file(path));
}

void save_model(const std::filesystem::path& path, const BnnModel& model) {
    detail::write_text_file(path, to_json(model));
}

void save_model(const std::filesystem::path& path, const ConvertedModel& model) {
    detail::write_text_file(path, to_json(model));
}

} // namespace esam
