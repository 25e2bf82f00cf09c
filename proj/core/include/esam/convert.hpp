#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esam/bit_vector.hpp"

namespace esam {

inline constexpr std::size_t kImageSide = 28;
inline constexpr std::size_t kImagePixels = kImageSide * kImageSide;
inline constexpr std::size_t kCornerCrop = 2;
inline constexpr std::size_t kInputWidth = 768;
inline constexpr float kSpikeThreshold = 0.5F;

/// True for the 2x2 blocks removed from each image corner.
bool is_cropped_pixel(std::size_t row, std::size_t col);

/// Row-major pixel index of each of the 768 kept pixels, in spike order.
const std::vector<std::size_t>& kept_pixel_indices();

/// Drops the four 2x2 corners, flattens row-major and emits a spike for
/// every pixel strictly greater than 0.5. Pixels are row-major in [0, 1].
BitVector preprocess_image(std::span<const float> pixels);

struct ModelMetadata {
    std::optional<double> bnn_accuracy;
    std::optional<std::int64_t> accuracy_samples;
    std::optional<std::int64_t> trainer_seed;
    std::string preprocessing;
    std::string description;

    bool operator==(const ModelMetadata&) const = default;
};

/// Sign-activation BNN layer. weights is row-major rows x cols with entries
/// in {-1, +1}; row i is input i, column j is output neuron j.
struct BnnLayer {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int8_t> weights;
    std::vector<double> biases;

    std::int8_t weight(std::size_t i, std::size_t j) const { return weights[i * cols + j]; }
    bool operator==(const BnnLayer&) const = default;
};

/// A trained BNN. Hidden neurons output +1 iff sum(w * x) + b >= 0 with
/// x in {-1, +1}. The output layer is read out as
/// score_j = sum over inputs with x_i = +1 of w_ij, and the prediction is the
/// lowest index with the maximum score; output-layer biases do not enter it.
struct BnnModel {
    std::vector<BnnLayer> layers;
    ModelMetadata metadata;

    std::vector<std::size_t> topology() const;
    void validate() const;
    bool operator==(const BnnModel&) const = default;
};

/// Binary-SNN layer: stored bit w = (w_bnn + 1) / 2, one BitVector per input
/// row, and an integer firing threshold per output neuron.
struct SnnLayer {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<BitVector> weights;
    std::vector<std::int32_t> thresholds;

    bool operator==(const SnnLayer&) const = default;
};

struct ConvertedModel {
    std::vector<SnnLayer> layers;
    ModelMetadata metadata;

    std::vector<std::size_t> topology() const;
    void validate() const;
    bool operator==(const ConvertedModel&) const = default;
};

/// ceil((weight_sum - bias) / 2): the smallest spike-weighted sum S for
/// which 2S - weight_sum + bias >= 0.
std::int32_t snn_threshold(std::int64_t weight_sum, double bias);

ConvertedModel bnn_to_snn(const BnnModel& model);

// Interchange format. One JSON document per model, see docs/formats.md.
std::string to_json(const BnnModel& model);
std::string to_json(const ConvertedModel& model);
BnnModel parse_bnn(std::string_view json_text);
ConvertedModel parse_converted(std::string_view json_text);

BnnModel load_bnn(const std::filesystem::path& path);
ConvertedModel load_converted(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const BnnModel& model);
void save_model(const std::filesystem::path& path, const ConvertedModel& model);

} // namespace esam
