#include <doctest.h>

#include <json.hpp>

#include "esam/convert.hpp"
#include "esam/error.hpp"
#include "oracles.hpp"

using namespace esam;

namespace {

BnnLayer layer_of(std::size_t rows, std::size_t cols, std::vector<std::int8_t> w,
                  std::vector<double> b) {
    return BnnLayer{rows, cols, std::move(w), std::move(b)};
}

/// Fire decision of converted neuron j for spike pattern s.
bool snn_fires(const SnnLayer& l, std::size_t j, const std::vector<bool>& s) {
    std::int64_t v = 0;
    for (std::size_t i = 0; i < l.rows; ++i) {
        if (s[i]) {
            v += l.weights[i].test(j) ? 1 : -1;
        }
    }
    return v >= l.thresholds[j];
}

BnnModel two_layer() {
    BnnModel m;
    m.layers.push_back(layer_of(3, 2, {1, -1, -1, 1, 1, 1}, {0.5, -1.0}));
    m.layers.push_back(layer_of(2, 2, {1, -1, -1, 1}, {0.0, 0.0}));
    return m;
}

} // namespace

TEST_CASE("crop map matches the enumerated oracle") {
    CHECK(kept_pixel_indices() == testing::crop_oracle());
    CHECK(kept_pixel_indices().size() == 768);
    CHECK(is_cropped_pixel(0, 0));
    CHECK(is_cropped_pixel(27, 26));
    CHECK_FALSE(is_cropped_pixel(0, 2));
    CHECK_FALSE(is_cropped_pixel(2, 0));
}

TEST_CASE("preprocess examples") {
    std::vector<float> img(784, 0.0F);
    CHECK(preprocess_image(img).none());
    CHECK(preprocess_image(img).size() == 768);

    img[0] = 1.0F;
    CHECK(preprocess_image(img).none());

    img[0] = 0.0F;
    img[2 * 28 + 2] = 1.0F;
    CHECK(preprocess_image(img).set_indices() == std::vector<std::size_t>{50});

    img[2 * 28 + 2] = 0.5F;
    CHECK(preprocess_image(img).none());

    CHECK_THROWS_AS(preprocess_image(std::vector<float>(783)), ValidationError);
}

TEST_CASE("threshold examples") {
    CHECK(snn_threshold(1, 0.0) == 1);
    CHECK(snn_threshold(1, 1.0) == 0);
    CHECK(snn_threshold(-3, 0.0) == -1);
    CHECK(snn_threshold(4, 0.5) == 2);
    CHECK(snn_threshold(4, -0.5) == 3);
}

TEST_CASE("three-input neuron matches the BNN on all inputs") {
    BnnModel m;
    m.layers.push_back(layer_of(3, 1, {1, -1, 1}, {0.0}));
    m.layers.push_back(layer_of(1, 1, {1}, {0.0}));
    const ConvertedModel c = bnn_to_snn(m);
    CHECK(c.layers[0].thresholds[0] == 1);
    for (std::uint64_t x = 0; x < 8; ++x) {
        const auto s = testing::bits_of(x, 3);
        CHECK(snn_fires(c.layers[0], 0, s) == testing::bnn_layer(m.layers[0], s)[0]);
    }
}

TEST_CASE("positive bias can fire with zero spikes") {
    BnnModel m;
    m.layers.push_back(layer_of(1, 1, {1}, {1.0}));
    m.layers.push_back(layer_of(1, 1, {1}, {0.0}));
    const ConvertedModel c = bnn_to_snn(m);
    CHECK(c.layers[0].thresholds[0] == 0);
    CHECK(snn_fires(c.layers[0], 0, {false}));
    CHECK(testing::bnn_layer(m.layers[0], {false})[0]);
}

TEST_CASE("random 8x4 layers match on all 256 inputs") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        BnnModel m;
        m.layers.push_back(testing::random_bnn_layer(rng, 8, 4));
        m.layers.push_back(testing::random_bnn_layer(rng, 4, 2, false));
        const ConvertedModel c = bnn_to_snn(m);
        for (std::uint64_t x = 0; x < 256; ++x) {
            const auto s = testing::bits_of(x, 8);
            const auto expect = testing::bnn_layer(m.layers[0], s);
            for (std::size_t j = 0; j < 4; ++j) {
                CHECK(snn_fires(c.layers[0], j, s) == expect[j]);
            }
        }
    }
}

TEST_CASE("stored bits are (w + 1) / 2") {
    const ConvertedModel c = bnn_to_snn(two_layer());
    CHECK(c.layers[0].weights[0].to_string() == "10");
    CHECK(c.layers[0].weights[1].to_string() == "01");
    CHECK(c.layers[0].weights[2].to_string() == "11");
}

TEST_CASE("model files round trip") {
    BnnModel m = two_layer();
    m.metadata.bnn_accuracy = 0.5;
    m.metadata.description = "tiny";
    CHECK(parse_bnn(to_json(m)) == m);
    const ConvertedModel c = bnn_to_snn(m);
    CHECK(parse_converted(to_json(c)) == c);
    CHECK(to_json(parse_converted(to_json(c))) == to_json(c));
    CHECK(c.metadata == m.metadata);
}

TEST_CASE("invalid weight is reported with its position") {
    auto j = nlohmann::json::parse(to_json(two_layer()));
    j["layers"][1]["weights"][1][0] = 0.5;
    CHECK_THROWS_WITH_AS(parse_bnn(j.dump()), doctest::Contains("layers[1].weights[1][0]"),
                         ValidationError);
}

TEST_CASE("layer chaining mismatch is rejected") {
    BnnModel m = two_layer();
    m.layers[1] = layer_of(3, 2, {1, 1, 1, 1, 1, 1}, {0, 0});
    CHECK_THROWS_AS(m.validate(), ValidationError);
    CHECK_THROWS_AS(bnn_to_snn(m), ValidationError);
}

TEST_CASE("wrong kind and non-integral thresholds are rejected") {
    const std::string bnn = to_json(two_layer());
    CHECK_THROWS_AS(parse_converted(bnn), ValidationError);
    auto j = nlohmann::json::parse(to_json(bnn_to_snn(two_layer())));
    CHECK_THROWS_AS(parse_bnn(j.dump()), ValidationError);
    j["layers"][0]["thresholds"][0] = 1.5;
    CHECK_THROWS_AS(parse_converted(j.dump()), ValidationError);
}

TEST_CASE("missing model file is an I/O error") {
    CHECK_THROWS_AS(load_bnn("/nonexistent/model.json"), IoError);
}

TEST_CASE("shipped model loads with the expected topology") {
    const BnnModel m = load_bnn(testing::data_dir() / "mnist_bnn.json");
    CHECK(m.topology() == std::vector<std::size_t>{768, 256, 256, 256, 10});
    REQUIRE(m.metadata.bnn_accuracy.has_value());
    CHECK(*m.metadata.bnn_accuracy > 0.85);
}

TEST_CASE("shipped converted model is the conversion of the shipped BNN") {
    const ConvertedModel c = load_converted(testing::data_dir() / "mnist_snn.json");
    CHECK(c == bnn_to_snn(load_bnn(testing::data_dir() / "mnist_bnn.json")));
}
