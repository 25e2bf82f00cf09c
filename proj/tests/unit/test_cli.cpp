#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"

using namespace esam;

namespace {

namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "esam_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

const std::string kConfig = (testing::data_dir() / "esam3nm.json").string();
const std::string kModel = (testing::data_dir() / "mnist_bnn.json").string();
const std::string kData = (testing::data_dir() / "mnist_test.bin").string();

} // namespace

TEST_CASE("convert writes integer thresholds and is idempotent") {
    const fs::path a = scratch("a.json");
    const fs::path b = scratch("b.json");
    const Run r1 = run({"convert", "--model", kModel, "--out", a.string()});
    REQUIRE(r1.code == 0);
    CHECK(r1.out.find("theta_min") != std::string::npos);
    REQUIRE(run({"convert", "--model", kModel, "--out", b.string()}).code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto j = nlohmann::json::parse(slurp(a));
    CHECK(j["kind"] == "binary_snn");
    for (const auto& t : j["layers"][0]["thresholds"]) {
        CHECK(t.is_number_integer());
    }
}

TEST_CASE("convert rejects a 0.5 weight with exit code 2") {
    BnnModel m;
    m.layers.push_back(BnnLayer{2, 1, {1, -1}, {0.0}});
    m.layers.push_back(BnnLayer{1, 1, {1}, {0.0}});
    auto j = nlohmann::json::parse(to_json(m));
    j["layers"][0]["weights"][1][0] = 0.5;
    const fs::path bad = scratch("bad.json");
    std::ofstream(bad) << j.dump();
    const Run r = run({"convert", "--model", bad.string(), "--out", scratch("x.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("layers[0].weights[1][0]") != std::string::npos);
}

TEST_CASE("missing model file exits 1") {
    const Run r = run({"simulate", "--config", kConfig, "--model", "/nonexistent.json", "--data", kData});
    CHECK(r.code == 1);
    CHECK(run({"convert", "--model", "/nonexistent.json", "--out", scratch("y.json").string()}).code == 1);
}

TEST_CASE("bad variant and bad flags exit 2") {
    CHECK(run({"simulate", "--config", kConfig, "--model", kModel, "--data", kData, "--variant", "9r"}).code == 2);
    CHECK(run({"simulate", "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"learn-latency", "--config", kConfig, "--variant", "1rw7r"}).code == 2);
}

TEST_CASE("help exits 0") { CHECK(run({"--help"}).code == 0); }

TEST_CASE("simulate subset accuracy equals the BNN oracle") {
    const fs::path json = scratch("sim.json");
    const fs::path csv = scratch("sim.csv");
    const Run r = run({"simulate", "--config", kConfig, "--model", kModel, "--data", kData, "--limit",
                       "100", "--variant", "1rw2r", "--out-json", json.string(), "--out-csv",
                       csv.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(json));

    const BnnModel bnn = load_bnn(kModel);
    const SampleSet set = load_samples(kData);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < 100; ++i) {
        std::vector<bool> s(768);
        for (std::size_t k = 0; k < 768; ++k) {
            s[k] = set.samples[i].spikes.test(k);
        }
        if (testing::bnn_forward(bnn, s) == set.samples[i].label) {
            ++correct;
        }
    }
    CHECK(j["accuracy"]["correct"] == correct);
    CHECK(j["report"]["samples"] == 100);
    CHECK(j["tile_cycle_histogram"].size() == 4);
    CHECK(j["port_utilization"].size() == 2);
    CHECK(slurp(csv).find("1rw2r,100,") != std::string::npos);
}

TEST_CASE("variants agree on predictions") {
    const fs::path a = scratch("v0.json");
    const fs::path b = scratch("v4.json");
    const std::vector<std::string> common{"--config", kConfig, "--model", kModel, "--data", kData, "--limit", "30"};
    auto args = [&](const std::string& v, const fs::path& out) {
        std::vector<std::string> x{"simulate"};
        x.insert(x.end(), common.begin(), common.end());
        x.insert(x.end(), {"--variant", v, "--out-json", out.string()});
        return x;
    };
    REQUIRE(run(args("1rw", a)).code == 0);
    REQUIRE(run(args("1rw4r", b)).code == 0);
    const auto ja = nlohmann::json::parse(slurp(a));
    const auto jb = nlohmann::json::parse(slurp(b));
    CHECK(ja["predictions"] == jb["predictions"]);
    CHECK(ja["report"]["mean_bottleneck_cycles"] != jb["report"]["mean_bottleneck_cycles"]);
    CHECK(ja["report"]["energy_per_inference_pj"] != jb["report"]["energy_per_inference_pj"]);
}

TEST_CASE("shuffled subsets depend only on the seed") {
    auto sim = [&](const std::string& seed, const fs::path& out) {
        return run({"simulate", "--config", kConfig, "--model", kModel, "--data", kData, "--limit", "20",
                    "--shuffle", "--seed", seed, "--out-json", out.string()});
    };
    REQUIRE(sim("7", scratch("s1.json")).code == 0);
    REQUIRE(sim("7", scratch("s2.json")).code == 0);
    REQUIRE(sim("8", scratch("s3.json")).code == 0);
    CHECK(slurp(scratch("s1.json")) == slurp(scratch("s2.json")));
    CHECK(slurp(scratch("s1.json")) != slurp(scratch("s3.json")));
}

TEST_CASE("sweep-ports area column matches area_estimate") {
    const fs::path csv = scratch("sweep.csv");
    REQUIRE(run({"sweep-ports", "--config", kConfig, "--model", kModel, "--data", kData, "--limit", "5",
                 "--out-csv", csv.string()})
                .code == 0);
    std::istringstream lines(slurp(csv));
    std::string line;
    std::getline(lines, line);
    const HardwareConfig cfg = load_config(kConfig);
    const ConvertedModel m = bnn_to_snn(load_bnn(kModel));
    int rows = 0;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) {
            cells.push_back(c);
        }
        const CellVariant v = CellVariant::from_name(cells[0]);
        const double area = area_estimate(build_network(m, cfg, v), cfg, v).total_um2();
        CHECK(std::stod(cells[6]) == doctest::Approx(area).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("learn-latency table") {
    const fs::path csv = scratch("ll.csv");
    const Run r = run({"learn-latency", "--config", kConfig, "--variant", "1rw4r", "--out-csv", csv.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("8 cycles") != std::string::npos);
    CHECK(slurp(csv).find("1rw4r,128,128,256,") != std::string::npos);
    const Run one = run({"learn-latency", "--config", kConfig, "--variant", "1rw", "--rows", "1", "--cols", "1"});
    CHECK(one.out.find("baseline 2 cycles") != std::string::npos);
}
