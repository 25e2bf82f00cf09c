#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <functional>
#include <sstream>

#include "esam/error.hpp"
#include "esam/params.hpp"
#include "oracles.hpp"

using namespace esam;

namespace {

std::string shipped_text() {
    std::ifstream in(testing::data_dir() / "esam3nm.json");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string mutate(const std::function<void(nlohmann::json&)>& edit) {
    auto j = nlohmann::json::parse(shipped_text());
    edit(j);
    return j.dump();
}

} // namespace

TEST_CASE("shipped config loads with the reference stage times") {
    const HardwareConfig cfg = load_config(testing::data_dir() / "esam3nm.json");
    CHECK(cfg.at(CellVariant{0}).arbiter_stage_ns == 1.01);
    CHECK(cfg.at(CellVariant{0}).sram_neuron_stage_ns == 0.69);
    CHECK(cfg.limits.max_rows == 128);
    CHECK(cfg.limits.max_cols == 128);
    CHECK(cfg.limits.col_mux_factor == 4);
    CHECK(cfg.variant_list().size() == 5);
}

TEST_CASE("clock period is the slower stage") {
    const HardwareConfig cfg = load_config(testing::data_dir() / "esam3nm.json");
    CHECK(clock_period_ns(cfg, CellVariant{0}) == 1.01);
    CHECK(clock_period_ns(cfg, CellVariant{4}) == 1.23);

    HardwareConfig eq = cfg;
    eq.variants[2].arbiter_stage_ns = 2.0;
    eq.variants[2].sram_neuron_stage_ns = 2.0;
    CHECK(clock_period_ns(eq, CellVariant{2}) == 2.0);
}

TEST_CASE("160 rows is rejected") {
    const auto text = mutate([](auto& j) { j["limits"]["max_rows"] = 160; });
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("max_rows"), ValidationError);
}

TEST_CASE("read_ports 5 is rejected") {
    const auto text = mutate([](auto& j) { j["variants"][4]["read_ports"] = 5; });
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("read_ports"), ValidationError);
}

TEST_CASE("non-positive scalars and unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config(mutate([](auto& j) { j["variants"][0]["leakage_power_mw"] = 0; })),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(mutate([](auto& j) { j["variants"][1]["arbiter_stage_ns"] = -1; })),
                    ValidationError);
    CHECK_THROWS_AS(parse_config(mutate([](auto& j) { j["limits"]["bogus"] = 1; })), ValidationError);
    CHECK_THROWS_AS(parse_config(mutate([](auto& j) { j["variants"].push_back(j["variants"][0]); })),
                    ValidationError);
    CHECK_THROWS_AS(parse_config("{"), ValidationError);
}

TEST_CASE("missing file is an I/O error") {
    CHECK_THROWS_AS(load_config("/nonexistent/esam.json"), IoError);
}

TEST_CASE("variant names") {
    CHECK(CellVariant::from_name("1rw").read_ports == 0);
    CHECK(CellVariant::from_name("1RW+4R").read_ports == 4);
    CHECK(CellVariant{3}.name() == "1rw3r");
    CHECK(CellVariant{3}.label() == "1RW+3R");
    CHECK(CellVariant{0}.inference_ports() == 1);
    CHECK(CellVariant{4}.inference_ports() == 4);
    CHECK_THROWS_AS(CellVariant::from_name("1rw5r"), ValidationError);
    CHECK_THROWS_AS(CellVariant::from_name("2rw"), ValidationError);
}

TEST_CASE("unknown variant lookup fails") {
    HardwareConfig cfg = load_config(testing::data_dir() / "esam3nm.json");
    cfg.variants.erase(3);
    CHECK_THROWS_AS(cfg.at(CellVariant{3}), ValidationError);
}

TEST_CASE("SimStats merge and scale") {
    SimStats a;
    a.samples = 1;
    a.cycles_per_tile = {3, 4};
    a.grants_per_port = {2};
    a.total_grants = 2;
    a.wall_time_ns = 5.0;
    SimStats b = a;
    b.cycles_per_tile = {1, 1, 1};
    b.grants_per_port = {1, 1};
    a.merge(b);
    CHECK(a.samples == 2);
    CHECK(a.cycles_per_tile == std::vector<std::uint64_t>{4, 5, 1});
    CHECK(a.grants_per_port == std::vector<std::uint64_t>{3, 1});
    CHECK(a.wall_time_ns == 10.0);
    const SimStats s = a.scaled(3);
    CHECK(s.total_grants == 12);
    CHECK(s.wall_time_ns == 30.0);
}
