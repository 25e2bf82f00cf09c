#include <doctest.h>

#include <vector>

#include "esam/neuron.hpp"

using namespace esam;

namespace {

std::int32_t delta(std::vector<std::uint8_t> bits, std::vector<std::uint8_t> valids) {
    return accumulate(NeuronState{}, bits, valids).v_mem;
}

} // namespace

TEST_CASE("accumulate decodes valid bits to +1 / -1") {
    CHECK(delta({1, 0, 1, 1}, {1, 1, 1, 0}) == 1);
    CHECK(delta({1, 1, 0, 0}, {0, 0, 0, 0}) == 0);
    CHECK(delta({1}, {1}) == 1);
    CHECK(delta({0}, {1}) == -1);
    CHECK_THROWS(delta({1, 0}, {1}));
}

TEST_CASE("fire check is gated by R_empty and uses >=") {
    const NeuronState at{5, 5, false};
    const FireResult fired = fire_check(at, true);
    CHECK(fired.fired);
    CHECK(fired.state.v_mem == 0);
    CHECK(fired.state.request);

    const FireResult gated = fire_check(at, false);
    CHECK_FALSE(gated.fired);
    CHECK(gated.state == at);

    CHECK_FALSE(fire_check(NeuronState{-3, 0, false}, true).fired);
}

TEST_CASE("fire while r is still set is flagged") {
    const FireResult res = fire_check(NeuronState{2, 1, true}, true);
    CHECK(res.fired);
    CHECK(res.overlapped_request);
    CHECK(res.state.request);
}

TEST_CASE("grant handshake") {
    CHECK_FALSE(grant_ack(NeuronState{0, 0, true}, true).request);
    CHECK(grant_ack(NeuronState{0, 0, true}, false).request);
    CHECK_FALSE(grant_ack(NeuronState{0, 0, false}, true).request);
    CHECK(grant_ack(NeuronState{7, 0, true}, true).v_mem == 7);
}

TEST_CASE("register width") {
    CHECK(required_register_bits(0) == 1);
    CHECK(required_register_bits(1) == 2);
    CHECK(required_register_bits(768) == 11);
    CHECK(required_register_bits(769) == 11);
    CHECK(required_register_bits(1024) == 12);
}
