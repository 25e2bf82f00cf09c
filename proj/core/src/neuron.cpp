#include "esam/neuron.hpp"

#include <cstdlib>

#include "esam/error.hpp"

namespace esam {

NeuronState accumulate(NeuronState state, std::span<const std::uint8_t> bits,
                       std::span<const std::uint8_t> valids) {
    if (bits.size() != valids.size()) {
        throw ValidationError("accumulate: bits and valids differ in length");
    }
    std::int32_t delta = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (valids[k]) {
            delta += bits[k] ? 1 : -1;
        }
    }
    state.v_mem += delta;
    return state;
}

FireResult fire_check(NeuronState state, bool r_empty) {
    FireResult out{state, false, false};
    if (r_empty && state.v_mem >= state.v_th) {
        out.overlapped_request = state.request;
        out.state.request = true;
        out.state.v_mem = 0;
        out.fired = true;
    }
    return out;
}

NeuronState grant_ack(NeuronState state, bool g) {
    if (g) {
        state.request = false;
    }
    return state;
}

int required_register_bits(std::int64_t magnitude) {
    magnitude = std::llabs(magnitude);
    int bits = 1; // sign bit
    while ((std::int64_t{1} << (bits - 1)) - 1 < magnitude) {
        ++bits;
    }
    return bits;
}

} // namespace esam
