#pragma once

#include <cstdint>
#include <span>

namespace esam {

/// Integrate-and-fire neuron registers.
struct NeuronState {
    std::int32_t v_mem = 0; // membrane potential, synaptic units
    std::int32_t v_th = 0;  // firing threshold
    bool request = false;   // r: pending output spike

    bool operator==(const NeuronState&) const = default;
};

/// Adds the +1/-1 decode of every valid port bit to v_mem. Invalid ports
/// contribute nothing, so an idle port is never read as a '1'.
/// bits and valids must have the same length.
NeuronState accumulate(NeuronState state, std::span<const std::uint8_t> bits,
                       std::span<const std::uint8_t> valids);

struct FireResult {
    NeuronState state;
    bool fired = false;
    /// Fired while r was still set from an earlier spike. r stays 1
    /// (requests do not queue); callers count this as a diagnostic.
    bool overlapped_request = false;
};

/// Compare enabled by R_empty: on v_mem >= v_th set r and reset v_mem to 0.
FireResult fire_check(NeuronState state, bool r_empty);

/// Grant handshake: g = 1 clears r. v_mem is untouched.
NeuronState grant_ack(NeuronState state, bool g);

/// Smallest two's-complement width holding every value in [-magnitude, magnitude].
int required_register_bits(std::int64_t magnitude);

} // namespace esam
