#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "esam/bit_vector.hpp"

namespace esam {

/// Output of one fixed priority encoder.
struct EncoderOutput {
    BitVector grant;    // one-hot at the leftmost request, or all-zero
    bool no_request;    // noR: the input had no set bit
    BitVector residual; // input with the granted bit masked out
};

/// Output of a p-port cascaded arbiter for one clock cycle.
///
/// Port k sees the residual left by port k-1. grants[k] is one-hot iff
/// valid[k]; grants are pairwise disjoint, and residual is the request
/// vector with every granted bit cleared.
struct ArbiterResult {
    std::vector<BitVector> grants;
    std::vector<bool> valid;
    BitVector residual;
    bool no_request = true; // noR of the first stage: nothing was pending

    std::size_t valid_count() const;
    /// Row granted on port k, if that port is valid.
    std::optional<std::size_t> granted_row(std::size_t port) const;
};

/// Fixed priority encoder built from the subblock chain
///   s[0] = 0, s[n+1] = s[n] | R[n], G[n] = R[n] & !s[n], R'[n] = R[n] & !G[n],
///   noR = !s[N].
/// Bit 0 is the highest priority.
EncoderOutput priority_encode(const BitVector& requests);

/// p cascaded 1-port encoders (1 <= ports <= 4).
ArbiterResult arbitrate(const BitVector& requests, int ports);

/// Same contract as arbitrate(), but every 1-port stage is a two-level tree:
/// base encoders over base_width-wide blocks (the last block may be short)
/// and one top-level encoder over the block-nonempty flags.
ArbiterResult arbitrate_tree(const BitVector& requests, int ports, std::size_t base_width);

/// Dispatches to arbitrate_tree() when base_width > 0, arbitrate() otherwise.
ArbiterResult arbitrate_with(const BitVector& requests, int ports, std::size_t base_width);

/// Subblocks on the critical path of one 1-port stage: n for a flat
/// encoder, base_width + ceil(n / base_width) for the tree.
std::size_t logic_depth(std::size_t n, std::optional<std::size_t> base_width = std::nullopt);

} // namespace esam
