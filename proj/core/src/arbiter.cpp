#include "esam/arbiter.hpp"

#include <string>

#include "esam/error.hpp"
#include "esam/params.hpp"

namespace esam {

namespace {

void check_ports(int ports) {
    if (ports < 1 || ports > kMaxReadPorts) {
        throw ValidationError("arbiter port count " + std::to_string(ports) + " outside [1, " +
                              std::to_string(kMaxReadPorts) + "]");
    }
}

// One 1-port stage of the tree arbiter. Returns the one-hot grant over the
// full vector (all-zero when nothing is pending).
BitVector tree_stage(const BitVector& requests, std::size_t base_width) {
    const std::size_t n = requests.size();
    const std::size_t blocks = (n + base_width - 1) / base_width;

    std::vector<EncoderOutput> base;
    base.reserve(blocks);
    BitVector nonempty(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t offset = b * base_width;
        const std::size_t width = std::min(base_width, n - offset);
        base.push_back(priority_encode(requests.slice(offset, width)));
        nonempty.set(b, !base.back().no_request);
    }

    const EncoderOutput top = priority_encode(nonempty);
    BitVector grant(n);
    for (std::size_t b = 0; b < blocks; ++b) {
        if (!top.grant.test(b)) {
            continue;
        }
        const std::size_t offset = b * base_width;
        for (std::size_t i = 0; i < base[b].grant.size(); ++i) {
            if (base[b].grant.test(i)) {
                grant.set(offset + i);
            }
        }
    }
    return grant;
}

} // namespace

std::size_t ArbiterResult::valid_count() const {
    std::size_t n = 0;
    for (bool v : valid) {
        n += v ? 1 : 0;
    }
    return n;
}

std::optional<std::size_t> ArbiterResult::granted_row(std::size_t port) const {
    if (port >= valid.size() || !valid[port]) {
        return std::nullopt;
    }
    return grants[port].find_first();
}

EncoderOutput priority_encode(const BitVector& requests) {
    const std::size_t n = requests.size();
    EncoderOutput out{BitVector(n), true, BitVector(n)};
    bool s = false; // s[0]: nothing selected to the left
    for (std::size_t i = 0; i < n; ++i) {
        const bool r = requests.test(i);
        const bool g = r && !s;
        if (g) {
            out.grant.set(i);
        }
        if (r && !g) {
            out.residual.set(i);
        }
        s = s || r;
    }
    out.no_request = !s;
    return out;
}

ArbiterResult arbitrate(const BitVector& requests, int ports) {
    check_ports(ports);
    ArbiterResult result;
    BitVector pending = requests;
    for (int k = 0; k < ports; ++k) {
        EncoderOutput stage = priority_encode(pending);
        if (k == 0) {
            result.no_request = stage.no_request;
        }
        result.valid.push_back(!stage.no_request);
        result.grants.push_back(std::move(stage.grant));
        pending = std::move(stage.residual);
    }
    result.residual = std::move(pending);
    return result;
}

ArbiterResult arbitrate_tree(const BitVector& requests, int ports, std::size_t base_width) {
    check_ports(ports);
    if (base_width < 2) {
        throw ValidationError("arbiter tree base width " + std::to_string(base_width) +
                              " must be >= 2");
    }
    ArbiterResult result;
    BitVector pending = requests;
    for (int k = 0; k < ports; ++k) {
        BitVector grant = tree_stage(pending, base_width);
        const bool granted = grant.any();
        if (k == 0) {
            result.no_request = !granted;
        }
        // Masking between cascaded stages acts on the full vector.
        pending &= ~grant;
        result.valid.push_back(granted);
        result.grants.push_back(std::move(grant));
    }
    result.residual = std::move(pending);
    return result;
}

ArbiterResult arbitrate_with(const BitVector& requests, int ports, std::size_t base_width) {
    return base_width == 0 ? arbitrate(requests, ports)
                           : arbitrate_tree(requests, ports, base_width);
}

std::size_t logic_depth(std::size_t n, std::optional<std::size_t> base_width) {
    if (!base_width) {
        return n;
    }
    if (*base_width < 1) {
        throw ValidationError("logic_depth: base width must be >= 1");
    }
    return *base_width + (n + *base_width - 1) / *base_width;
}

} // namespace esam
