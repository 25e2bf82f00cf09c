#include "esam/memory.hpp"

#include <string>

#include "esam/error.hpp"

namespace esam {

SynapseArray::SynapseArray(std::size_t rows, std::size_t cols, CellVariant variant,
                           const ArrayLimits& limits)
    : rows_(rows), cols_(cols), variant_(variant), mux_factor_(limits.col_mux_factor) {
    if (rows == 0 || cols == 0) {
        throw ValidationError("synapse array must have at least one row and one column");
    }
    if (rows > limits.max_rows || cols > limits.max_cols) {
        throw ValidationError("synapse array " + std::to_string(rows) + "x" +
                              std::to_string(cols) + " exceeds the " +
                              std::to_string(limits.max_rows) + "x" +
                              std::to_string(limits.max_cols) + " limit");
    }
    if (variant.read_ports < 0 || variant.read_ports > kMaxReadPorts) {
        throw ValidationError("read_ports " + std::to_string(variant.read_ports) +
                              " outside [0, " + std::to_string(kMaxReadPorts) + "]");
    }
    weights_.assign(rows, BitVector(cols));
    reads_per_port_.assign(static_cast<std::size_t>(variant.inference_ports()), 0);
}

SynapseArray SynapseArray::from_rows(const std::vector<BitVector>& rows, CellVariant variant,
                                     const ArrayLimits& limits) {
    if (rows.empty()) {
        throw ValidationError("synapse array must have at least one row");
    }
    SynapseArray a(rows.size(), rows.front().size(), variant, limits);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != a.cols_) {
            throw ValidationError("synapse row " + std::to_string(r) + " has " +
                                  std::to_string(rows[r].size()) + " bits, expected " +
                                  std::to_string(a.cols_));
        }
        a.weights_[r] = rows[r];
    }
    return a;
}

PortReadout SynapseArray::read_rows(const ArbiterResult& grants) {
    const std::size_t ports = reads_per_port_.size();
    if (grants.valid_count() > ports) {
        throw ValidationError(std::to_string(grants.valid_count()) +
                              " valid grants exceed the " + std::to_string(ports) +
                              " read ports of a " + variant_.label() + " array");
    }
    if (access_ != Access::None) {
        throw InvariantError("second inference access to a synapse array in cycle " +
                             std::to_string(cycle_));
    }
    access_ = Access::Inference;

    PortReadout out;
    out.bits.assign(ports, BitVector(cols_));
    out.valid.assign(ports, false);

    // Valid grants are packed onto the physical ports in arbiter order.
    std::size_t port = 0;
    for (std::size_t k = 0; k < grants.grants.size(); ++k) {
        if (!grants.valid[k]) {
            continue;
        }
        if (grants.grants[k].size() != rows_) {
            throw ValidationError("grant vector width " + std::to_string(grants.grants[k].size()) +
                                  " does not match array rows " + std::to_string(rows_));
        }
        const auto row = grants.grants[k].find_first();
        if (!row || *row >= rows_) {
            throw ValidationError("grant on port " + std::to_string(k) + " selects no valid row");
        }
        out.bits[port] = weights_[*row];
        out.valid[port] = true;
        reads_per_port_[port] += cols_;
        ++row_reads_;
        ++port;
    }
    return out;
}

void SynapseArray::check_column(std::size_t col) const {
    if (col >= cols_) {
        throw ValidationError("column " + std::to_string(col) + " out of range for " +
                              std::to_string(cols_) + "-column array");
    }
}

void SynapseArray::claim_transposed() {
    if (access_ == Access::Inference) {
        throw InvariantError("transposed access in a cycle that already performed an inference read");
    }
    // The column access occupies the array for col_mux_factor whole cycles.
    cycle_ += static_cast<std::uint64_t>(mux_factor_);
    access_ = Access::None;
}

ColumnAccess SynapseArray::transposed_read_column(std::size_t col) {
    check_column(col);
    claim_transposed();
    ColumnAccess out{BitVector(rows_), mux_factor_};
    for (std::size_t r = 0; r < rows_; ++r) {
        out.bits.set(r, weights_[r].test(col));
    }
    ++transposed_reads_;
    return out;
}

int SynapseArray::transposed_write_column(std::size_t col, const BitVector& bits) {
    check_column(col);
    if (bits.size() != rows_) {
        throw ValidationError("column write of " + std::to_string(bits.size()) +
                              " bits into a " + std::to_string(rows_) + "-row array");
    }
    claim_transposed();
    for (std::size_t r = 0; r < rows_; ++r) {
        weights_[r].set(col, bits.test(r));
    }
    ++transposed_writes_;
    return mux_factor_;
}

void SynapseArray::next_cycle() {
    ++cycle_;
    access_ = Access::None;
}

} // namespace esam
