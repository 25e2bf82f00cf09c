#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "esam/arbiter.hpp"
#include "esam/bit_vector.hpp"
#include "esam/params.hpp"

namespace esam {

/// Bits seen on the inference read ports during one cycle.
struct PortReadout {
    std::vector<BitVector> bits; // one row of `cols` bits per port
    std::vector<bool> valid;
};

/// Result of a column-wise access through the transposed RW port.
struct ColumnAccess {
    BitVector bits;
    int cycles = 0;
};

/// One R x C binary synapse array.
///
/// Rows are read through the decoupled inference ports (or the shared RW
/// port for the 6T baseline); columns are read and written through the
/// transposed port, which costs col_mux_factor cycles per full column.
/// Weights change only through transposed_write_column().
///
/// The array keeps a cycle cursor so it can enforce the per-cycle port
/// budget and reject inference reads and transposed accesses in the same
/// cycle. Callers advance it with next_cycle().
class SynapseArray {
public:
    SynapseArray(std::size_t rows, std::size_t cols, CellVariant variant,
                 const ArrayLimits& limits = {});

    /// Builds an array from row bit strings (all of equal length).
    static SynapseArray from_rows(const std::vector<BitVector>& rows, CellVariant variant,
                                  const ArrayLimits& limits = {});

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    CellVariant variant() const { return variant_; }

    bool weight(std::size_t row, std::size_t col) const { return weights_.at(row).test(col); }
    const BitVector& row(std::size_t r) const { return weights_.at(r); }

    /// Reads the rows granted on each valid port. Grant vectors are indexed
    /// by local row; invalid ports yield an all-zero row.
    PortReadout read_rows(const ArbiterResult& grants);

    ColumnAccess transposed_read_column(std::size_t col);
    int transposed_write_column(std::size_t col, const BitVector& bits);

    void next_cycle();
    std::uint64_t cycle() const { return cycle_; }

    const std::vector<std::uint64_t>& reads_per_port() const { return reads_per_port_; }
    std::uint64_t row_reads() const { return row_reads_; }
    std::uint64_t transposed_reads() const { return transposed_reads_; }
    std::uint64_t transposed_writes() const { return transposed_writes_; }

private:
    enum class Access { None, Inference, Transposed };

    void check_column(std::size_t col) const;
    void claim_transposed();

    std::size_t rows_;
    std::size_t cols_;
    CellVariant variant_;
    int mux_factor_;
    std::vector<BitVector> weights_;

    std::uint64_t cycle_ = 0;
    Access access_ = Access::None;

    std::vector<std::uint64_t> reads_per_port_; // bits sensed per port
    std::uint64_t row_reads_ = 0;
    std::uint64_t transposed_reads_ = 0;
    std::uint64_t transposed_writes_ = 0;
};

} // namespace esam
