#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace esam {

/// Fixed-length ordered bit vector used for request, grant and spike vectors.
///
/// Index 0 is the leftmost, highest-priority position. The textual form
/// produced by to_string() prints index 0 first, so "01010001" has bits
/// 1, 3 and 7 set.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size);

    /// Parses a string of '0'/'1' characters, index 0 first.
    static BitVector from_string(std::string_view bits);
    static BitVector from_indices(std::size_t size, const std::vector<std::size_t>& indices);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool test(std::size_t i) const;
    void set(std::size_t i, bool value = true);
    void reset(std::size_t i) { set(i, false); }
    void clear();

    std::size_t popcount() const;
    bool any() const;
    bool none() const { return !any(); }

    /// Lowest set index, if any.
    std::optional<std::size_t> find_first() const;
    /// All set indices in increasing order.
    std::vector<std::size_t> set_indices() const;

    BitVector& operator&=(const BitVector& other);
    BitVector& operator|=(const BitVector& other);
    BitVector& operator^=(const BitVector& other);
    BitVector operator~() const;

    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
    friend BitVector operator|(BitVector a, const BitVector& b) { return a |= b; }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    bool operator==(const BitVector& other) const = default;

    /// Copies bits [offset, offset + length) into a new vector.
    BitVector slice(std::size_t offset, std::size_t length) const;

    std::string to_string() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void check_same_size(const BitVector& other) const;
    void trim();

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

} // namespace esam
