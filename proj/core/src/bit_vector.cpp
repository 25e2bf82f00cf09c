#include "esam/bit_vector.hpp"

#include <bit>

#include "esam/error.hpp"

namespace esam {

namespace {
constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }
} // namespace

BitVector::BitVector(std::size_t size) : size_(size), words_(word_count(size), 0) {}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i);
        } else if (bits[i] != '0') {
            throw ValidationError("bit string contains '" + std::string(1, bits[i]) +
                                  "' at position " + std::to_string(i));
        }
    }
    return v;
}

BitVector BitVector::from_indices(std::size_t size, const std::vector<std::size_t>& indices) {
    BitVector v(size);
    for (std::size_t i : indices) {
        v.set(i);
    }
    return v;
}

bool BitVector::test(std::size_t i) const {
    if (i >= size_) {
        throw std::out_of_range("BitVector index " + std::to_string(i) + " >= size " +
                                std::to_string(size_));
    }
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void BitVector::set(std::size_t i, bool value) {
    if (i >= size_) {
        throw std::out_of_range("BitVector index " + std::to_string(i) + " >= size " +
                                std::to_string(size_));
    }
    const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
    if (value) {
        words_[i / kWordBits] |= mask;
    } else {
        words_[i / kWordBits] &= ~mask;
    }
}

void BitVector::clear() {
    for (auto& w : words_) {
        w = 0;
    }
}

std::size_t BitVector::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

bool BitVector::any() const {
    for (auto w : words_) {
        if (w != 0) {
            return true;
        }
    }
    return false;
}

std::optional<std::size_t> BitVector::find_first() const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
        if (words_[w] != 0) {
            return w * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[w]));
        }
    }
    return std::nullopt;
}

std::vector<std::size_t> BitVector::set_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t word = words_[w];
        while (word != 0) {
            out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(word)));
            word &= word - 1;
        }
    }
    return out;
}

void BitVector::check_same_size(const BitVector& other) const {
    if (size_ != other.size_) {
        throw std::invalid_argument("BitVector size mismatch: " + std::to_string(size_) +
                                    " vs " + std::to_string(other.size_));
    }
}

void BitVector::trim() {
    if (size_ % kWordBits != 0 && !words_.empty()) {
        words_.back() &= (std::uint64_t{1} << (size_ % kWordBits)) - 1;
    }
}

BitVector& BitVector::operator&=(const BitVector& other) {
    check_same_size(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] &= other.words_[w];
    }
    return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
    check_same_size(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] |= other.words_[w];
    }
    return *this;
}

BitVector& BitVector::operator^=(const BitVector& other) {
    check_same_size(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        words_[w] ^= other.words_[w];
    }
    return *this;
}

BitVector BitVector::operator~() const {
    BitVector out(*this);
    for (auto& w : out.words_) {
        w = ~w;
    }
    out.trim();
    return out;
}

BitVector BitVector::slice(std::size_t offset, std::size_t length) const {
    if (offset + length > size_) {
        throw std::out_of_range("BitVector slice [" + std::to_string(offset) + ", " +
                                std::to_string(offset + length) + ") exceeds size " +
                                std::to_string(size_));
    }
    BitVector out(length);
    for (std::size_t i = 0; i < length; ++i) {
        if (test(offset + i)) {
            out.set(i);
        }
    }
    return out;
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if (test(i)) {
            s[i] = '1';
        }
    }
    return s;
}

} // namespace esam
