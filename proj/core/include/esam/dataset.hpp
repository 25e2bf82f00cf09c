#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "esam/bit_vector.hpp"

namespace esam {

struct Sample {
    BitVector spikes;
    std::uint8_t label = 0;

    bool operator==(const Sample&) const = default;
};

/// Binarized sample file:
///   uint32 LE count, uint32 LE width,
///   then per sample ceil(width / 8) bytes of spikes (bit i in byte i / 8,
///   most significant bit first) followed by one label byte.
struct SampleSet {
    std::size_t width = 0;
    std::vector<Sample> samples;

    bool operator==(const SampleSet&) const = default;
};

std::string encode_samples(const SampleSet& set);
SampleSet decode_samples(const std::string& bytes);

SampleSet load_samples(const std::filesystem::path& path);
void save_samples(const std::filesystem::path& path, const SampleSet& set);

} // namespace esam
