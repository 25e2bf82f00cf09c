#include "esam/dataset.hpp"

#include <array>

#include "esam/error.hpp"
#include "json_util.hpp"

namespace esam {

namespace {

constexpr std::size_t kHeaderBytes = 8;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
    }
}

std::uint32_t get_u32(const std::string& in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    }
    return v;
}

} // namespace

std::string encode_samples(const SampleSet& set) {
    const std::size_t row_bytes = (set.width + 7) / 8;
    std::string out;
    out.reserve(kHeaderBytes + set.samples.size() * (row_bytes + 1));
    put_u32(out, static_cast<std::uint32_t>(set.samples.size()));
    put_u32(out, static_cast<std::uint32_t>(set.width));
    for (std::size_t s = 0; s < set.samples.size(); ++s) {
        const Sample& sample = set.samples[s];
        if (sample.spikes.size() != set.width) {
            throw ValidationError("sample " + std::to_string(s) + " has width " +
                                  std::to_string(sample.spikes.size()) + ", expected " +
                                  std::to_string(set.width));
        }
        for (std::size_t b = 0; b < row_bytes; ++b) {
            unsigned char byte = 0;
            for (std::size_t k = 0; k < 8 && b * 8 + k < set.width; ++k) {
                if (sample.spikes.test(b * 8 + k)) {
                    byte |= static_cast<unsigned char>(0x80U >> k);
                }
            }
            out.push_back(static_cast<char>(byte));
        }
        out.push_back(static_cast<char>(sample.label));
    }
    return out;
}

SampleSet decode_samples(const std::string& bytes) {
    if (bytes.size() < kHeaderBytes) {
        throw ValidationError("sample file shorter than its 8-byte header");
    }
    SampleSet set;
    const std::size_t count = get_u32(bytes, 0);
    set.width = get_u32(bytes, 4);
    if (set.width == 0) {
        throw ValidationError("sample file declares zero width");
    }
    const std::size_t row_bytes = (set.width + 7) / 8;
    const std::size_t expected = kHeaderBytes + count * (row_bytes + 1);
    if (bytes.size() != expected) {
        throw ValidationError("sample file is " + std::to_string(bytes.size()) + " bytes; header (" +
                              std::to_string(count) + " x " + std::to_string(set.width) +
                              " bits) implies " + std::to_string(expected));
    }
    set.samples.reserve(count);
    std::size_t pos = kHeaderBytes;
    for (std::size_t s = 0; s < count; ++s) {
        Sample sample{BitVector(set.width), 0};
        for (std::size_t b = 0; b < row_bytes; ++b) {
            const auto byte = static_cast<unsigned char>(bytes[pos++]);
            for (std::size_t k = 0; k < 8; ++k) {
                const bool bit = (byte & (0x80U >> k)) != 0;
                if (b * 8 + k < set.width) {
                    sample.spikes.set(b * 8 + k, bit);
                } else if (bit) {
                    throw ValidationError("sample " + std::to_string(s) + " sets padding bits");
                }
            }
        }
        sample.label = static_cast<std::uint8_t>(bytes[pos++]);
        set.samples.push_back(std::move(sample));
    }
    return set;
}

SampleSet load_samples(const std::filesystem::path& path) {
    const std::string bytes = detail::read_text_file(path);
    try {
        return decode_samples(bytes);
    } catch (const ValidationError& e) {
        throw ValidationError(path.filename().string() + ": " + e.what());
    }
}

void save_samples(const std::filesystem::path& path, const SampleSet& set) {
    detail::write_text_file(path, encode_samples(set));
}

} // namespace esam
