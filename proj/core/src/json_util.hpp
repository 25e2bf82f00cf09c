#pragma once

// Strict JSON object reading shared by the config, model and report code.
// Not installed; nlohmann/json stays out of the public headers.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "esam/error.hpp"

namespace esam::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading " + path.string());
    }
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

inline json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(what) + ": JSON parse error: " + e.what());
    }
}

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) {
            fail("expected an object");
        }
    }

    [[noreturn]] void fail(std::string_view msg) const {
        throw ValidationError(path_ + ": " + std::string(msg));
    }

    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return obj_.contains(std::string(key)); }

    const json& raw(std::string_view key) {
        const std::string k(key);
        if (!obj_.contains(k)) {
            throw ValidationError(field(key) + ": missing required field");
        }
        seen_.insert(k);
        return obj_.at(k);
    }

    double number(std::string_view key) {
        const json& v = raw(key);
        if (!v.is_number()) {
            throw ValidationError(field(key) + ": expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            throw ValidationError(field(key) + ": must be finite");
        }
        return d;
    }

    double positive(std::string_view key) {
        const double d = number(key);
        if (!(d > 0)) {
            throw ValidationError(field(key) + ": must be strictly positive, got " +
                                  std::to_string(d));
        }
        return d;
    }

    double non_negative(std::string_view key) {
        const double d = number(key);
        if (d < 0) {
            throw ValidationError(field(key) + ": must be non-negative, got " + std::to_string(d));
        }
        return d;
    }

    std::int64_t integer(std::string_view key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) {
            throw ValidationError(field(key) + ": expected an integer");
        }
        return v.get<std::int64_t>();
    }

    std::int64_t integer_in(std::string_view key, std::int64_t lo, std::int64_t hi) {
        const std::int64_t v = integer(key);
        if (v < lo || v > hi) {
            throw ValidationError(field(key) + ": " + std::to_string(v) + " outside [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return v;
    }

    std::string string(std::string_view key) {
        const json& v = raw(key);
        if (!v.is_string()) {
            throw ValidationError(field(key) + ": expected a string");
        }
        return v.get<std::string>();
    }

    // Rejects any key that was not consumed.
    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                throw ValidationError(field(it.key()) + ": unknown field");
            }
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

} // namespace esam::detail
