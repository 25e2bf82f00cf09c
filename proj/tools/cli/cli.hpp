#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace esam::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kValidationError = 2,
    kInvariantError = 3,
};

/// Inputs and outputs of one simulate or sweep-ports run.
struct RunManifest {
    std::filesystem::path config;
    std::filesystem::path model;
    std::filesystem::path data;
    std::string variant = "1rw4r";
    std::optional<std::size_t> limit; // first N samples unless shuffle is set
    bool shuffle = false;             // seeded random subset instead of the first N
    std::uint64_t seed = 0;
    int jobs = 1;
    std::optional<std::size_t> base_width;
    std::filesystem::path out_json;
    std::filesystem::path out_csv;

    /// Throws IoError if a referenced input file is missing.
    void check_inputs() const;
};

/// Entry point shared by the esam binary and the tests. args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace esam::cli
