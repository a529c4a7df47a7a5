#pragma once

// Configuration-driven experiments. A run validates the whole config first,
// computes every output in memory, and only then creates the output
// directory, so a failed run leaves no files behind.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spectra/serialize.hpp"

namespace spectra {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kVersion = "1.0.0";

const std::vector<std::string>& experiment_names();

/// Column documentation per experiment, for --help.
std::string describe_outputs();

struct Overrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

/// Files of a finished run, keyed by name relative to the output directory.
struct RunOutput {
    std::map<std::string, std::string> files;
    json summary;
    json resolved;  // every parameter that affects the numbers, defaults included
};

/// Merges overrides into the config: flags win over file fields.
json effective_config(const std::string& experiment, json config, const Overrides& o);

/// Runs the experiment without touching the filesystem. Throws
/// ValidationError / DomainError for bad input and NumericalError when a
/// computation fails.
RunOutput execute(const std::string& experiment, const json& config);

/// Full CLI contract: returns the exit status and writes diagnostics to err.
int run(const std::string& experiment, const std::filesystem::path& config_path, const Overrides& o,
        std::ostream& err);

}  // namespace spectra
