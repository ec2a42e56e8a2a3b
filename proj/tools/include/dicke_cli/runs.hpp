#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke_cli/config.hpp"

namespace dicke::cli {

/// A component failure annotated with the experiment and initial condition.
class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::filesystem::path out_dir;  ///< overrides RunConfig::output_dir when non-empty
    int threads = 0;                ///< 0 keeps the OpenMP default
    bool seedless = false;
};

struct RunResult {
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> files;  ///< data files, relative to out_dir
    bool cutoff_ok = true;
};

RunResult run_spectrum(const RunConfig& config, const RunOptions& options);
RunResult run_entropy(const RunConfig& config, const RunOptions& options);
RunResult run_wigner(const RunConfig& config, const RunOptions& options);
RunResult run_poincare(const RunConfig& config, const RunOptions& options);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace dicke::cli
