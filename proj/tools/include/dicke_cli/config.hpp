#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dicke/hilbert.hpp"

namespace dicke::cli {

inline constexpr int kSchemaVersion = 1;

/// Malformed or out-of-range configuration. The message names the file and
/// either the line/column (syntax) or the dotted field path (values).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Atomic starting point in units of sqrt(4J); the field point is chosen on
/// the energy shell.
struct InitialCondition {
    std::string label;
    double q_norm = 0.0;
    double p_norm = 0.0;
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 100.0;
    double dt = 0.05;
};

enum class SnapshotPolicy { AleExtrema, FixedTimes };

struct WignerSettings {
    int n_theta = 128;
    int n_phi = 256;
    SnapshotPolicy policy = SnapshotPolicy::AleExtrema;
    std::vector<double> times;          ///< used by FixedTimes
    int extrema_count = 2;              ///< maxima and minima kept by AleExtrema
    std::vector<double> alphas{0.3, 0.5, 0.7};
};

struct PoincareSettings {
    int n_crossings = 500;
    double t_max = 1e5;
};

struct RunConfig {
    hilbert::ModelParams model;
    double energy = 21.0;
    std::vector<InitialCondition> initial_conditions;
    TimeGrid time;
    WignerSettings wigner;
    PoincareSettings poincare;
    std::string output_dir = "out";
    /// Exact bytes the config was parsed from; hashed into the manifest.
    std::string source_text;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");

std::string_view policy_name(SnapshotPolicy policy);

}  // namespace dicke::cli
