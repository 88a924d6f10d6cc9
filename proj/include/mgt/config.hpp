#pragma once

#include "mgt/semilinear.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mgt {

enum class DataProfile { bump, gaussian_truncated, custom_file };
enum class RunMode { subcritical, critical };

std::string to_string(DataProfile p);
std::string to_string(RunMode m);

/// Validated run description. See docs/config.md for the file format.
struct SweepConfig {
    int schema_version = 1;
    int n = 1;
    SolverConfig solver;
    std::vector<double> eps_list;
    double R = 1.0;
    DataProfile profile = DataProfile::bump;
    /// Multiples of the bump used for u1 and u2 by the bump profile.
    double u1_scale = 0.0;
    double u2_scale = 0.0;
    /// Exponent m of exp(-m rho^2 / (1 - rho^2)).
    double bump_sharpness = 4.0;
    /// 0 selects R + t_max + 2.
    double half_width = 0.0;
    int points_per_dim = 256;
    int threads = 1;
    std::filesystem::path output_dir = "out";
    RunMode mode = RunMode::subcritical;
    std::filesystem::path custom_file;
    double lambda0 = 1.0;
    int quad_nodes = 64;
    /// Re-run each blow-up at dt/2 and at amplitudes x0.1, x10 before fitting.
    bool robustness_gate = true;

    double effective_half_width() const;
    SpatialGrid make_grid() const;
};

/// Parses and validates a JSON document. Throws ConfigError with a field path.
SweepConfig parse_config_text(const std::string& text);
/// Throws ConfigError (path "") when the file cannot be read.
SweepConfig parse_config(const std::filesystem::path& path);

/// Serializes every field, defaults included.
std::string config_to_json(const SweepConfig& cfg);

} // namespace mgt
