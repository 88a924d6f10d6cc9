#pragma once

#include "mgt/config.hpp"
#include "mgt/functionals.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mgt {

/// exp(-m rho^2 / (1 - rho^2)) for rho = |x|/R < 1, else 0.
double smooth_bump(double radius, double R, double sharpness);

struct DataOptions {
    double u1_scale = 0.0;
    double u2_scale = 0.0;
    double bump_sharpness = 4.0;
    std::filesystem::path custom_file;
    /// Enforce u2 - Delta u0 >= 0.
    bool critical = false;
};

/// Unscaled data (u0, u1, u2), checked for sign, support in B_R and u0 != 0.
/// Throws std::invalid_argument on violations.
EvolutionState make_profile(DataProfile profile, double R, const SpatialGrid& grid,
                            const DataOptions& opts);

/// eps times make_profile.
EvolutionState make_data(DataProfile profile, double R, const SpatialGrid& grid, double eps,
                         const DataOptions& opts = {});

DataOptions data_options(const SweepConfig& cfg);

struct LifespanRecord {
    double eps = 0.0;
    std::optional<double> T_num;
    /// amplitude, step_collapse, none, or error: followed by a message.
    std::string reason = "none";
    double wallclock = 0.0;
    double dt_used = 0.0;
    /// Set when the robustness gate ran.
    std::optional<bool> gate_passed;
    double dt_rel_change = 0.0;
    double threshold_rel_change = 0.0;
};

struct SweepOutput {
    std::vector<LifespanRecord> records;
    std::vector<FunctionalTrace> traces;
};

/// One independent run per eps, executed on up to cfg.threads workers.
SweepOutput run_sweep(const SweepConfig& cfg);

/// Single blow-up run with functional trace; used by run_sweep and the CLI.
LifespanRecord run_single(const SweepConfig& cfg, double eps, FunctionalTrace* trace = nullptr,
                          Trajectory* traj = nullptr);

} // namespace mgt
