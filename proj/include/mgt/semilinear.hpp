#pragma once

#include "mgt/linear.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mgt {

struct SolverConfig {
    double beta = 1.0;
    double p = 2.0;
    /// Time step; 0 selects spacing/4.
    double dt = 0.0;
    double t_max = 10.0;
    double blowup_amplitude = 1e6;
    double picard_tol = 1e-10;
    int picard_max_iter = 60;
    /// Unset means on exactly when p is 2 or 3.
    std::optional<bool> dealias;
    /// Disables the |u|^p term (linear runs).
    bool forcing = true;
    /// Interval between stored states; 0 stores every step.
    double output_interval = 0.0;

    double effective_dt(const SpatialGrid& g) const;
    bool effective_dealias() const;
};

/// Throws std::invalid_argument for out-of-range fields. With picard = true also
/// enforces p <= n/(n-2) for n >= 3.
void validate(const SolverConfig& cfg, int dim, bool picard = false);

enum class BlowupReason { amplitude, step_collapse };

std::string to_string(BlowupReason r);
BlowupReason blowup_reason_from_string(const std::string& s);

struct Blowup {
    double time = 0.0;
    BlowupReason reason = BlowupReason::amplitude;
};

struct Trajectory {
    SpatialGrid grid;
    std::vector<double> times;
    std::vector<EvolutionState> states;
    std::optional<Blowup> blowup;
    SolverConfig cfg;

    std::size_t size() const { return times.size(); }
    /// Index of a stored time (to within 1e-12 relative), or std::invalid_argument.
    std::size_t index_of(double t) const;
    const EvolutionState& at(double t) const { return states[index_of(t)]; }
    void push_back(EvolutionState s);
};

/// |u|^p pointwise.
RealField power_nonlinearity(const RealField& u, double p);

/// The Duhamel operator: linear solution from `data` plus the trapezoidal time
/// integral of K2(t - tau) * |u(tau)|^p over the candidate's stored times.
Trajectory duhamel_apply(const Trajectory& candidate, const EvolutionState& data,
                         const SolverConfig& cfg);

/// max over stored times of ||u|| + ||grad u|| + ||Delta u|| + ||u_t|| + ||grad u_t|| + ||u_tt||.
double xt_norm(const Trajectory& traj);
/// xt_norm of the pointwise difference of two trajectories on the same times.
double xt_distance(const Trajectory& a, const Trajectory& b);

struct PicardStats {
    int iterations = 0;
    std::vector<double> increments;
};

/// Fixed-point iteration of duhamel_apply on a uniform time grid of step cfg.dt over
/// [0, T], started from the linear solution. Stops once the X(T) increment is at most
/// picard_tol. Throws PicardDivergence after 5 consecutive growing increments, and
/// NumericalFailure when picard_max_iter is exhausted.
Trajectory picard_solve(const EvolutionState& data, const SolverConfig& cfg, double T,
                        PicardStats* stats = nullptr);

/// ||N u - N v||_X / ||u - v||_X with u the linear solution of `data` on [0, T] and
/// v = u + delta * w for the time-constant field w = data.u / ||data.u||.
double lipschitz_quotient(const EvolutionState& data, const SolverConfig& cfg, double T,
                          double delta = 1e-3);

/// Exact linear flow plus RK4 on the forcing (integrating-factor scheme).
/// Stops at t_max or at blow-up, which is refined by one re-step at dt/2.
Trajectory step_solve(const EvolutionState& data, const SolverConfig& cfg);

/// First time max|u| exceeds `amplitude`, bracketed by the stored times and refined by
/// one bisection. Falls back to a recorded step collapse. None if never exceeded.
std::optional<double> detect_blowup(const Trajectory& traj, double amplitude);

/// States (w, w_t, w_tt) with w = tau u_t + u. w_tt uses u_ttt from the equation.
Trajectory memory_reformulate(const Trajectory& u_traj, double tau);

/// integral_0^t e^{-(t-s)/tau} w(s) ds using the recursive exponential trapezoid.
RealField memory_convolve(const Trajectory& w_traj, double tau, double t);

/// Relative L2 residual of beta u_ttt + u_tt - Delta u - beta Delta u_t - |u|^p at a
/// stored time, with u_ttt from a 4-point one-sided difference of u_tt.
double residual_mgt(const Trajectory& traj, const SolverConfig& cfg, double t);

/// Writes stem.bin (little-endian float64, [state][u,ut,utt][point]) and stem.json.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& stem);
Trajectory load_trajectory(const std::filesystem::path& stem);

} // namespace mgt
