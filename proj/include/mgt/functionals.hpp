#pragma once

#include "mgt/semilinear.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace mgt {

/// Scalar functionals sampled along a trajectory.
struct FunctionalTrace {
    std::vector<double> times;
    std::vector<double> U;
    std::vector<double> U1;
    std::optional<std::vector<double>> Ucal;
    std::vector<double> E;
    std::vector<double> nonlin_integral;
    std::vector<double> support_radius;

    std::size_t size() const { return times.size(); }
};

/// Parameters of the lambda-integral kernels xi_r and eta_r.
struct AuxKernelParams {
    double r = 0.0;
    double lambda0 = 1.0;
    double R = 1.0;
    int quad_nodes = 64; // Gauss nodes per panel of the lambda rule
};

/// Integral of u(t, .) over the box.
double space_average(const Trajectory& traj, double t);

/// Integral of u(t, .) e^{-t} Phi. Throws std::invalid_argument when the support of
/// u(t, .) comes within distance 1 of the box edge.
double weighted_average_psi(const Trajectory& traj, double t);

/// -beta Psi_ttt + Psi_tt - Delta Psi + beta Delta Psi_t for Psi = e^{-t} Phi, with
/// Delta Phi from closed-form radial derivatives.
double adjoint_residual_psi(double t, std::span<const double> x, double beta);

/// sinh(z)/z with the series near 0.
double sinhc(double z);

/// Integral over (0, lambda0) of e^{-lambda (t+R)} cosh(lambda t) Phi(lambda x) lambda^r.
/// Throws QuadratureError when doubling the node count moves the value by more than 1e-8
/// relative.
double xi_r(double t, std::span<const double> x, const AuxKernelParams& params, int dim);

/// As xi_r with cosh(lambda t) replaced by sinhc(lambda (t - s)). Requires t >= s >= 0.
double eta_r(double t, double s, std::span<const double> x, const AuxKernelParams& params,
             int dim);

/// Radial versions of xi_r and eta_r (both kernels depend on x through |x| only).
double xi_r_radial(double t, double radius, const AuxKernelParams& params, int dim);
double eta_r_radial(double t, double s, double radius, const AuxKernelParams& params, int dim);

/// Precomputed lambda nodes and log Phi(lambda_q |x_i|) for every point of a grid, so
/// that xi_r and eta_r fields share one rule.
class KernelTable {
public:
    KernelTable(const SpatialGrid& grid, const AuxKernelParams& params);

    /// eta_r(t, s, x_i) at every grid point.
    RealField eta(double t, double s) const;
    /// xi_r(t, x_i) at every grid point.
    RealField xi(double t) const;

    const AuxKernelParams& params() const { return params_; }
    std::size_t nodes() const { return log_weights_.size(); }

private:
    SpatialGrid grid_;
    AuxKernelParams params_;
    std::vector<double> lambdas_;
    std::vector<double> log_weights_;
    /// [node][point] log Phi(lambda_q |x_i|).
    std::vector<double> log_phi_;

    template <class G>
    RealField assemble(double t, G&& factor) const;
};

/// Integral of u(t, .) eta_r(t, t, .).
double weighted_average_eta(const Trajectory& traj, double t, const AuxKernelParams& params);

/// |beta U''' + U'' - nonlin| / max(nonlin, floor) at t_index, with second-order central
/// differences of U. Needs three stored neighbours on each side (std::invalid_argument).
/// A linear trace has nonlin = 0, so a meaningful floor (for instance max |U|) is needed there.
double ode_residual_U(const FunctionalTrace& trace, double beta, std::size_t t_index,
                      double floor = 1e-30);

struct IdentitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides of the integral identity for the eta-weighted functional at a stored time t.
/// `data` is the unscaled profile (u0, u1, u2); the trajectory starts from eps * data.
/// The memory term is accumulated over the stored times, so the trajectory should store
/// every step.
IdentitySides critical_identity(const Trajectory& traj, double t, const AuxKernelParams& params,
                                const EvolutionState& data, double eps, double beta);

/// K eps^p (R+t)^{n-1-(n-1)p/2}; with critical = true, (R+t) becomes <t> = 3+t.
double nonlin_lower_bound(double eps, double t, int n, double p, double R, double K,
                          bool critical = false);

/// U, U1, E, forcing integral (0 when the forcing is off) and support radius at every stored time, plus the
/// eta-weighted functional when kernel parameters are given. U1 is NaN where the
/// support is too close to the box edge.
FunctionalTrace compute_trace(const Trajectory& traj, double beta,
                              const std::optional<AuxKernelParams>& kernel = std::nullopt);

/// Columns t, U, U1, Ucal, E, nonlin, support_radius. Missing Ucal is written as empty.
void write_trace_csv(const FunctionalTrace& trace, const std::filesystem::path& path);

/// Sample lattice for the kernel lemma constants.
struct LemmaLattice {
    double t_max = 50.0;
    int n_t = 50;
    int n_s = 50;
    int n_radii = 20;
};

/// Extremal ratios of the four kernel bound families over the lattice.
struct LemmaConstants {
    double A0 = 0.0; // inf xi_r(t, x), |x| <= R
    double B0 = 0.0; // inf eta_r(t, 0, x) <t>, |x| <= R
    double B1 = 0.0; // inf eta_r(t, s, x) <t> <s>^r, |x| <= s + R, t > s
    double B2 = 0.0; // sup eta_r(t, t, x) <t>^{(n-1)/2} <t-|x|>^{r-(n-3)/2}, |x| <= t + R
};

LemmaConstants extract_lemma_constants(const AuxKernelParams& params, int dim,
                                       const LemmaLattice& lattice = {});

/// <y> = 3 + |y|.
inline double japanese_bracket(double y) { return 3.0 + (y < 0 ? -y : y); }

} // namespace mgt
