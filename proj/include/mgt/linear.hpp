#pragma once

#include "mgt/field.hpp"

#include <array>
#include <complex>

namespace mgt {

/// (u, u_t, u_tt) on one grid at time t.
struct EvolutionState {
    double t = 0.0;
    RealField u;
    RealField ut;
    RealField utt;

    const SpatialGrid& grid() const { return u.grid; }
    /// Zero state on g at time 0.
    static EvolutionState zero(const SpatialGrid& g);
};

/// Spectral image of an EvolutionState.
struct SpectralState {
    double t = 0.0;
    SpectralField u;
    SpectralField ut;
    SpectralField utt;
};

SpectralState to_spectral(const EvolutionState& s);
EvolutionState to_physical(const SpectralState& s);

/// Fourier multipliers of the three fundamental solutions and their first two time
/// derivatives at fixed (t, |xi|, beta).
///
/// The multipliers are real for real arguments, so they are stored as doubles.
struct MultiplierTriple {
    double t = 0.0;
    double xi = 0.0;
    double beta = 0.0;
    double k0 = 0.0, k1 = 0.0, k2 = 0.0;
    double dk0 = 0.0, dk1 = 0.0, dk2 = 0.0;
    double ddk0 = 0.0, ddk1 = 0.0, ddk2 = 0.0;
};

/// Roots of beta z^3 + z^2 + |xi|^2 beta z + |xi|^2 in the order (i|xi|, -i|xi|, -1/beta).
std::array<std::complex<double>, 3> characteristic_roots(double beta, double xi_norm);

/// Requires t >= 0 and beta > 0 (std::invalid_argument otherwise).
MultiplierTriple multipliers(double t, double xi_norm, double beta);

/// order-th time derivative (0..3 or higher) of multiplier `branch` in {0,1,2}.
double multiplier_derivative(double t, double xi_norm, double beta, int branch, int order);

/// Exact linear flow over a fixed time step h, precomputed per spectral mode.
///
/// Column j of the per-mode 3x3 matrix is (K_j, K_j', K_j'')(h).
class LinearFlow {
public:
    LinearFlow(const SpatialGrid& grid, double beta, double h);

    double step() const { return h_; }
    const SpatialGrid& grid() const { return grid_; }

    /// Replaces (u, ut, utt) with the linearly propagated triple, mode by mode.
    void apply(SpectralField& u, SpectralField& ut, SpectralField& utt) const;
    void apply(SpectralState& s) const;

private:
    SpatialGrid grid_;
    double h_;
    std::vector<std::array<double, 9>> matrices_;
};

/// Exact solution of the homogeneous linear problem at time s0.t + t, with u_t and
/// u_tt from analytic multiplier derivatives. Throws std::invalid_argument on grid
/// mismatch or t < 0.
EvolutionState propagate_linear(const EvolutionState& s0, double t, double beta);

/// Free wave propagation of (w, w_t) over time t; returns (w, w_t).
std::array<RealField, 2> propagate_free_wave(const RealField& w0, const RealField& w1, double t);

/// 1/2 ||beta u_tt + u_t||^2 + 1/2 ||grad(beta u_t + u)||^2.
double energy_mgt(const EvolutionState& s, double beta);

/// e^{-t/beta} (u2 - Delta u0).
RealField wave_source(const RealField& u0, const RealField& u2, double t, double beta);

/// L2-type norms of the data entering the linear estimates.
struct DataNorms {
    double u0_l2 = 0.0;
    double u0_h1 = 0.0;
    double u0_h2 = 0.0;
    double u1_l2 = 0.0;
    double u1_h1 = 0.0;
    double u2_l2 = 0.0;

    static DataNorms of(const EvolutionState& data);
};

/// Right-hand sides of the L2 estimates at time t, each multiplied by `constant`.
struct L2Bounds {
    double u = 0.0;       // ||u||
    double grad_u = 0.0;  // ||grad u||
    double hess_u = 0.0;  // ||grad^2 u||
    double ut = 0.0;      // ||u_t||
    double grad_ut = 0.0; // ||grad u_t||
    double utt = 0.0;     // ||u_tt||
};

L2Bounds l2_bound_rhs(const DataNorms& norms, double t, double constant = 1.0);

} // namespace mgt
