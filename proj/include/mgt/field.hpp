#pragma once

#include "mgt/grid.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace mgt {

using Complex = std::complex<double>;

/// Real samples on a SpatialGrid.
struct RealField {
    SpatialGrid grid;
    std::vector<double> values;

    RealField() = default;
    explicit RealField(const SpatialGrid& g) : grid(g), values(g.size(), 0.0) {}
    RealField(const SpatialGrid& g, std::vector<double> v);

    /// Samples f at every grid point.
    static RealField from_function(const SpatialGrid& g,
                                   const std::function<double(std::span<const double>)>& f);

    std::size_t size() const { return values.size(); }
    double max_abs() const;
    bool all_finite() const;

    RealField& operator+=(const RealField& o);
    RealField& operator-=(const RealField& o);
    RealField& operator*=(double s);
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double s, RealField a);

/// Fourier coefficients approximating the continuous transform: the DFT scaled by
/// the cell volume, so the zero coefficient is the grid mean times the box volume.
struct SpectralField {
    SpatialGrid grid;
    std::vector<Complex> coefficients;

    SpectralField() = default;
    explicit SpectralField(const SpatialGrid& g) : grid(g), coefficients(g.size(), Complex{}) {}

    std::size_t size() const { return coefficients.size(); }
};

SpectralField forward_transform(const RealField& f);

/// Inverse of forward_transform. An imaginary residue up to 1e-10 relative to the
/// largest real part is discarded; larger residue throws SpectralSymmetryError.
RealField inverse_transform(const SpectralField& F);

/// Grid quadrature h^dim * sum f.
double integrate(const RealField& f);
/// Grid quadrature of the pointwise product.
double integrate_product(const RealField& f, const RealField& g);
double l2_norm(const RealField& f);
/// sqrt((1/V) sum |F|^2), equal to the L2 norm of the represented field.
double l2_norm(const SpectralField& F);

/// Multiplies every coefficient by m(|k|) and transforms back.
RealField apply_radial_multiplier(const RealField& f, const std::function<double(double)>& m);
RealField laplacian(const RealField& f);
/// L2 norm of the gradient, computed spectrally.
double gradient_norm(const RealField& f);
/// ||(-Delta)^{s/2} f|| for integer s >= 0, i.e. the L2 norm of |k|^s F.
double homogeneous_sobolev_norm(const RealField& f, int order);
/// Inhomogeneous H^s norm with weight (1+|k|^2)^s.
double sobolev_norm(const RealField& f, int order);

/// Zeroes every coefficient with some axis wavenumber above 2/3 of the Nyquist value.
void dealias_two_thirds(SpectralField& F);

/// Fraction of the L1 mass of |f| sitting at grid points with |x| > radius.
/// Returns 0 for an identically zero field.
double mass_outside_ball(const RealField& f, double radius);

/// Smallest radius outside of which at most `tol` of the L1 mass of |f| lives.
double support_radius(const RealField& f, double tol = 1e-10);

} // namespace mgt
