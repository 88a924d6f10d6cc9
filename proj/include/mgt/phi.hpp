#pragma once

#include <span>

namespace mgt {

/// Positive eigenfunction of the Laplacian (Delta Phi = Phi):
/// dim 1: e^x + e^-x; dim 2: integral of e^{x.w} over the unit circle;
/// dim 3: integral over the unit sphere, 4 pi sinh|x| / |x|.
/// Throws std::invalid_argument for dim outside {1,2,3} or a size mismatch.
double eval_phi(std::span<const double> x, int dim);

/// Phi as a function of |x| (it is radial in every dimension).
double phi_radial(double r, int dim);

/// log Phi, finite for every r (used once Phi would overflow).
double log_phi_radial(double r, int dim);

/// Delta Phi evaluated from closed-form radial derivatives, not from Delta Phi = Phi.
double laplacian_phi_radial(double r, int dim);

/// Trapezoidal rule over S^1 of e^{r cos(theta)}, returned as a logarithm so it is
/// usable for any r. With 256 nodes this is spectrally accurate for r up to a few hundred.
double log_phi_circle_trapezoid(double r, int nodes = 256);

} // namespace mgt
