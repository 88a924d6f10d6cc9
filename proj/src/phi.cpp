#include "mgt/phi.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mgt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_dim(int dim) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("Phi: dim must be 1, 2 or 3, got " + std::to_string(dim));
}

// log(2 pi I0(r)) for large r from the asymptotic series of e^{-r} I0(r).
double log_bessel_i0_scaled_large(double r) {
    // e^{-r} I0(r) ~ (2 pi r)^{-1/2} sum_k ((2k-1)!!)^2 / (k! 8^k r^k)
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
        const double next = term * (2.0 * k - 1) * (2.0 * k - 1) / (8.0 * k * r);
        if (std::abs(next) > std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * sum) break;
    }
    return -0.5 * std::log(kTwoPi * r) + std::log(sum);
}

} // namespace

double phi_radial(double r, int dim) {
    check_dim(dim);
    r = std::abs(r);
    switch (dim) {
    case 1: return 2.0 * std::cosh(r);
    case 2: return r < 700.0 ? kTwoPi * std::cyl_bessel_i(0.0, r) : std::exp(log_phi_radial(r, 2));
    default:
        if (r < 1e-4) return 4.0 * std::numbers::pi * (1.0 + r * r / 6.0 + r * r * r * r / 120.0);
        return 4.0 * std::numbers::pi * std::sinh(r) / r;
    }
}

double log_phi_radial(double r, int dim) {
    check_dim(dim);
    r = std::abs(r);
    if (r < (dim == 2 ? 700.0 : 30.0)) return std::log(phi_radial(r, dim));
    switch (dim) {
    case 1: return r + std::log1p(std::exp(-2.0 * r));
    case 2: return std::log(kTwoPi) + r + log_bessel_i0_scaled_large(r);
    default: return std::log(2.0 * std::numbers::pi / r) + r + std::log1p(-std::exp(-2.0 * r));
    }
}

double eval_phi(std::span<const double> x, int dim) {
    check_dim(dim);
    if (x.size() != static_cast<std::size_t>(dim))
        throw std::invalid_argument("eval_phi: point has " + std::to_string(x.size()) +
                                    " components, expected " + std::to_string(dim));
    if (dim == 1) return std::exp(x[0]) + std::exp(-x[0]);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return phi_radial(std::sqrt(r2), dim);
}

double laplacian_phi_radial(double r, int dim) {
    check_dim(dim);
    r = std::abs(r);
    switch (dim) {
    case 1: return 2.0 * std::cosh(r);
    case 2: {
        // 2 pi (I0'' + I0'/r) with I0' = I1 and I0'' = I0 - I1/r.
        if (r < 1e-6) return kTwoPi * (1.0 + r * r / 4.0);
        const double i0 = std::cyl_bessel_i(0.0, r);
        const double i1 = std::cyl_bessel_i(1.0, r);
        const double d2 = i0 - i1 / r;
        return kTwoPi * (d2 + i1 / r);
    }
    default: {
        // f = sinh r / r: f'' + 2 f'/r with f' = cosh r / r - sinh r / r^2.
        if (r < 1e-3) return 4.0 * std::numbers::pi * (1.0 + r * r / 6.0 + r * r * r * r / 120.0);
        const double s = std::sinh(r), c = std::cosh(r);
        const double f1 = c / r - s / (r * r);
        const double f2 = s / r - 2.0 * c / (r * r) + 2.0 * s / (r * r * r);
        return 4.0 * std::numbers::pi * (f2 + 2.0 * f1 / r);
    }
    }
}

double log_phi_circle_trapezoid(double r, int nodes) {
    if (nodes < 2) throw std::invalid_argument("log_phi_circle_trapezoid: need at least 2 nodes");
    r = std::abs(r);
    // Factor out e^r so the sum stays representable.
    double sum = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double theta = kTwoPi * k / nodes;
        sum += std::exp(r * (std::cos(theta) - 1.0));
    }
    return r + std::log(kTwoPi * sum / nodes);
}

} // namespace mgt
