#pragma once

#include <functional>
#include <vector>

namespace mgt {

/// Gauss-Legendre rule on (a, b).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = 0.0;
    double b = 0.0;

    double integrate(const std::function<double(double)>& f) const;
};

/// n_nodes-point Gauss-Legendre rule, exact for polynomials of degree <= 2 n_nodes - 1.
/// Throws std::invalid_argument unless a < b and n_nodes >= 2.
QuadratureRule gauss_quadrature(double a, double b, int n_nodes);

} // namespace mgt
