#include "mgt/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mgt {

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
}

QuadratureRule gauss_quadrature(double a, double b, int n_nodes) {
    if (!(a < b)) throw std::invalid_argument("gauss_quadrature: need a < b");
    if (n_nodes < 2) throw std::invalid_argument("gauss_quadrature: need at least 2 nodes");

    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(n_nodes);
    rule.weights.resize(n_nodes);
    const int n = n_nodes;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);

    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = mid;
    return rule;
}

} // namespace mgt
