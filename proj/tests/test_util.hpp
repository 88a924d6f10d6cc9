#pragma once

#include "mgt/linear.hpp"
#include "mgt/sweep.hpp"

#include <cmath>
#include <random>

namespace mgt::testutil {

// Compact bump of height `amp` centred at c, supported in |x - c| < width.
inline RealField bump_field(const SpatialGrid& g, double width, double amp = 1.0,
                            std::array<double, 3> c = {0, 0, 0}) {
    RealField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.position(i);
        double r2 = 0.0;
        for (int d = 0; d < g.dim(); ++d) r2 += (x[d] - c[d]) * (x[d] - c[d]);
        f.values[i] = amp * smooth_bump(std::sqrt(r2), width, 4.0);
    }
    return f;
}

// Random sum of small bumps inside B_R, positive amplitudes.
inline RealField random_supported_field(const SpatialGrid& g, double R, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.2, 1.0), pos(-0.4 * R, 0.4 * R);
    RealField f(g);
    for (int k = 0; k < 3; ++k) {
        std::array<double, 3> c{0, 0, 0};
        for (int d = 0; d < g.dim(); ++d) c[d] = pos(rng);
        f += bump_field(g, 0.5 * R, amp(rng), c);
    }
    return f;
}

inline EvolutionState random_supported_data(const SpatialGrid& g, double R, std::mt19937_64& rng) {
    EvolutionState s = EvolutionState::zero(g);
    s.u = random_supported_field(g, R, rng);
    s.ut = random_supported_field(g, R, rng);
    s.utt = random_supported_field(g, R, rng);
    return s;
}

inline double max_abs_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace mgt::testutil
