#include "mgt/linear.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace mgt;
using std::numbers::pi;
using cd = std::complex<double>;

namespace {

// Independent oracle: solve the Vandermonde system for the coefficients of
// exp(lambda_m t) with the delta initial data of branch j, by Cramer's rule.
cd vandermonde_solution(double t, double k, double beta, int branch, int order) {
    const cd l[3] = {cd(0, k), cd(0, -k), cd(-1.0 / beta, 0)};
    cd V[3][3];
    for (int row = 0; row < 3; ++row)
        for (int m = 0; m < 3; ++m) V[row][m] = std::pow(l[m], row);
    auto det = [](const cd M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
               M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const cd D = det(V);
    cd result = 0.0;
    for (int m = 0; m < 3; ++m) {
        cd W[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) W[r][c] = c == m ? cd(r == branch ? 1.0 : 0.0) : V[r][c];
        result += det(W) / D * std::pow(l[m], order) * std::exp(l[m] * t);
    }
    return result;
}

} // namespace

TEST(Roots, Ordering) {
    auto r = characteristic_roots(2.0, 3.0);
    EXPECT_EQ(r[0], cd(0, 3));
    EXPECT_EQ(r[1], cd(0, -3));
    EXPECT_EQ(r[2], cd(-0.5, 0));
    r = characteristic_roots(1.0, 0.0);
    EXPECT_EQ(std::abs(r[0]), 0.0);
    EXPECT_EQ(r[2], cd(-1, 0));
    r = characteristic_roots(0.5, 1.0);
    EXPECT_EQ(r[2], cd(-2, 0));
}

TEST(Multipliers, InitialDataIdentity) {
    for (double k : {0.0, 1e-7, 0.3, 1.0, 40.0})
        for (double beta : {0.5, 1.0, 2.0}) {
            const auto m = multipliers(0.0, k, beta);
            EXPECT_NEAR(m.k0, 1.0, 1e-15);
            EXPECT_NEAR(m.k1, 0.0, 1e-15);
            EXPECT_NEAR(m.k2, 0.0, 1e-15);
            EXPECT_NEAR(m.dk0, 0.0, 1e-15);
            EXPECT_NEAR(m.dk1, 1.0, 1e-15);
            EXPECT_NEAR(m.dk2, 0.0, 1e-15);
            EXPECT_NEAR(m.ddk0, 0.0, 1e-12);
            EXPECT_NEAR(m.ddk1, 0.0, 1e-15);
            EXPECT_NEAR(m.ddk2, 1.0, 1e-15);
        }
}

TEST(Multipliers, MatchVandermondeOracle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(0.0, 10.0), uk(0.05, 8.0), ub(0.3, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double t = ut(rng), k = uk(rng), beta = ub(rng);
        for (int branch = 0; branch < 3; ++branch)
            for (int order = 0; order < 4; ++order) {
                const cd ref = vandermonde_solution(t, k, beta, branch, order);
                EXPECT_LT(std::abs(ref.imag()), 1e-9);
                const double got = multiplier_derivative(t, k, beta, branch, order);
                EXPECT_NEAR(got, ref.real(), 1e-9 * (1 + std::abs(ref.real())))
                    << "t=" << t << " k=" << k << " beta=" << beta << " branch=" << branch << " order=" << order;
            }
    }
}

TEST(Multipliers, ReferenceValues) {
    EXPECT_NEAR(multipliers(pi, 1.0, 1.0).k1, 0.0, 1e-15);
    for (double beta : {0.5, 1.0, 2.0})
        for (double t : {0.0, 0.3, 4.0}) {
            const auto m = multipliers(t, 0.0, beta);
            EXPECT_NEAR(m.k0, 1.0, 1e-15);
            EXPECT_NEAR(m.k1, t, 1e-15);
            EXPECT_NEAR(m.k2, beta * t - beta * beta * (1 - std::exp(-t / beta)), 1e-14);
        }
    // beta = 1, |xi| = 1: K0 = (cos t + sin t + e^{-t}) / 2.
    for (double t : {0.5, 2.0, 7.0})
        EXPECT_NEAR(multipliers(t, 1.0, 1.0).k0, 0.5 * (std::cos(t) + std::sin(t) + std::exp(-t)), 1e-14);
    // e^{-t/beta} coefficient of K2 is beta^2/(1 + beta^2 k^2): visible as the t -> infinity
    // offset after removing the oscillating part.
    const double beta = 2.0, k = 0.7, b2 = beta * beta * k * k;
    for (double t : {0.0, 1.0, 3.0}) {
        const double osc = (-beta * beta * std::cos(k * t) + beta * std::sin(k * t) / k) / (1 + b2);
        EXPECT_NEAR(multipliers(t, k, beta).k2 - osc, beta * beta / (1 + b2) * std::exp(-t / beta), 1e-14);
    }
}

TEST(Multipliers, CharacteristicOdeAndTaylorBranch) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ut(0.0, 20.0), ub(0.2, 5.0), ue(-12.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
        const double t = ut(rng), beta = ub(rng);
        const double k = trial % 4 == 0 ? 0.0 : std::pow(10.0, ue(rng));
        for (int b = 0; b < 3; ++b) {
            double d[4];
            for (int o = 0; o < 4; ++o) d[o] = multiplier_derivative(t, k, beta, b, o);
            const double scale = 1 + std::abs(beta * d[3]) + std::abs(d[2]) + k * k * (std::abs(d[0]) + beta * std::abs(d[1]));
            worst = std::max(worst, std::abs(beta * d[3] + d[2] + k * k * d[0] + beta * k * k * d[1]) / scale);
        }
    }
    EXPECT_LT(worst, 1e-10);
    // Continuity across the small-argument switch.
    for (double beta : {0.5, 2.0}) {
        const double t = 1.0, k_lo = 0.999e-4, k_hi = 1.001e-4;
        EXPECT_NEAR(multipliers(t, k_lo, beta).k1, multipliers(t, k_hi, beta).k1, 1e-11);
        EXPECT_NEAR(multipliers(t, k_lo, beta).k2, multipliers(t, k_hi, beta).k2, 1e-11);
    }
}

TEST(Propagation, IdentityAtZero) {
    const auto g = make_grid(1, 8.0, 128);
    std::mt19937_64 rng(1);
    const auto s0 = testutil::random_supported_data(g, 1.0, rng);
    const auto s = propagate_linear(s0, 0.0, 1.0);
    EXPECT_EQ(s.u.values, s0.u.values);
    EXPECT_EQ(s.ut.values, s0.ut.values);
    EXPECT_EQ(s.utt.values, s0.utt.values);
}

TEST(Propagation, SingleMode) {
    const auto g = make_grid(1, pi, 16);
    EvolutionState s0 = EvolutionState::zero(g);
    s0.u = RealField::from_function(g, [](auto x) { return std::cos(x[0]); });
    for (double t : {0.4, 1.7, 6.0}) {
        const auto s = propagate_linear(s0, t, 1.0);
        const double a = 0.5 * (std::cos(t) + std::sin(t) + std::exp(-t));
        for (std::size_t i = 0; i < g.size(); ++i)
            EXPECT_NEAR(s.u.values[i], a * s0.u.values[i], 1e-13);
    }
}

TEST(Propagation, GroupProperty) {
    const auto g = make_grid(2, 6.0, 48);
    std::mt19937_64 rng(3);
    const auto s0 = testutil::random_supported_data(g, 1.0, rng);
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto direct = propagate_linear(s0, 2.0, beta);
        const auto composite = propagate_linear(propagate_linear(s0, 0.7, beta), 1.3, beta);
        EXPECT_NEAR(composite.t, 2.0, 1e-15);
        const double scale = direct.u.max_abs() + direct.ut.max_abs() + direct.utt.max_abs();
        EXPECT_LT(testutil::max_abs_diff(composite.u, direct.u), 1e-11 * scale);
        EXPECT_LT(testutil::max_abs_diff(composite.ut, direct.ut), 1e-11 * scale);
        EXPECT_LT(testutil::max_abs_diff(composite.utt, direct.utt), 1e-11 * scale);
    }
}

TEST(Propagation, GridMismatchRejected) {
    EvolutionState s = EvolutionState::zero(make_grid(1, 4.0, 32));
    s.ut = RealField(make_grid(1, 4.0, 64));
    EXPECT_THROW(propagate_linear(s, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(propagate_linear(EvolutionState::zero(make_grid(1, 4.0, 32)), -1.0, 1.0), std::invalid_argument);
}

TEST(Propagation, CombinationSolvesFreeWave) {
    const auto g = make_grid(1, 16.0, 512);
    std::mt19937_64 rng(9);
    const auto s0 = testutil::random_supported_data(g, 1.0, rng);
    for (double beta : {0.5, 2.0}) {
        const RealField w0 = s0.u + beta * s0.ut, w1 = s0.ut + beta * s0.utt;
        for (double t : {1.0, 5.0}) {
            const auto s = propagate_linear(s0, t, beta);
            const auto w = propagate_free_wave(w0, w1, t);
            const RealField combo = s.u + beta * s.ut, combo_t = s.ut + beta * s.utt;
            EXPECT_LT(testutil::max_abs_diff(combo, w[0]), 1e-9 * w[0].max_abs());
            EXPECT_LT(testutil::max_abs_diff(combo_t, w[1]), 1e-9 * w[1].max_abs());
        }
    }
}

TEST(Energy, ReferenceValues) {
    const auto g = make_grid(1, pi, 32);
    EXPECT_EQ(energy_mgt(EvolutionState::zero(g), 1.0), 0.0);
    EvolutionState c = EvolutionState::zero(g);
    std::fill(c.u.values.begin(), c.u.values.end(), 3.0);
    EXPECT_NEAR(energy_mgt(c, 1.0), 0.0, 1e-20);
    EvolutionState s = EvolutionState::zero(g);
    s.u = RealField::from_function(g, [](auto x) { return std::sin(x[0]); });
    EXPECT_NEAR(energy_mgt(s, 1.0), pi / 2, 1e-12);
}

TEST(Energy, ConservedUnderPropagation) {
    const auto g = make_grid(1, 24.0, 1024);
    std::mt19937_64 rng(21);
    for (double beta : {0.5, 1.0, 2.0}) {
        const auto s0 = testutil::random_supported_data(g, 1.0, rng);
        const double E0 = energy_mgt(s0, beta);
        for (double t : {1.0, 7.5, 20.0})
            EXPECT_LE(std::abs(energy_mgt(propagate_linear(s0, t, beta), beta) - E0), 1e-10 * std::max(E0, 1.0));
    }
}

TEST(WaveSource, Cases) {
    const auto g = make_grid(1, pi, 32);
    const auto u0 = RealField::from_function(g, [](auto x) { return std::sin(x[0]); });
    const auto zero = wave_source(u0, laplacian(u0), 2.0, 1.0);
    EXPECT_LT(zero.max_abs(), 1e-13);
    RealField u2(g);
    const auto at0 = wave_source(u0, u2, 0.0, 1.0);
    const auto lap = laplacian(u0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(at0.values[i], -lap.values[i], 1e-15);
    const auto at1 = wave_source(u0, u2, 1.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(at1.values[i], std::exp(-1.0) * u0.values[i], 1e-13);
}

TEST(L2Estimates, FormulaValues) {
    const auto zero = l2_bound_rhs(DataNorms{}, 5.0, 10.0);
    EXPECT_EQ(zero.u, 0.0);
    EXPECT_EQ(zero.utt, 0.0);
    DataNorms n;
    n.u0_l2 = 1.0;
    EXPECT_EQ(l2_bound_rhs(n, 17.0, 2.5).u, 2.5);
    n.u1_l2 = n.u2_l2 = 1.0;
    EXPECT_EQ(l2_bound_rhs(n, 3.0, 2.0).u, 18.0);
}

TEST(L2Estimates, PropagatorRespectsBounds) {
    const auto g = make_grid(1, 30.0, 1024);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 6; ++trial) {
        const double beta = std::array{0.5, 1.0, 2.0}[trial % 3];
        const auto s0 = testutil::random_supported_data(g, 1.0, rng);
        const auto norms = DataNorms::of(s0);
        for (double t : {0.5, 3.0, 12.0, 25.0}) {
            const auto s = propagate_linear(s0, t, beta);
            const auto b = l2_bound_rhs(norms, t, 10.0);
            EXPECT_LE(l2_norm(s.u), b.u);
            EXPECT_LE(gradient_norm(s.u), b.grad_u);
            EXPECT_LE(homogeneous_sobolev_norm(s.u, 2), b.hess_u);
            EXPECT_LE(l2_norm(s.ut), b.ut);
            EXPECT_LE(gradient_norm(s.ut), b.grad_ut);
            EXPECT_LE(l2_norm(s.utt), b.utt);
        }
    }
}

TEST(Support, LinearCone) {
    const auto g = make_grid(1, 20.0, 2048);
    std::mt19937_64 rng(4);
    const auto s0 = testutil::random_supported_data(g, 1.0, rng);
    for (double t : {2.0, 8.0, 16.0})
        EXPECT_LE(mass_outside_ball(propagate_linear(s0, t, 1.0).u, 1.0 + t + 2 * g.spacing()), 1e-8) << t;
}
