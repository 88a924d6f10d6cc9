#include "mgt/errors.hpp"
#include "mgt/semilinear.hpp"
#include "mgt/quadrature.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace mgt;

namespace {

EvolutionState bump_data(const SpatialGrid& g, double eps, double u1 = 0.0) {
    EvolutionState s = EvolutionState::zero(g);
    s.u = testutil::bump_field(g, 1.0, eps);
    s.ut = testutil::bump_field(g, 1.0, eps * u1);
    return s;
}

Trajectory constant_trajectory(const SpatialGrid& g, const std::vector<double>& times,
                               const std::function<double(double, double)>& w) {
    Trajectory tr;
    tr.grid = g;
    for (double t : times) {
        EvolutionState s = EvolutionState::zero(g);
        s.t = t;
        for (std::size_t i = 0; i < g.size(); ++i) s.u.values[i] = w(t, g.coordinates()[i]);
        tr.push_back(std::move(s));
    }
    return tr;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

double max_state_diff(const EvolutionState& a, const EvolutionState& b) {
    return std::max({testutil::max_abs_diff(a.u, b.u), testutil::max_abs_diff(a.ut, b.ut),
                     testutil::max_abs_diff(a.utt, b.utt)});
}

} // namespace

TEST(Config, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(validate(c, 1));
    c.p = 4.0;
    EXPECT_NO_THROW(validate(c, 3));
    EXPECT_THROW(validate(c, 3, true), std::invalid_argument);
    c = SolverConfig{};
    c.beta = 0.0;
    EXPECT_THROW(validate(c, 1), std::invalid_argument);
    EXPECT_TRUE(SolverConfig{}.effective_dealias());
    SolverConfig frac;
    frac.p = 2.5;
    EXPECT_FALSE(frac.effective_dealias());
}

TEST(Duhamel, ZeroAndLinearCases) {
    const auto g = make_grid(1, 6.0, 64);
    SolverConfig cfg;
    cfg.dt = 0.05;
    const auto times = linspace(0.0, 1.0, 21);
    const Trajectory zero = constant_trajectory(g, times, [](double, double) { return 0.0; });
    const Trajectory n0 = duhamel_apply(zero, EvolutionState::zero(g), cfg);
    EXPECT_EQ(xt_norm(n0), 0.0);

    const auto data = bump_data(g, 0.5, 0.3);
    const Trajectory lin = duhamel_apply(zero, data, cfg);
    for (std::size_t k = 0; k < times.size(); ++k)
        EXPECT_LT(max_state_diff(lin.states[k], propagate_linear(data, times[k], cfg.beta)), 1e-13);
}

TEST(Picard, ZeroDataConvergesImmediately) {
    const auto g = make_grid(1, 6.0, 64);
    SolverConfig cfg;
    cfg.dt = 0.05;
    PicardStats stats;
    const auto u = picard_solve(EvolutionState::zero(g), cfg, 0.5, &stats);
    EXPECT_EQ(stats.iterations, 1);
    EXPECT_EQ(xt_norm(u), 0.0);
}

TEST(Picard, FixedPointAndStepperAgreement) {
    const auto g = make_grid(1, 8.0, 128);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 0.5;
    for (double eps : {1e-6, 1e-2}) {
        const auto data = bump_data(g, eps);
        PicardStats stats;
        const auto u = picard_solve(data, cfg, 0.5, &stats);
        EXPECT_LE(xt_distance(duhamel_apply(u, data, u.cfg), u), 10 * cfg.picard_tol);
        const auto v = step_solve(data, cfg);
        ASSERT_EQ(u.size(), v.size());
        double worst = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k)
            worst = std::max(worst, testutil::max_abs_diff(u.states[k].u, v.states[k].u));
        EXPECT_LE(worst, 1e-6 * eps) << eps;
        EXPECT_LE(residual_mgt(u, u.cfg, u.times[u.size() / 2]), 1e-4);
    }
}

TEST(Picard, LargeDataLongHorizonFails) {
    const auto g = make_grid(1, 6.0, 64);
    SolverConfig cfg;
    cfg.dt = 0.05;
    EXPECT_THROW(picard_solve(bump_data(g, 5.0), cfg, 10.0), PicardDivergence);
}

TEST(Picard, ContractionFactorLinearInT) {
    const auto g = make_grid(1, 8.0, 128);
    SolverConfig cfg;
    cfg.dt = 0.005;
    const auto data = bump_data(g, 0.1);
    const double q1 = lipschitz_quotient(data, cfg, 0.1);
    const double q2 = lipschitz_quotient(data, cfg, 0.2);
    EXPECT_GT(q1, 0.0);
    EXPECT_GE(q2 / q1, 1.5);
    EXPECT_LE(q2 / q1, 2.5);
}

TEST(Stepper, LinearLimit) {
    const auto g = make_grid(1, 10.0, 256);
    SolverConfig cfg;
    cfg.forcing = false;
    cfg.t_max = 5.0;
    std::mt19937_64 rng(2);
    const auto data = testutil::random_supported_data(g, 1.0, rng);
    const auto traj = step_solve(data, cfg);
    EXPECT_FALSE(traj.blowup);
    EXPECT_NEAR(traj.times.back(), 5.0, 1e-12);
    const auto exact = propagate_linear(data, 5.0, cfg.beta);
    EXPECT_LE(max_state_diff(traj.states.back(), exact), 1e-8 * std::max(1.0, exact.u.max_abs()));
    EXPECT_EQ(detect_blowup(traj, cfg.blowup_amplitude), std::nullopt);
}

TEST(Stepper, OutputInterval) {
    const auto g = make_grid(1, 6.0, 64);
    SolverConfig cfg;
    cfg.forcing = false;
    cfg.dt = 0.01;
    cfg.t_max = 1.0;
    cfg.output_interval = 0.1;
    const auto traj = step_solve(bump_data(g, 1.0), cfg);
    ASSERT_EQ(traj.size(), 11u);
    EXPECT_NEAR(traj.times[3], 0.3, 1e-12);
}

TEST(Stepper, BlowupAndRobustness) {
    const auto g = make_grid(1, 32.0, 1024);
    SolverConfig cfg;
    cfg.t_max = 30.0;
    const auto data = bump_data(g, 0.3);
    const auto traj = step_solve(data, cfg);
    ASSERT_TRUE(traj.blowup.has_value());
    EXPECT_EQ(traj.blowup->reason, BlowupReason::amplitude);
    EXPECT_LT(traj.times.back(), traj.blowup->time);
    const auto T = detect_blowup(traj, cfg.blowup_amplitude);
    ASSERT_TRUE(T.has_value());

    // Bracketing: the first stored state above 1e5 sits at index k; T lies in (t_{k-1}, t_k].
    const auto T5 = detect_blowup(traj, 1e5);
    ASSERT_TRUE(T5.has_value());
    std::size_t k = 0;
    while (traj.states[k].u.max_abs() <= 1e5) ++k;
    EXPECT_GT(*T5, traj.times[k - 1]);
    EXPECT_LE(*T5, traj.times[k]);

    SolverConfig high = cfg;
    high.blowup_amplitude = 1e7;
    const auto T7 = detect_blowup(step_solve(data, high), 1e7);
    ASSERT_TRUE(T7.has_value());
    EXPECT_LT(std::abs(*T7 - *T5) / *T, 0.02);

    SolverConfig half = cfg;
    half.dt = 0.5 * cfg.effective_dt(g);
    const auto Th = detect_blowup(step_solve(data, half), cfg.blowup_amplitude);
    ASSERT_TRUE(Th.has_value());
    EXPECT_LT(std::abs(*Th - *T) / *T, 0.05);
}

TEST(Stepper, LifespanMonotoneInEps) {
    const auto g = make_grid(1, 40.0, 1024);
    SolverConfig cfg;
    cfg.t_max = 38.0;
    double previous = 0.0;
    for (double eps : {0.5, 0.3, 0.2}) {
        const auto T = detect_blowup(step_solve(bump_data(g, eps), cfg), cfg.blowup_amplitude);
        ASSERT_TRUE(T.has_value()) << eps;
        EXPECT_GT(*T, previous);
        previous = *T;
    }
}

TEST(Stepper, SupportCone) {
    const auto g = make_grid(1, 16.0, 1024);
    SolverConfig cfg;
    cfg.t_max = 12.0;
    cfg.output_interval = 1.0;
    const auto traj = step_solve(bump_data(g, 0.05, 1.0), cfg);
    for (std::size_t k = 0; k < traj.size(); ++k)
        EXPECT_LE(mass_outside_ball(traj.states[k].u, 1.0 + traj.times[k] + 2 * g.spacing()), 1e-8)
            << traj.times[k];
}

TEST(Detect, BoundedTrajectoryHasNoBlowup) {
    const auto g = make_grid(1, 4.0, 32);
    const auto tr = constant_trajectory(g, linspace(0, 1, 5), [](double, double) { return 1.0; });
    EXPECT_EQ(detect_blowup(tr, 10.0), std::nullopt);
}

TEST(Memory, ReformulationCases) {
    const auto g = make_grid(1, 6.0, 64);
    const auto tr = constant_trajectory(g, linspace(0, 1, 5), [](double, double x) { return std::exp(-x * x); });
    const auto w = memory_reformulate(tr, 0.7);
    for (std::size_t k = 0; k < tr.size(); ++k) EXPECT_EQ(w.states[k].u.values, tr.states[k].u.values);
    EXPECT_THROW(memory_reformulate(tr, 0.0), std::invalid_argument);
}

TEST(Memory, ReformulatedLinearRunIsFreeWave) {
    const auto g = make_grid(1, 14.0, 512);
    SolverConfig cfg;
    cfg.forcing = false;
    cfg.beta = 1.5;
    cfg.t_max = 4.0;
    cfg.output_interval = 1.0;
    std::mt19937_64 rng(8);
    const auto data = testutil::random_supported_data(g, 1.0, rng);
    const auto w = memory_reformulate(step_solve(data, cfg), cfg.beta);
    const auto& w0 = w.states.front();
    for (std::size_t k = 1; k < w.size(); ++k) {
        const auto free = propagate_free_wave(w0.u, w0.ut, w.times[k]);
        EXPECT_LE(testutil::max_abs_diff(free[0], w.states[k].u), 1e-9 * free[0].max_abs());
        // w_tt = Delta w.
        const auto lap = laplacian(w.states[k].u);
        EXPECT_LE(testutil::max_abs_diff(lap, w.states[k].utt), 1e-9 * lap.max_abs());
    }
}

TEST(Memory, ConvolutionValues) {
    const auto g = make_grid(1, 4.0, 32);
    const auto times = linspace(0.0, 2.0, 41);
    const auto zero = constant_trajectory(g, times, [](double, double) { return 0.0; });
    EXPECT_EQ(memory_convolve(zero, 1.0, 2.0).max_abs(), 0.0);
    const auto one = constant_trajectory(g, times, [](double, double) { return 1.0; });
    const auto c = memory_convolve(one, 1.0, 2.0);
    for (double v : c.values) EXPECT_NEAR(v, 1.0 - std::exp(-2.0), 1e-14);
    EXPECT_THROW(memory_convolve(one, 1.0, 2.5), std::invalid_argument);

    // Direct oracle: Gauss quadrature of the kernel against the piecewise-linear
    // interpolant, interval by interval, with no recursion.
    std::vector<double> nonuniform{0.0, 0.1, 0.35, 0.4, 0.9, 1.3, 1.31, 2.0};
    const auto f = [](double t, double x) { return std::sin(3 * t) * std::cos(x) + t * t; };
    const auto tr = constant_trajectory(g, nonuniform, f);
    const double tau = 0.6, t = 2.0;
    const auto rec = memory_convolve(tr, tau, t);
    const auto rule = gauss_quadrature(0.0, 1.0, 12);
    for (std::size_t i = 0; i < g.size(); i += 5) {
        const double x = g.coordinates()[i];
        double direct = 0.0;
        for (std::size_t j = 0; j + 1 < nonuniform.size(); ++j) {
            const double a = nonuniform[j], b = nonuniform[j + 1];
            direct += (b - a) * rule.integrate([&](double q) {
                const double s = a + q * (b - a);
                return std::exp(-(t - s) / tau) * ((1 - q) * f(a, x) + q * f(b, x));
            });
        }
        EXPECT_NEAR(rec.values[i], direct, 1e-10);
    }
}

TEST(Residual, ZeroAndLinearRuns) {
    const auto g = make_grid(1, 8.0, 256);
    SolverConfig cfg;
    cfg.forcing = false;
    cfg.t_max = 2.0;
    const auto zero = step_solve(EvolutionState::zero(g), cfg);
    EXPECT_EQ(residual_mgt(zero, cfg, zero.times[10]), 0.0);

    cfg.dt = 0.002;
    auto s0 = EvolutionState::zero(g);
    s0.u = testutil::bump_field(g, 1.0);
    s0.ut = testutil::bump_field(g, 1.0, -0.5);
    s0.utt = testutil::bump_field(g, 1.0, 0.25);
    const auto traj = step_solve(s0, cfg);
    EXPECT_LE(residual_mgt(traj, cfg, traj.times[traj.size() / 2]), 1e-6);
    EXPECT_THROW(residual_mgt(traj, cfg, traj.times[1]), std::invalid_argument);
}

TEST(TrajectoryIO, RoundTrip) {
    const auto g = make_grid(2, 3.0, 16);
    SolverConfig cfg;
    cfg.t_max = 0.3;
    cfg.dt = 0.05;
    cfg.dealias = false;
    auto traj = step_solve(bump_data(g, 0.2, 0.5), cfg);
    traj.blowup = Blowup{0.31, BlowupReason::step_collapse};
    const auto dir = std::filesystem::temp_directory_path() / "mgt_traj_io";
    std::filesystem::create_directories(dir);
    save_trajectory(traj, dir / "run");
    const auto back = load_trajectory(dir / "run");
    EXPECT_EQ(back.grid, traj.grid);
    EXPECT_EQ(back.times, traj.times);
    ASSERT_EQ(back.size(), traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        EXPECT_EQ(back.states[k].u.values, traj.states[k].u.values);
        EXPECT_EQ(back.states[k].utt.values, traj.states[k].utt.values);
    }
    ASSERT_TRUE(back.blowup.has_value());
    EXPECT_EQ(back.blowup->reason, BlowupReason::step_collapse);
    EXPECT_EQ(back.cfg.dealias, std::optional<bool>(false));
    EXPECT_EQ(back.cfg.dt, traj.cfg.dt);
    EXPECT_THROW(load_trajectory(dir / "missing"), std::runtime_error);
    std::filesystem::remove_all(dir);
}
