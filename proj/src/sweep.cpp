#include "mgt/sweep.hpp"
#include "mgt/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace mgt {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("make_data: " + what);
}

// Truncated Gaussian u0 = exp(-2 rho^2 - m rho^2/(1-rho^2)) with rho = r/R, and its
// exact Laplacian. Writing f = exp(phi(rho)):
//   Delta f = f/R^2 (phi'' + phi'^2 + (dim-1) phi'/rho),
// where phi'/rho stays bounded at the origin.
struct TruncatedGaussian {
    double R, m;
    int dim;

    double value(double r) const {
        const double rho = r / R;
        if (rho >= 1.0) return 0.0;
        const double q = 1.0 - rho * rho;
        return std::exp(-2.0 * rho * rho - m * rho * rho / q);
    }

    double laplacian(double r) const {
        const double rho = r / R;
        if (rho >= 1.0) return 0.0;
        const double q = 1.0 - rho * rho;
        const double d1_over_rho = -4.0 - 2.0 * m / (q * q);
        const double d1 = rho * d1_over_rho;
        const double d2 = -4.0 - m * (2.0 / (q * q) + 8.0 * rho * rho / (q * q * q));
        return value(r) / (R * R) * (d2 + d1 * d1 + (dim - 1) * d1_over_rho);
    }
};

RealField radial_field(const SpatialGrid& g, const std::function<double(double)>& f) {
    RealField out(g);
    const auto r = g.radius();
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = f(r[i]);
    return out;
}

RealField read_component(const nlohmann::json& doc, const char* key, const SpatialGrid& g,
                         const std::filesystem::path& path) {
    RealField out(g);
    if (!doc.contains(key)) return out;
    const auto& arr = doc.at(key);
    if (!arr.is_array() || arr.size() != g.size())
        throw std::invalid_argument(path.string() + ": '" + key + "' must be an array of " +
                                    std::to_string(g.size()) + " numbers");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!arr[i].is_number())
            throw std::invalid_argument(path.string() + ": " + key + "[" + std::to_string(i) +
                                        "] is not a number");
        out.values[i] = arr[i].get<double>();
    }
    return out;
}

EvolutionState read_custom(const std::filesystem::path& path, const SpatialGrid& g) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(path.string() + ": cannot open data file");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument(path.string() + ": expected an object");
    EvolutionState s = EvolutionState::zero(g);
    s.u = read_component(doc, "u0", g, path);
    s.ut = read_component(doc, "u1", g, path);
    s.utt = read_component(doc, "u2", g, path);
    return s;
}

void check_component(const RealField& f, const char* name, double R) {
    const double scale = f.max_abs();
    require(f.all_finite(), std::string(name) + " has non-finite samples");
    const double lowest = *std::min_element(f.values.begin(), f.values.end());
    require(lowest >= -1e-14 * scale, std::string(name) + " is negative somewhere");
    require(mass_outside_ball(f, R) <= 1e-12, std::string(name) + " is not supported in B_R");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

double smooth_bump(double radius, double R, double sharpness) {
    const double rho = radius / R;
    if (rho >= 1.0) return 0.0;
    return std::exp(-sharpness * rho * rho / (1.0 - rho * rho));
}

EvolutionState make_profile(DataProfile profile, double R, const SpatialGrid& grid,
                            const DataOptions& opts) {
    require(R > 0.0, "R must be positive");
    require(R < grid.half_width(), "B_R does not fit in the box");
    const double m = opts.bump_sharpness;
    EvolutionState s = EvolutionState::zero(grid);
    const RealField bump = radial_field(grid, [&](double r) { return smooth_bump(r, R, m); });

    switch (profile) {
    case DataProfile::bump:
        s.u = bump;
        s.ut = opts.u1_scale * bump;
        s.utt = opts.u2_scale * bump;
        break;
    case DataProfile::gaussian_truncated: {
        // u2 = Delta u0 + kappa B with a flatter bump B, so the ratio -Delta u0 / B
        // stays bounded at the edge and the smallest admissible kappa exists.
        const TruncatedGaussian tg{R, m, grid.dim()};
        const double m_wide = 0.5 * m;
        s.u = radial_field(grid, [&](double r) { return tg.value(r); });
        s.ut = opts.u1_scale * bump;
        double kappa = 0.0;
        for (double r : grid.radius()) {
            const double b = smooth_bump(r, R, m_wide);
            if (b > 0.0) kappa = std::max(kappa, -tg.laplacian(r) / b);
        }
        kappa = 1.05 * kappa + opts.u2_scale;
        s.utt = radial_field(grid, [&](double r) {
            return std::max(0.0, tg.laplacian(r) + kappa * smooth_bump(r, R, m_wide));
        });
        break;
    }
    case DataProfile::custom_file:
        s = read_custom(opts.custom_file, grid);
        break;
    }

    require(s.u.max_abs() > 0.0, "u0 is identically zero");
    check_component(s.u, "u0", R);
    check_component(s.ut, "u1", R);
    check_component(s.utt, "u2", R);
    if (opts.critical) {
        const RealField lap = laplacian(s.u);
        const double scale = std::max(lap.max_abs(), s.utt.max_abs());
        double lowest = 0.0;
        for (std::size_t i = 0; i < lap.size(); ++i)
            lowest = std::min(lowest, s.utt.values[i] - lap.values[i]);
        require(lowest >= -1e-6 * scale, "u2 - Delta u0 is negative somewhere");
    }
    return s;
}

EvolutionState make_data(DataProfile profile, double R, const SpatialGrid& grid, double eps,
                         const DataOptions& opts) {
    require(eps > 0.0, "eps must be positive");
    EvolutionState s = make_profile(profile, R, grid, opts);
    s.u *= eps;
    s.ut *= eps;
    s.utt *= eps;
    return s;
}

DataOptions data_options(const SweepConfig& cfg) {
    return DataOptions{cfg.u1_scale, cfg.u2_scale, cfg.bump_sharpness, cfg.custom_file,
                       cfg.mode == RunMode::critical};
}

LifespanRecord run_single(const SweepConfig& cfg, double eps, FunctionalTrace* trace,
                          Trajectory* traj_out) {
    const auto t0 = std::chrono::steady_clock::now();
    LifespanRecord rec;
    rec.eps = eps;
    try {
        const SpatialGrid grid = cfg.make_grid();
        validate(cfg.solver, cfg.n);
        rec.dt_used = cfg.solver.effective_dt(grid);
        const EvolutionState data = make_data(cfg.profile, cfg.R, grid, eps, data_options(cfg));

        Trajectory traj = step_solve(data, cfg.solver);
        const auto T = detect_blowup(traj, cfg.solver.blowup_amplitude);
        if (T) {
            rec.T_num = *T;
            rec.reason = traj.blowup ? to_string(traj.blowup->reason) : "amplitude";
        }
        if (trace) *trace = compute_trace(traj, cfg.solver.beta);

        if (T && cfg.robustness_gate) {
            SolverConfig half = cfg.solver;
            half.dt = 0.5 * rec.dt_used;
            const auto T_half = detect_blowup(step_solve(data, half), half.blowup_amplitude);

            SolverConfig high = cfg.solver;
            high.blowup_amplitude *= 10.0;
            const auto T_high = detect_blowup(step_solve(data, high), high.blowup_amplitude);
            const auto T_low = detect_blowup(traj, 0.1 * cfg.solver.blowup_amplitude);

            const double inf = std::numeric_limits<double>::infinity();
            rec.dt_rel_change = T_half ? std::abs(*T_half - *T) / *T : inf;
            rec.threshold_rel_change =
                (T_high && T_low) ? std::max(std::abs(*T_high - *T), std::abs(*T_low - *T)) / *T : inf;
            rec.gate_passed = rec.dt_rel_change <= 0.05 && rec.threshold_rel_change <= 0.02;
        }
        if (traj_out) *traj_out = std::move(traj);
    } catch (const std::exception& e) {
        rec.T_num.reset();
        rec.gate_passed.reset();
        rec.reason = std::string("error: ") + e.what();
    }
    rec.wallclock = seconds_since(t0);
    return rec;
}

SweepOutput run_sweep(const SweepConfig& cfg) {
    const std::size_t count = cfg.eps_list.size();
    SweepOutput out;
    out.records.resize(count);
    out.traces.resize(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++)
            out.records[i] = run_single(cfg, cfg.eps_list[i], &out.traces[i]);
    };
    const std::size_t workers = std::min<std::size_t>(std::max(cfg.threads, 1), count);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

} // namespace mgt
