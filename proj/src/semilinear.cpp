#include "mgt/semilinear.hpp"

#include "mgt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgt {

namespace {

using Coeffs = std::vector<Complex>;

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

// Spectral |u|^p / beta for the third component of the first-order system.
class Forcing {
public:
    Forcing(const SolverConfig& cfg, const SpatialGrid& grid)
        : grid_(grid), p_(cfg.p), beta_(cfg.beta), enabled_(cfg.forcing),
          dealias_(cfg.effective_dealias()) {}

    bool enabled() const { return enabled_; }

    SpectralField source_from_physical(const RealField& u) const {
        SpectralField F = forward_transform(power_nonlinearity(u, p_));
        if (dealias_) dealias_two_thirds(F);
        return F;
    }

    // Writes F-hat / beta of the field with spectrum U into out and returns max|u|.
    double evaluate(const SpectralField& U, Coeffs& out) const {
        RealField u = inverse_transform(U);
        const double amp = u.max_abs();
        if (!enabled_) {
            std::fill(out.begin(), out.end(), Complex{});
            return amp;
        }
        SpectralField F = source_from_physical(u);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = F.coefficients[i] / beta_;
        return amp;
    }

private:
    SpatialGrid grid_;
    double p_;
    double beta_;
    bool enabled_;
    bool dealias_;
};

// One Lawson RK4 step of size h on the spectral triple.
class Stepper {
public:
    Stepper(const SpatialGrid& grid, const SolverConfig& cfg, double h)
        : grid_(grid), h_(h), full_(grid, cfg.beta, h), half_(grid, cfg.beta, 0.5 * h),
          forcing_(cfg, grid) {}

    double h() const { return h_; }

    void step(SpectralState& y) const {
        const std::size_t n = grid_.size();
        if (!forcing_.enabled()) {
            full_.apply(y);
            return;
        }
        Coeffs k1(n), k2(n), k3(n), k4(n);
        forcing_.evaluate(y.u, k1);

        // Stage 2: Phi(h/2) (y + h/2 k1).
        SpectralState a = y;
        add_third(a, 0.5 * h_, k1);
        half_.apply(a.u, a.ut, a.utt);
        forcing_.evaluate(a.u, k2);

        // Stage 3: Phi(h/2) y + h/2 k2.
        SpectralState half_y = y;
        half_.apply(half_y.u, half_y.ut, half_y.utt);
        SpectralState b = half_y;
        add_third(b, 0.5 * h_, k2);
        forcing_.evaluate(b.u, k3);

        // Stage 4: Phi(h) y + h Phi(h/2) k3.
        SpectralState full_y = y;
        full_.apply(full_y.u, full_y.ut, full_y.utt);
        SpectralState k3_half = zero_with_third(k3);
        half_.apply(k3_half.u, k3_half.ut, k3_half.utt);
        SpectralState c = full_y;
        axpy(c, h_, k3_half);
        forcing_.evaluate(c.u, k4);

        // Combine: Phi(h) y + h/6 (Phi(h) k1 + 2 Phi(h/2)(k2 + k3) + k4).
        SpectralState k1_full = zero_with_third(k1);
        full_.apply(k1_full.u, k1_full.ut, k1_full.utt);
        Coeffs k23(n);
        for (std::size_t i = 0; i < n; ++i) k23[i] = k2[i] + k3[i];
        SpectralState k23_half = zero_with_third(k23);
        half_.apply(k23_half.u, k23_half.ut, k23_half.utt);

        const double w = h_ / 6.0;
        axpy(full_y, w, k1_full);
        axpy(full_y, 2.0 * w, k23_half);
        add_third(full_y, w, k4);
        full_y.t = y.t + h_;
        y = std::move(full_y);
    }

private:
    static void add_third(SpectralState& s, double w, const Coeffs& k) {
        for (std::size_t i = 0; i < k.size(); ++i) s.utt.coefficients[i] += w * k[i];
    }

    static void axpy(SpectralState& s, double w, const SpectralState& x) {
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            s.u.coefficients[i] += w * x.u.coefficients[i];
            s.ut.coefficients[i] += w * x.ut.coefficients[i];
            s.utt.coefficients[i] += w * x.utt.coefficients[i];
        }
    }

    SpectralState zero_with_third(const Coeffs& k) const {
        SpectralState s{0.0, SpectralField(grid_), SpectralField(grid_), SpectralField(grid_)};
        s.utt.coefficients = k;
        return s;
    }

    SpatialGrid grid_;
    double h_;
    LinearFlow full_;
    LinearFlow half_;
    Forcing forcing_;
};

bool state_finite(const RealField& u) { return u.all_finite(); }

// Uniform grid of points 0, h, ..., T with h <= dt.
std::vector<double> uniform_times(double T, double dt, double* h_out) {
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / dt - 1e-9)));
    const double h = T / static_cast<double>(steps);
    std::vector<double> times(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) times[k] = h * static_cast<double>(k);
    times.back() = T;
    if (h_out) *h_out = h;
    return times;
}

bool is_uniform(const std::vector<double>& t) {
    if (t.size() < 3) return true;
    const double h = t[1] - t[0];
    for (std::size_t k = 1; k + 1 < t.size(); ++k)
        if (std::abs((t[k + 1] - t[k]) - h) > 1e-9 * h) return false;
    return true;
}

double state_xt_norm(const EvolutionState& s) {
    return l2_norm(s.u) + gradient_norm(s.u) + homogeneous_sobolev_norm(s.u, 2) + l2_norm(s.ut) +
           gradient_norm(s.ut) + l2_norm(s.utt);
}

EvolutionState state_difference(const EvolutionState& a, const EvolutionState& b) {
    return EvolutionState{a.t, a.u - b.u, a.ut - b.ut, a.utt - b.utt};
}

RealField u_ttt_from_equation(const EvolutionState& s, const SolverConfig& cfg) {
    RealField rhs = laplacian(s.u);
    rhs += cfg.beta * laplacian(s.ut);
    rhs -= s.utt;
    if (cfg.forcing) {
        RealField f = power_nonlinearity(s.u, cfg.p);
        if (cfg.effective_dealias()) {
            SpectralField F = forward_transform(f);
            dealias_two_thirds(F);
            f = inverse_transform(F);
        }
        rhs += f;
    }
    rhs *= 1.0 / cfg.beta;
    return rhs;
}

} // namespace

double SolverConfig::effective_dt(const SpatialGrid& g) const {
    return dt > 0.0 ? dt : 0.25 * g.spacing();
}

bool SolverConfig::effective_dealias() const {
    return dealias.value_or(p == 2.0 || p == 3.0);
}

void validate(const SolverConfig& cfg, int dim, bool picard) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("SolverConfig: " + m); };
    if (!(cfg.beta > 0.0)) fail("beta must be positive");
    if (!(cfg.p > 1.0)) fail("p must exceed 1");
    if (!(cfg.dt >= 0.0)) fail("dt must be nonnegative");
    if (!(cfg.t_max > 0.0)) fail("t_max must be positive");
    if (!(cfg.blowup_amplitude > 0.0)) fail("blowup_amplitude must be positive");
    if (!(cfg.picard_tol > 0.0)) fail("picard_tol must be positive");
    if (cfg.picard_max_iter < 1) fail("picard_max_iter must be at least 1");
    if (!(cfg.output_interval >= 0.0)) fail("output_interval must be nonnegative");
    if (picard && dim >= 3 && cfg.p > static_cast<double>(dim) / (dim - 2))
        fail("p exceeds n/(n-2), outside the Gagliardo-Nirenberg range");
}

std::string to_string(BlowupReason r) {
    return r == BlowupReason::amplitude ? "amplitude" : "step_collapse";
}

BlowupReason blowup_reason_from_string(const std::string& s) {
    if (s == "amplitude") return BlowupReason::amplitude;
    if (s == "step_collapse") return BlowupReason::step_collapse;
    throw std::invalid_argument("unknown blow-up reason '" + s + "'");
}

std::size_t Trajectory::index_of(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12 * std::max(1.0, std::abs(t)));
    if (it != times.end() && std::abs(*it - t) <= 1e-12 * std::max(1.0, std::abs(t)))
        return static_cast<std::size_t>(it - times.begin());
    throw std::invalid_argument("time " + std::to_string(t) + " is not stored in the trajectory");
}

void Trajectory::push_back(EvolutionState s) {
    if (!times.empty() && !(s.t > times.back()))
        throw std::invalid_argument("Trajectory: times must be strictly increasing");
    if (size() == 0 && grid.size() == 0) grid = s.grid();
    require_same_grid(grid, s.grid(), "Trajectory::push_back");
    times.push_back(s.t);
    states.push_back(std::move(s));
}

RealField power_nonlinearity(const RealField& u, double p) {
    RealField out(u.grid);
    if (p == 2.0) {
        for (std::size_t i = 0; i < u.size(); ++i) out.values[i] = u.values[i] * u.values[i];
    } else if (p == 3.0) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double a = std::abs(u.values[i]);
            out.values[i] = a * a * a;
        }
    } else {
        for (std::size_t i = 0; i < u.size(); ++i) out.values[i] = std::pow(std::abs(u.values[i]), p);
    }
    return out;
}

Trajectory duhamel_apply(const Trajectory& candidate, const EvolutionState& data,
                         const SolverConfig& cfg) {
    require_same_grid(candidate.grid, data.grid(), "duhamel_apply");
    validate(cfg, data.grid().dim(), true);
    const auto& g = data.grid();
    const std::size_t M = candidate.size(), n = g.size();
    const auto& t = candidate.times;
    auto kn = g.wavenumber_norm();

    // Forcing spectra at the candidate's stored times.
    std::vector<SpectralField> F;
    F.reserve(M);
    for (const auto& s : candidate.states) {
        if (!cfg.forcing) break;
        SpectralField Fj = forward_transform(power_nonlinearity(s.u, cfg.p));
        if (cfg.effective_dealias()) dealias_two_thirds(Fj);
        for (auto& c : Fj.coefficients) c /= cfg.beta;
        F.push_back(std::move(Fj));
    }

    // K2 and its first two derivatives at every lag on a uniform grid.
    const bool uniform = is_uniform(t);
    std::vector<std::vector<std::array<double, 3>>> lag;
    if (cfg.forcing && uniform && M > 1) {
        const double h = t[1] - t[0];
        lag.assign(M, std::vector<std::array<double, 3>>(n));
        for (std::size_t d = 0; d < M; ++d)
            for (std::size_t i = 0; i < n; ++i) {
                const auto m = multipliers(h * static_cast<double>(d), kn[i], cfg.beta);
                lag[d][i] = {m.k2, m.dk2, m.ddk2};
            }
    }

    Trajectory out;
    out.grid = g;
    out.cfg = cfg;
    const SpectralState data_hat = to_spectral(data);
    for (std::size_t k = 0; k < M; ++k) {
        SpectralState y = data_hat;
        if (t[k] > 0.0) LinearFlow(g, cfg.beta, t[k]).apply(y.u, y.ut, y.utt);
        y.t = t[k];
        if (cfg.forcing && k > 0) {
            for (std::size_t j = 0; j <= k; ++j) {
                const double left = j > 0 ? t[j] - t[j - 1] : 0.0;
                const double right = j < k ? t[j + 1] - t[j] : 0.0;
                const double w = 0.5 * (left + right);
                for (std::size_t i = 0; i < n; ++i) {
                    std::array<double, 3> K;
                    if (uniform) {
                        K = lag[k - j][i];
                    } else {
                        const auto m = multipliers(t[k] - t[j], kn[i], cfg.beta);
                        K = {m.k2, m.dk2, m.ddk2};
                    }
                    const Complex f = w * F[j].coefficients[i];
                    y.u.coefficients[i] += K[0] * f;
                    y.ut.coefficients[i] += K[1] * f;
                    y.utt.coefficients[i] += K[2] * f;
                }
            }
        }
        out.push_back(to_physical(y));
    }
    return out;
}

double xt_norm(const Trajectory& traj) {
    double m = 0.0;
    for (const auto& s : traj.states) m = std::max(m, state_xt_norm(s));
    return m;
}

double xt_distance(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw std::invalid_argument("xt_distance: different time grids");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = state_xt_norm(state_difference(a.states[k], b.states[k]));
        if (!std::isfinite(d)) return std::numeric_limits<double>::infinity();
        m = std::max(m, d);
    }
    return m;
}

Trajectory picard_solve(const EvolutionState& data, const SolverConfig& cfg, double T,
                        PicardStats* stats) {
    validate(cfg, data.grid().dim(), true);
    if (!(T > 0.0)) throw std::invalid_argument("picard_solve: T must be positive");
    double h = 0.0;
    const auto times = uniform_times(T, cfg.effective_dt(data.grid()), &h);

    Trajectory u;
    u.grid = data.grid();
    SpectralState y = to_spectral(data);
    const LinearFlow flow(data.grid(), cfg.beta, h);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0) flow.apply(y.u, y.ut, y.utt);
        EvolutionState s = k == 0 ? data : to_physical(y);
        s.t = times[k];
        u.push_back(std::move(s));
    }
    u.cfg = cfg;
    u.cfg.dt = h;

    PicardStats local;
    double previous = std::numeric_limits<double>::infinity();
    int growing = 0;
    for (int iter = 1; iter <= cfg.picard_max_iter; ++iter) {
        Trajectory next = duhamel_apply(u, data, u.cfg);
        const double inc = xt_distance(next, u);
        local.iterations = iter;
        local.increments.push_back(inc);
        u = std::move(next);
        if (!std::isfinite(inc))
            throw PicardDivergence("picard_solve: non-finite increment at iteration " +
                                   std::to_string(iter) + "; reduce T");
        if (inc <= cfg.picard_tol) {
            if (stats) *stats = local;
            return u;
        }
        growing = inc > previous ? growing + 1 : 0;
        if (growing >= 5)
            throw PicardDivergence("picard_solve: increments grew for 5 consecutive iterations (" +
                                   std::to_string(inc) + "); reduce T");
        previous = inc;
    }
    if (stats) *stats = local;
    throw NumericalFailure("picard_solve: no convergence within " +
                           std::to_string(cfg.picard_max_iter) + " iterations");
}

double lipschitz_quotient(const EvolutionState& data, const SolverConfig& cfg, double T,
                          double delta) {
    validate(cfg, data.grid().dim(), true);
    double h = 0.0;
    const auto times = uniform_times(T, cfg.effective_dt(data.grid()), &h);
    SolverConfig c = cfg;
    c.dt = h;

    const double norm = l2_norm(data.u);
    if (norm == 0.0) throw std::invalid_argument("lipschitz_quotient: data.u is zero");
    RealField w = data.u;
    w *= delta / norm;

    Trajectory u, v;
    for (double t : times) {
        EvolutionState s = propagate_linear(data, t, cfg.beta);
        s.t = t;
        EvolutionState sv = s;
        sv.u += w;
        u.push_back(std::move(s));
        v.push_back(std::move(sv));
    }
    u.cfg = v.cfg = c;
    const Trajectory Nu = duhamel_apply(u, data, c), Nv = duhamel_apply(v, data, c);
    return xt_distance(Nu, Nv) / xt_distance(u, v);
}

Trajectory step_solve(const EvolutionState& data, const SolverConfig& cfg) {
    const auto& g = data.grid();
    validate(cfg, g.dim());
    double h = 0.0;
    const auto grid_times = uniform_times(cfg.t_max, cfg.effective_dt(g), &h);
    const std::size_t steps = grid_times.size() - 1;
    const std::size_t stride =
        cfg.output_interval > 0.0
            ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.output_interval / h)))
            : 1;

    Trajectory traj;
    traj.grid = g;
    traj.cfg = cfg;
    traj.cfg.dt = h;
    EvolutionState first = data;
    first.t = 0.0;
    traj.push_back(first);

    const Stepper stepper(g, cfg, h);
    SpectralState y = to_spectral(data);
    y.t = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        SpectralState prev = y;
        stepper.step(y);
        y.t = grid_times[k];
        RealField u = inverse_transform(y.u);
        const bool finite = state_finite(u);
        const double amp = finite ? u.max_abs() : std::numeric_limits<double>::infinity();
        if (!finite || amp > cfg.blowup_amplitude) {
            // One bisection level: re-step the interval with two half steps.
            const Stepper half(g, cfg, 0.5 * h);
            SpectralState mid = prev;
            half.step(mid);
            RealField um = inverse_transform(mid.u);
            const bool mid_finite = state_finite(um);
            const bool crossed_mid = !mid_finite || um.max_abs() > cfg.blowup_amplitude;
            Blowup b;
            b.time = crossed_mid ? prev.t + 0.5 * h : y.t;
            const bool clean = crossed_mid ? mid_finite : finite;
            b.reason = clean ? BlowupReason::amplitude : BlowupReason::step_collapse;
            if (traj.times.back() < prev.t) traj.push_back(to_physical(prev));
            traj.blowup = b;
            return traj;
        }
        if (k % stride == 0 || k == steps) {
            EvolutionState s{y.t, std::move(u), inverse_transform(y.ut), inverse_transform(y.utt)};
            traj.push_back(std::move(s));
        }
    }
    return traj;
}

std::optional<double> detect_blowup(const Trajectory& traj, double amplitude) {
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& u = traj.states[k].u;
        const bool finite = u.all_finite();
        if (finite && u.max_abs() <= amplitude) continue;
        if (k == 0) return traj.times[0];
        // Bisection: advance the previous state by half the interval.
        SolverConfig c = traj.cfg;
        const double gap = traj.times[k] - traj.times[k - 1];
        const Stepper half(traj.grid, c, 0.5 * gap);
        SpectralState y = to_spectral(traj.states[k - 1]);
        half.step(y);
        RealField um = inverse_transform(y.u);
        const bool crossed = !um.all_finite() || um.max_abs() > amplitude;
        return crossed ? traj.times[k - 1] + 0.5 * gap : traj.times[k];
    }
    if (traj.blowup) return traj.blowup->time;
    return std::nullopt;
}

Trajectory memory_reformulate(const Trajectory& u_traj, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("memory_reformulate: tau must be positive");
    Trajectory w;
    w.grid = u_traj.grid;
    w.cfg = u_traj.cfg;
    w.blowup = u_traj.blowup;
    for (const auto& s : u_traj.states) {
        RealField uttt = u_ttt_from_equation(s, u_traj.cfg);
        EvolutionState ws{s.t, s.u + tau * s.ut, s.ut + tau * s.utt, s.utt + tau * uttt};
        w.push_back(std::move(ws));
    }
    return w;
}

RealField memory_convolve(const Trajectory& w_traj, double tau, double t) {
    if (!(tau > 0.0)) throw std::invalid_argument("memory_convolve: tau must be positive");
    if (w_traj.size() == 0) throw std::invalid_argument("memory_convolve: empty trajectory");
    if (t < w_traj.times.front() || t > w_traj.times.back() * (1 + 1e-12))
        throw std::invalid_argument("memory_convolve: t outside the trajectory range");
    const std::size_t k = w_traj.index_of(t);
    RealField acc(w_traj.grid);
    for (std::size_t j = 0; j < k; ++j) {
        const double d = w_traj.times[j + 1] - w_traj.times[j];
        const double one_minus_E = -std::expm1(-d / tau);
        const double E = 1.0 - one_minus_E;
        // Exact integral of e^{-(d-s)/tau} times the linear interpolant of w.
        const double b = tau - tau * tau * one_minus_E / d;
        const double a = tau * one_minus_E - b;
        const auto& w0 = w_traj.states[j].u.values;
        const auto& w1 = w_traj.states[j + 1].u.values;
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc.values[i] = E * acc.values[i] + a * w0[i] + b * w1[i];
    }
    return acc;
}

double residual_mgt(const Trajectory& traj, const SolverConfig& cfg, double t) {
    const std::size_t k = traj.index_of(t);
    if (k < 3) throw std::invalid_argument("residual_mgt: needs three earlier stored states");
    const double d = traj.times[k] - traj.times[k - 1];
    for (std::size_t j = k - 2; j < k; ++j)
        if (std::abs((traj.times[j] - traj.times[j - 1]) - d) > 1e-9 * d)
            throw std::invalid_argument("residual_mgt: stored times are not uniform near t");

    const auto& s = traj.states[k];
    RealField uttt(traj.grid);
    const auto& f0 = traj.states[k].utt.values;
    const auto& f1 = traj.states[k - 1].utt.values;
    const auto& f2 = traj.states[k - 2].utt.values;
    const auto& f3 = traj.states[k - 3].utt.values;
    for (std::size_t i = 0; i < uttt.size(); ++i)
        uttt.values[i] = (11.0 * f0[i] - 18.0 * f1[i] + 9.0 * f2[i] - 2.0 * f3[i]) / (6.0 * d);

    RealField t1 = cfg.beta * uttt;
    RealField lap_u = laplacian(s.u);
    RealField lap_ut = cfg.beta * laplacian(s.ut);
    RealField f(traj.grid);
    if (cfg.forcing) {
        f = power_nonlinearity(s.u, cfg.p);
        if (cfg.effective_dealias()) {
            SpectralField F = forward_transform(f);
            dealias_two_thirds(F);
            f = inverse_transform(F);
        }
    }
    RealField res = t1 + s.utt;
    res -= lap_u;
    res -= lap_ut;
    res -= f;
    const double scale =
        l2_norm(t1) + l2_norm(s.utt) + l2_norm(lap_u) + l2_norm(lap_ut) + l2_norm(f);
    return scale > 0.0 ? l2_norm(res) / scale : 0.0;
}

} // namespace mgt
