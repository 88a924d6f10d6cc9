#include "mgt/functionals.hpp"

#include "format.hpp"
#include "mgt/errors.hpp"
#include "mgt/phi.hpp"
#include "mgt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mgt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_cosh(double z) {
    z = std::abs(z);
    return z + std::log1p(std::exp(-2.0 * z)) - std::numbers::ln2;
}

double log_sinhc(double z) {
    z = std::abs(z);
    if (z < 1e-4) return std::log1p(z * z / 6.0);
    return z + std::log1p(-std::exp(-2.0 * z)) - std::log(2.0 * z);
}

// lambda nodes on (0, lambda0) and log weights including lambda^r and the Jacobian
// of lambda = lambda0 mu^q.
struct LambdaRule {
    std::vector<double> lambda;
    std::vector<double> log_w;
};

int substitution_power(double r) {
    if (r >= 0.0 && r == std::floor(r)) return 1;
    return static_cast<int>(std::ceil(8.0 / (1.0 + r)));
}

// Panels on mu in (0, 1), enough that e^{lambda (radius + R)} varies by a bounded factor
// across each panel after the substitution.
int panel_count(const AuxKernelParams& p, double radius) {
    const double scale = substitution_power(p.r) * p.lambda0 * (radius + p.R + 1.0);
    return std::max(1, static_cast<int>(std::ceil(scale / 24.0)));
}

LambdaRule lambda_rule(const AuxKernelParams& p, int nodes, double radius) {
    if (!(p.r > -1.0)) throw std::invalid_argument("kernel parameter r must exceed -1");
    if (!(p.lambda0 > 0.0)) throw std::invalid_argument("kernel parameter lambda0 must be positive");
    if (!(p.R > 0.0)) throw std::invalid_argument("kernel parameter R must be positive");
    const int q = substitution_power(p.r);
    const int panels = panel_count(p, radius);
    LambdaRule rule;
    for (int k = 0; k < panels; ++k) {
        const auto g = gauss_quadrature(static_cast<double>(k) / panels,
                                        static_cast<double>(k + 1) / panels, nodes);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double mu = g.nodes[i];
            rule.lambda.push_back(p.lambda0 * std::pow(mu, q));
            // lambda^r d lambda = lambda0^{1+r} q mu^{q(1+r)-1} d mu
            rule.log_w.push_back(std::log(g.weights[i]) + (1.0 + p.r) * std::log(p.lambda0) +
                                 std::log(static_cast<double>(q)) +
                                 (q * (1.0 + p.r) - 1.0) * std::log(mu));
        }
    }
    return rule;
}

// Sum of exp(log terms) formed in log space.
template <class LogTerm>
double log_space_sum(std::size_t n, LogTerm&& term) {
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = term(i);
        mx = std::max(mx, v[i]);
    }
    if (!std::isfinite(mx)) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return std::exp(mx + std::log(s));
}

template <class TimeFactor>
double radial_kernel(const LambdaRule& rule, double t, double radius, double R, int dim,
                     TimeFactor&& log_time_factor) {
    return log_space_sum(rule.lambda.size(), [&](std::size_t q) {
        const double l = rule.lambda[q];
        return rule.log_w[q] - l * (t + R) + log_time_factor(l) + log_phi_radial(l * radius, dim);
    });
}

template <class Eval>
double checked(const AuxKernelParams& params, double radius, Eval&& eval, const char* what) {
    const double a = eval(lambda_rule(params, params.quad_nodes, radius));
    const double b = eval(lambda_rule(params, 2 * params.quad_nodes, radius));
    if (std::abs(a - b) > 1e-8 * std::abs(b))
        throw QuadratureError(std::string(what) + ": node doubling changed the value from " +
                              detail::shortest(a) + " to " + detail::shortest(b));
    return a;
}

double norm_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

RealField forcing_field(const EvolutionState& s, const SolverConfig& cfg) {
    RealField f = power_nonlinearity(s.u, cfg.p);
    if (cfg.effective_dealias()) {
        SpectralField F = forward_transform(f);
        dealias_two_thirds(F);
        f = inverse_transform(F);
    }
    return f;
}

} // namespace

double space_average(const Trajectory& traj, double t) { return integrate(traj.at(t).u); }

double weighted_average_psi(const Trajectory& traj, double t) {
    const auto& u = traj.at(t).u;
    const double support = support_radius(u);
    if (support + 1.0 >= traj.grid.half_width())
        throw std::invalid_argument("weighted_average_psi: support radius " +
                                    detail::shortest(support) + " is within 1 of the box edge");
    auto r = traj.grid.radius();
    const int dim = traj.grid.dim();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u.values[i] != 0.0) s += u.values[i] * std::exp(log_phi_radial(r[i], dim) - t);
    return s * traj.grid.cell_volume();
}

double adjoint_residual_psi(double t, std::span<const double> x, double beta) {
    const int dim = static_cast<int>(x.size());
    const double e = std::exp(-t);
    const double psi = e * eval_phi(x, dim);
    const double lap_psi = e * laplacian_phi_radial(norm_of(x), dim);
    // d/dt acts as multiplication by -1 on e^{-t}.
    const double psi_tt = psi, psi_ttt = -psi;
    const double lap_psi_t = -lap_psi;
    return -beta * psi_ttt + psi_tt - lap_psi + beta * lap_psi_t;
}

double sinhc(double z) {
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sinh(z) / z;
}

double xi_r_radial(double t, double radius, const AuxKernelParams& params, int dim) {
    if (!(t >= 0.0)) throw std::invalid_argument("xi_r: t must be nonnegative");
    return checked(
        params, radius,
        [&](const LambdaRule& rule) {
            return radial_kernel(rule, t, radius, params.R, dim,
                                 [&](double l) { return log_cosh(l * t); });
        },
        "xi_r");
}

double eta_r_radial(double t, double s, double radius, const AuxKernelParams& params, int dim) {
    if (!(s >= 0.0) || !(t >= s)) throw std::invalid_argument("eta_r: requires t >= s >= 0");
    return checked(
        params, radius,
        [&](const LambdaRule& rule) {
            return radial_kernel(rule, t, radius, params.R, dim,
                                 [&](double l) { return log_sinhc(l * (t - s)); });
        },
        "eta_r");
}

double xi_r(double t, std::span<const double> x, const AuxKernelParams& params, int dim) {
    if (x.size() != static_cast<std::size_t>(dim)) throw std::invalid_argument("xi_r: point size");
    return xi_r_radial(t, norm_of(x), params, dim);
}

double eta_r(double t, double s, std::span<const double> x, const AuxKernelParams& params,
             int dim) {
    if (x.size() != static_cast<std::size_t>(dim)) throw std::invalid_argument("eta_r: point size");
    return eta_r_radial(t, s, norm_of(x), params, dim);
}

KernelTable::KernelTable(const SpatialGrid& grid, const AuxKernelParams& params)
    : grid_(grid), params_(params) {
    auto r = grid.radius();
    const double r_max = *std::max_element(r.begin(), r.end());
    const auto rule = lambda_rule(params, params.quad_nodes, r_max);
    lambdas_ = rule.lambda;
    log_weights_ = rule.log_w;
    log_phi_.resize(lambdas_.size() * grid.size());
    for (std::size_t q = 0; q < lambdas_.size(); ++q)
        for (std::size_t i = 0; i < grid.size(); ++i)
            log_phi_[q * grid.size() + i] = log_phi_radial(lambdas_[q] * r[i], grid.dim());

    // Node doubling on the extreme radius at t = 0, where the integrand is least damped.
    (void)eta_r_radial(0.0, 0.0, r_max, params, grid.dim());
}

template <class G>
RealField KernelTable::assemble(double t, G&& log_time_factor) const {
    RealField out(grid_);
    const std::size_t n = grid_.size();
    for (std::size_t q = 0; q < lambdas_.size(); ++q) {
        const double l = lambdas_[q];
        const double log_c = log_weights_[q] - l * (t + params_.R) + log_time_factor(l);
        const double* lp = &log_phi_[q * n];
        for (std::size_t i = 0; i < n; ++i) out.values[i] += std::exp(log_c + lp[i]);
    }
    return out;
}

RealField KernelTable::eta(double t, double s) const {
    if (!(s >= 0.0) || !(t >= s)) throw std::invalid_argument("KernelTable::eta: requires t >= s >= 0");
    return assemble(t, [&](double l) { return log_sinhc(l * (t - s)); });
}

RealField KernelTable::xi(double t) const {
    return assemble(t, [&](double l) { return log_cosh(l * t); });
}

double weighted_average_eta(const Trajectory& traj, double t, const AuxKernelParams& params) {
    const KernelTable table(traj.grid, params);
    return integrate_product(traj.at(t).u, table.eta(t, t));
}

double ode_residual_U(const FunctionalTrace& trace, double beta, std::size_t k, double floor) {
    if (k < 3 || k + 3 >= trace.size())
        throw std::invalid_argument("ode_residual_U: needs three stored neighbours on each side");
    const auto& t = trace.times;
    const double d = t[k + 1] - t[k];
    for (std::size_t j = k - 3; j < k + 3; ++j)
        if (std::abs((t[j + 1] - t[j]) - d) > 1e-9 * d)
            throw std::invalid_argument("ode_residual_U: stored times are not uniform near index");
    const auto& U = trace.U;
    const double u2 = (U[k + 1] - 2.0 * U[k] + U[k - 1]) / (d * d);
    const double u3 = (U[k + 2] - 2.0 * U[k + 1] + 2.0 * U[k - 1] - U[k - 2]) / (2.0 * d * d * d);
    const double f = trace.nonlin_integral[k];
    return std::abs(beta * u3 + u2 - f) / std::max(f, floor);
}

IdentitySides critical_identity(const Trajectory& traj, double t, const AuxKernelParams& params,
                                const EvolutionState& data, double eps, double beta) {
    const std::size_t k = traj.index_of(t);
    if (!(traj.grid == data.grid())) throw std::invalid_argument("critical_identity: grid mismatch");
    const KernelTable table(traj.grid, params);
    IdentitySides out;
    out.lhs = integrate_product(traj.states[k].u, table.eta(t, t));
    if (t == 0.0) {
        out.rhs = eps * integrate_product(data.u, table.xi(0.0));
        return out;
    }

    const double data_term = eps * integrate_product(data.u, table.xi(t));
    const double u1_term = eps * t * integrate_product(data.ut, table.eta(t, 0.0));

    // (t - s) e^{-s/beta} against the wave source, smooth in s.
    const RealField source = data.utt - laplacian(data.u);
    const auto gs = gauss_quadrature(0.0, t, 32);
    double source_term = 0.0;
    for (std::size_t q = 0; q < gs.nodes.size(); ++q) {
        const double s = gs.nodes[q];
        source_term += gs.weights[q] * (t - s) * std::exp(-s / beta) *
                       integrate_product(source, table.eta(t, s));
    }
    source_term *= eps;

    // G(s) = int_0^s e^{-(s-sigma)/beta} |u(sigma)|^p d sigma by the exponential trapezoid,
    // then trapezoid in s over the stored times.
    double memory_term = 0.0;
    if (traj.cfg.forcing) {
        RealField G(traj.grid);
        RealField f_prev = forcing_field(traj.states[0], traj.cfg);
        double prev_integrand = 0.0; // G(0) = 0
        for (std::size_t j = 0; j < k; ++j) {
            const double dlt = traj.times[j + 1] - traj.times[j];
            const double one_minus_E = -std::expm1(-dlt / beta);
            const double E = 1.0 - one_minus_E;
            const double b = beta - beta * beta * one_minus_E / dlt;
            const double a = beta * one_minus_E - b;
            RealField f_next = forcing_field(traj.states[j + 1], traj.cfg);
            for (std::size_t i = 0; i < G.size(); ++i)
                G.values[i] = E * G.values[i] + a * f_prev.values[i] + b * f_next.values[i];
            f_prev = std::move(f_next);
            const double s = traj.times[j + 1];
            const double integrand = (t - s) * integrate_product(G, table.eta(t, s));
            memory_term += 0.5 * dlt * (prev_integrand + integrand);
            prev_integrand = integrand;
        }
        memory_term /= beta;
    }
    out.rhs = data_term + u1_term + source_term + memory_term;
    return out;
}

double nonlin_lower_bound(double eps, double t, int n, double p, double R, double K, bool critical) {
    if (!(eps > 0.0) || !(t >= 0.0) || n < 1 || !(p > 0.0) || !(R > 0.0) || !(K > 0.0))
        throw std::invalid_argument("nonlin_lower_bound: inputs must be positive");
    const double base = critical ? japanese_bracket(t) : R + t;
    const double exponent = (n - 1) - (n - 1) * p / 2.0;
    return K * std::pow(eps, p) * std::pow(base, exponent);
}

FunctionalTrace compute_trace(const Trajectory& traj, double beta,
                              const std::optional<AuxKernelParams>& kernel) {
    FunctionalTrace tr;
    std::optional<KernelTable> table;
    if (kernel) {
        table.emplace(traj.grid, *kernel);
        tr.Ucal.emplace();
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& s = traj.states[k];
        const double t = traj.times[k];
        tr.times.push_back(t);
        tr.U.push_back(integrate(s.u));
        double u1 = kNaN;
        try {
            u1 = weighted_average_psi(traj, t);
        } catch (const std::invalid_argument&) {
        }
        tr.U1.push_back(u1);
        tr.E.push_back(energy_mgt(s, beta));
        tr.nonlin_integral.push_back(traj.cfg.forcing ? integrate(power_nonlinearity(s.u, traj.cfg.p))
                                                      : 0.0);
        tr.support_radius.push_back(support_radius(s.u));
        if (table) tr.Ucal->push_back(integrate_product(s.u, table->eta(t, t)));
    }
    return tr;
}

void write_trace_csv(const FunctionalTrace& tr, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out << "t,U,U1,Ucal,E,nonlin,support_radius\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        out << detail::shortest(tr.times[k]) << ',' << detail::shortest(tr.U[k]) << ','
            << detail::shortest(tr.U1[k]) << ',' << (tr.Ucal ? detail::shortest((*tr.Ucal)[k]) : "")
            << ',' << detail::shortest(tr.E[k]) << ',' << detail::shortest(tr.nonlin_integral[k])
            << ',' << detail::shortest(tr.support_radius[k]) << '\n';
    }
    if (!out) throw std::runtime_error(path.string() + ": write failed");
}

LemmaConstants extract_lemma_constants(const AuxKernelParams& params, int dim,
                                       const LemmaLattice& lat) {
    if (lat.n_t < 2 || lat.n_s < 2 || lat.n_radii < 2)
        throw std::invalid_argument("extract_lemma_constants: lattice too small");
    const auto rule = lambda_rule(params, params.quad_nodes, lat.t_max + params.R);
    const double R = params.R, r = params.r, n = dim;

    auto lin = [](double a, double b, int m, int i) { return a + (b - a) * i / (m - 1); };
    std::vector<double> ts(lat.n_t), ss(lat.n_s);
    for (int i = 0; i < lat.n_t; ++i) ts[i] = lin(0.0, lat.t_max, lat.n_t, i);
    for (int j = 0; j < lat.n_s; ++j) ss[j] = lin(0.0, lat.t_max, lat.n_s, j);

    // log Phi(lambda_q rho) for a radius list, reused across times.
    auto phi_table = [&](const std::vector<double>& radii) {
        std::vector<double> v(radii.size() * rule.lambda.size());
        for (std::size_t i = 0; i < radii.size(); ++i)
            for (std::size_t q = 0; q < rule.lambda.size(); ++q)
                v[i * rule.lambda.size() + q] = log_phi_radial(rule.lambda[q] * radii[i], dim);
        return v;
    };
    auto kernel = [&](const double* log_phi, double t, auto&& log_time) {
        return log_space_sum(rule.lambda.size(), [&](std::size_t q) {
            const double l = rule.lambda[q];
            return rule.log_w[q] - l * (t + R) + log_time(l) + log_phi[q];
        });
    };
    const std::size_t nq = rule.lambda.size();

    LemmaConstants c;
    c.A0 = c.B0 = c.B1 = std::numeric_limits<double>::infinity();
    c.B2 = 0.0;

    std::vector<double> inner(lat.n_radii);
    for (int i = 0; i < lat.n_radii; ++i) inner[i] = lin(0.0, R, lat.n_radii, i);
    const auto inner_phi = phi_table(inner);
    for (double t : ts)
        for (int i = 0; i < lat.n_radii; ++i) {
            const double* lp = &inner_phi[i * nq];
            c.A0 = std::min(c.A0, kernel(lp, t, [&](double l) { return log_cosh(l * t); }));
            c.B0 = std::min(c.B0, japanese_bracket(t) *
                                      kernel(lp, t, [&](double l) { return log_sinhc(l * t); }));
        }

    for (double s : ss) {
        std::vector<double> radii(lat.n_radii);
        for (int i = 0; i < lat.n_radii; ++i) radii[i] = lin(0.0, s + R, lat.n_radii, i);
        const auto lp_all = phi_table(radii);
        for (double t : ts) {
            if (!(t > s)) continue;
            const double w = japanese_bracket(t) * std::pow(japanese_bracket(s), r);
            for (int i = 0; i < lat.n_radii; ++i)
                c.B1 = std::min(c.B1, w * kernel(&lp_all[i * nq], t,
                                                 [&](double l) { return log_sinhc(l * (t - s)); }));
        }
    }

    for (double t : ts) {
        if (!(t > 0.0)) continue;
        std::vector<double> radii(lat.n_radii);
        for (int i = 0; i < lat.n_radii; ++i) radii[i] = lin(0.0, t + R, lat.n_radii, i);
        const auto lp_all = phi_table(radii);
        for (int i = 0; i < lat.n_radii; ++i) {
            const double eta = kernel(&lp_all[i * nq], t, [](double) { return 0.0; });
            const double w = std::pow(japanese_bracket(t), (n - 1) / 2.0) *
                             std::pow(japanese_bracket(t - radii[i]), r - (n - 3) / 2.0);
            c.B2 = std::max(c.B2, eta * w);
        }
    }
    return c;
}

} // namespace mgt
