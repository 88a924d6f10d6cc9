#include "mgt/linear.hpp"

#include <cmath>
#include <stdexcept>

namespace mgt {

namespace {

struct BranchCoefficients {
    double a; // cos(kt)
    double b; // sin(kt)/k
    double c; // e^{-t/beta}
};

BranchCoefficients branch_coefficients(int branch, double k, double beta) {
    const double b2 = beta * beta * k * k;
    const double inv = 1.0 / (1.0 + b2);
    switch (branch) {
    case 0: return {inv, beta * k * k * inv, b2 * inv};
    case 1: return {0.0, 1.0, 0.0};
    case 2: return {-beta * beta * inv, beta * inv, beta * beta * inv};
    default: throw std::invalid_argument("multiplier branch must be 0, 1 or 2");
    }
}

// sin(kt)/k, continuous at k = 0.
double sin_over_k(double t, double k) {
    const double z = k * t;
    if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return t * (1.0 - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0);
    }
    return std::sin(z) / k;
}

// m-th derivative of cos(kt) expressed through c = cos(kt) and s = sin(kt)/k.
double cos_derivative(int m, double k, double c, double s) {
    const double mk2 = -k * k;
    if (m % 2 == 0) return std::pow(mk2, m / 2) * c;
    return std::pow(mk2, (m + 1) / 2) * s;
}

double branch_derivative(const BranchCoefficients& co, int order, double k, double beta, double c,
                         double s, double e) {
    const double dc = cos_derivative(order, k, c, s);
    const double ds = order == 0 ? s : cos_derivative(order - 1, k, c, s);
    const double de = std::pow(-1.0 / beta, order) * e;
    return co.a * dc + co.b * ds + co.c * de;
}

void check_common(double t, double beta) {
    if (!(t >= 0.0)) throw std::invalid_argument("multipliers: t must be nonnegative");
    if (!(beta > 0.0)) throw std::invalid_argument("multipliers: beta must be positive");
}

void require_grid(const EvolutionState& s) {
    if (!(s.u.grid == s.ut.grid) || !(s.u.grid == s.utt.grid))
        throw std::invalid_argument("EvolutionState: fields live on different grids");
}

} // namespace

EvolutionState EvolutionState::zero(const SpatialGrid& g) {
    return EvolutionState{0.0, RealField(g), RealField(g), RealField(g)};
}

SpectralState to_spectral(const EvolutionState& s) {
    return SpectralState{s.t, forward_transform(s.u), forward_transform(s.ut),
                         forward_transform(s.utt)};
}

EvolutionState to_physical(const SpectralState& s) {
    return EvolutionState{s.t, inverse_transform(s.u), inverse_transform(s.ut),
                          inverse_transform(s.utt)};
}

std::array<std::complex<double>, 3> characteristic_roots(double beta, double xi_norm) {
    if (!(beta > 0.0)) throw std::invalid_argument("characteristic_roots: beta must be positive");
    return {std::complex<double>(0.0, xi_norm), std::complex<double>(0.0, -xi_norm),
            std::complex<double>(-1.0 / beta, 0.0)};
}

double multiplier_derivative(double t, double xi_norm, double beta, int branch, int order) {
    check_common(t, beta);
    if (order < 0) throw std::invalid_argument("multiplier_derivative: negative order");
    const double k = std::abs(xi_norm);
    const auto co = branch_coefficients(branch, k, beta);
    return branch_derivative(co, order, k, beta, std::cos(k * t), sin_over_k(t, k),
                             std::exp(-t / beta));
}

MultiplierTriple multipliers(double t, double xi_norm, double beta) {
    check_common(t, beta);
    const double k = std::abs(xi_norm);
    const double c = std::cos(k * t), s = sin_over_k(t, k), e = std::exp(-t / beta);
    MultiplierTriple m;
    m.t = t;
    m.xi = k;
    m.beta = beta;
    double* values[3][3] = {{&m.k0, &m.dk0, &m.ddk0}, {&m.k1, &m.dk1, &m.ddk1}, {&m.k2, &m.dk2, &m.ddk2}};
    for (int branch = 0; branch < 3; ++branch) {
        const auto co = branch_coefficients(branch, k, beta);
        for (int order = 0; order < 3; ++order)
            *values[branch][order] = branch_derivative(co, order, k, beta, c, s, e);
    }
    return m;
}

LinearFlow::LinearFlow(const SpatialGrid& grid, double beta, double h)
    : grid_(grid), h_(h), matrices_(grid.size()) {
    check_common(h, beta);
    auto kn = grid.wavenumber_norm();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto m = multipliers(h, kn[i], beta);
        // Row = derivative order, column = branch.
        matrices_[i] = {m.k0, m.k1, m.k2, m.dk0, m.dk1, m.dk2, m.ddk0, m.ddk1, m.ddk2};
    }
}

void LinearFlow::apply(SpectralField& u, SpectralField& ut, SpectralField& utt) const {
    for (std::size_t i = 0; i < matrices_.size(); ++i) {
        const auto& M = matrices_[i];
        const Complex y0 = u.coefficients[i], y1 = ut.coefficients[i], y2 = utt.coefficients[i];
        u.coefficients[i] = M[0] * y0 + M[1] * y1 + M[2] * y2;
        ut.coefficients[i] = M[3] * y0 + M[4] * y1 + M[5] * y2;
        utt.coefficients[i] = M[6] * y0 + M[7] * y1 + M[8] * y2;
    }
}

void LinearFlow::apply(SpectralState& s) const {
    apply(s.u, s.ut, s.utt);
    s.t += h_;
}

EvolutionState propagate_linear(const EvolutionState& s0, double t, double beta) {
    require_grid(s0);
    check_common(t, beta);
    if (t == 0.0) return s0;
    SpectralState spec = to_spectral(s0);
    LinearFlow(s0.grid(), beta, t).apply(spec);
    return to_physical(spec);
}

std::array<RealField, 2> propagate_free_wave(const RealField& w0, const RealField& w1, double t) {
    if (!(w0.grid == w1.grid)) throw std::invalid_argument("propagate_free_wave: grid mismatch");
    SpectralField W0 = forward_transform(w0), W1 = forward_transform(w1);
    SpectralField W(w0.grid), Wt(w0.grid);
    auto kn = w0.grid.wavenumber_norm();
    for (std::size_t i = 0; i < W.size(); ++i) {
        const double k = kn[i];
        const double c = std::cos(k * t), s = sin_over_k(t, k);
        W.coefficients[i] = c * W0.coefficients[i] + s * W1.coefficients[i];
        Wt.coefficients[i] = -k * k * s * W0.coefficients[i] + c * W1.coefficients[i];
    }
    return {inverse_transform(W), inverse_transform(Wt)};
}

double energy_mgt(const EvolutionState& s, double beta) {
    require_grid(s);
    RealField v = s.ut;
    RealField w = s.u;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v.values[i] += beta * s.utt.values[i];
        w.values[i] += beta * s.ut.values[i];
    }
    const double time_part = l2_norm(v);
    const double grad_part = gradient_norm(w);
    return 0.5 * time_part * time_part + 0.5 * grad_part * grad_part;
}

RealField wave_source(const RealField& u0, const RealField& u2, double t, double beta) {
    if (!(u0.grid == u2.grid)) throw std::invalid_argument("wave_source: grid mismatch");
    RealField out = u2 - laplacian(u0);
    out *= std::exp(-t / beta);
    return out;
}

DataNorms DataNorms::of(const EvolutionState& data) {
    require_grid(data);
    DataNorms n;
    n.u0_l2 = l2_norm(data.u);
    n.u0_h1 = sobolev_norm(data.u, 1);
    n.u0_h2 = sobolev_norm(data.u, 2);
    n.u1_l2 = l2_norm(data.ut);
    n.u1_h1 = sobolev_norm(data.ut, 1);
    n.u2_l2 = l2_norm(data.utt);
    return n;
}

L2Bounds l2_bound_rhs(const DataNorms& d, double t, double constant) {
    L2Bounds b;
    b.u = constant * (d.u0_l2 + (1.0 + t) * (d.u1_l2 + d.u2_l2));
    b.grad_u = constant * (d.u0_h1 + d.u1_l2 + d.u2_l2);
    b.hess_u = constant * (d.u0_h2 + d.u1_h1 + d.u2_l2);
    b.ut = constant * (d.u0_l2 + d.u1_l2 + d.u2_l2);
    b.grad_ut = constant * (d.u0_h1 + d.u1_h1 + d.u2_l2);
    b.utt = constant * (d.u0_h1 + d.u1_h1 + d.u2_l2);
    return b;
}

} // namespace mgt
