#include "mgt/field.hpp"

#include "fft.hpp"
#include "mgt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mgt {

namespace {

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

template <class F>
RealField transformed(const RealField& f, F&& multiplier) {
    SpectralField F_hat = forward_transform(f);
    auto kn = f.grid.wavenumber_norm();
    for (std::size_t i = 0; i < F_hat.coefficients.size(); ++i)
        F_hat.coefficients[i] *= multiplier(kn[i]);
    return inverse_transform(F_hat);
}

} // namespace

RealField::RealField(const SpatialGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw std::invalid_argument("RealField: value count does not match grid");
}

RealField RealField::from_function(const SpatialGrid& g,
                                   const std::function<double(std::span<const double>)>& f) {
    RealField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.position(i);
        out.values[i] = f(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim())));
    }
    return out;
}

double RealField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

bool RealField::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

RealField& RealField::operator+=(const RealField& o) {
    require_same_grid(grid, o.grid, "RealField +=");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

RealField& RealField::operator-=(const RealField& o) {
    require_same_grid(grid, o.grid, "RealField -=");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

RealField& RealField::operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }

SpectralField forward_transform(const RealField& f) {
    SpectralField out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.coefficients[i] = Complex(f.values[i], 0.0);
    detail::fft_inplace(out.coefficients, f.grid.dim(), f.grid.points_per_dim(), -1);
    const double h = f.grid.cell_volume();
    for (auto& c : out.coefficients) c *= h;
    return out;
}

RealField inverse_transform(const SpectralField& F) {
    std::vector<Complex> work = F.coefficients;
    detail::fft_inplace(work, F.grid.dim(), F.grid.points_per_dim(), +1);
    const double scale = 1.0 / F.grid.box_volume();
    RealField out(F.grid);
    double max_real = 0.0, max_imag = 0.0, coef_sum = 0.0;
    for (std::size_t i = 0; i < work.size(); ++i) {
        out.values[i] = work[i].real() * scale;
        max_real = std::max(max_real, std::abs(out.values[i]));
        max_imag = std::max(max_imag, std::abs(work[i].imag() * scale));
        coef_sum += std::abs(F.coefficients[i]);
    }
    // A field that nearly cancels has roundoff set by the coefficient sum, not by its values.
    const double reference = std::max(max_real, 1e-4 * coef_sum * scale);
    if (max_imag > 1e-10 * reference && max_imag > 0.0)
        throw SpectralSymmetryError("inverse_transform: imaginary residue " +
                                    std::to_string(max_imag) + " exceeds 1e-10 of " +
                                    std::to_string(max_real));
    return out;
}

double integrate(const RealField& f) {
    return f.grid.cell_volume() * std::accumulate(f.values.begin(), f.values.end(), 0.0);
}

double integrate_product(const RealField& f, const RealField& g) {
    require_same_grid(f.grid, g.grid, "integrate_product");
    return f.grid.cell_volume() *
           std::inner_product(f.values.begin(), f.values.end(), g.values.begin(), 0.0);
}

double l2_norm(const RealField& f) { return std::sqrt(integrate_product(f, f)); }

double l2_norm(const SpectralField& F) {
    double s = 0.0;
    for (const auto& c : F.coefficients) s += std::norm(c);
    return std::sqrt(s / F.grid.box_volume());
}

RealField apply_radial_multiplier(const RealField& f, const std::function<double(double)>& m) {
    return transformed(f, m);
}

RealField laplacian(const RealField& f) {
    return transformed(f, [](double k) { return -k * k; });
}

double homogeneous_sobolev_norm(const RealField& f, int order) {
    if (order < 0) throw std::invalid_argument("homogeneous_sobolev_norm: negative order");
    SpectralField F = forward_transform(f);
    auto kn = f.grid.wavenumber_norm();
    double s = 0.0;
    for (std::size_t i = 0; i < F.coefficients.size(); ++i)
        s += std::norm(F.coefficients[i]) * std::pow(kn[i], 2 * order);
    return std::sqrt(s / f.grid.box_volume());
}

double gradient_norm(const RealField& f) { return homogeneous_sobolev_norm(f, 1); }

double sobolev_norm(const RealField& f, int order) {
    if (order < 0) throw std::invalid_argument("sobolev_norm: negative order");
    SpectralField F = forward_transform(f);
    auto k2 = f.grid.wavenumber_norm2();
    double s = 0.0;
    for (std::size_t i = 0; i < F.coefficients.size(); ++i)
        s += std::norm(F.coefficients[i]) * std::pow(1.0 + k2[i], order);
    return std::sqrt(s / f.grid.box_volume());
}

void dealias_two_thirds(SpectralField& F) {
    const auto& g = F.grid;
    const double cutoff = (2.0 / 3.0) * g.k_max();
    auto k = g.wavenumbers();
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) {
        auto idx = g.multi_index(i);
        for (int d = 0; d < g.dim(); ++d) {
            if (std::abs(k[idx[d]]) > cutoff) {
                F.coefficients[i] = Complex{};
                break;
            }
        }
    }
}

double mass_outside_ball(const RealField& f, double radius) {
    if (radius < 0) throw std::invalid_argument("mass_outside_ball: negative radius");
    auto r = f.grid.radius();
    double total = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double a = std::abs(f.values[i]);
        total += a;
        if (r[i] > radius) outside += a;
    }
    return total > 0.0 ? outside / total : 0.0;
}

double support_radius(const RealField& f, double tol) {
    auto r = f.grid.radius();
    std::vector<std::size_t> order(f.values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
    double total = 0.0;
    for (double v : f.values) total += std::abs(v);
    if (total == 0.0) return 0.0;
    // Walk inwards from the farthest point until the exterior mass exceeds tol.
    double outside = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if ((outside + std::abs(f.values[i])) / total > tol) return r[i];
        outside += std::abs(f.values[i]);
    }
    return 0.0;
}

} // namespace mgt
