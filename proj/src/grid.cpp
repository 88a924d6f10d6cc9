#include "mgt/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mgt {

namespace detail {
struct GridTables {
    std::vector<double> wavenumbers;
    std::vector<double> coordinates;
    std::vector<double> k_norm;
    std::vector<double> k_norm2;
    std::vector<double> radius;
};
} // namespace detail

SpatialGrid make_grid(int dim, double half_width, int points_per_dim) {
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("make_grid: dim must be 1, 2 or 3, got " + std::to_string(dim));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("make_grid: half_width must be positive");
    if (points_per_dim < 8 || points_per_dim % 2 != 0)
        throw std::invalid_argument("make_grid: points_per_dim must be even and >= 8, got " +
                                    std::to_string(points_per_dim));

    SpatialGrid g;
    g.dim_ = dim;
    g.points_ = points_per_dim;
    g.half_width_ = half_width;
    g.spacing_ = 2.0 * half_width / points_per_dim;
    g.size_ = 1;
    for (int d = 0; d < dim; ++d) g.size_ *= static_cast<std::size_t>(points_per_dim);

    auto t = std::make_shared<detail::GridTables>();
    const int n = points_per_dim;
    const double scale = std::numbers::pi / half_width;
    t->wavenumbers.resize(n);
    t->coordinates.resize(n);
    for (int i = 0; i < n; ++i) {
        const int freq = i < n / 2 ? i : i - n;
        t->wavenumbers[i] = scale * freq;
        t->coordinates[i] = -half_width + i * g.spacing_;
    }

    t->k_norm2.resize(g.size_);
    t->k_norm.resize(g.size_);
    t->radius.resize(g.size_);
    for (std::size_t flat = 0; flat < g.size_; ++flat) {
        auto idx = g.multi_index(flat);
        double k2 = 0.0, r2 = 0.0;
        for (int d = 0; d < dim; ++d) {
            k2 += t->wavenumbers[idx[d]] * t->wavenumbers[idx[d]];
            r2 += t->coordinates[idx[d]] * t->coordinates[idx[d]];
        }
        t->k_norm2[flat] = k2;
        t->k_norm[flat] = std::sqrt(k2);
        t->radius[flat] = std::sqrt(r2);
    }
    g.tables_ = std::move(t);
    return g;
}

double SpatialGrid::cell_volume() const { return std::pow(spacing_, dim_); }
double SpatialGrid::box_volume() const { return std::pow(2.0 * half_width_, dim_); }
double SpatialGrid::k_max() const { return std::numbers::pi / half_width_ * (points_ / 2); }

std::span<const double> SpatialGrid::wavenumbers() const { return tables_->wavenumbers; }
std::span<const double> SpatialGrid::coordinates() const { return tables_->coordinates; }
std::span<const double> SpatialGrid::wavenumber_norm() const { return tables_->k_norm; }
std::span<const double> SpatialGrid::wavenumber_norm2() const { return tables_->k_norm2; }
std::span<const double> SpatialGrid::radius() const { return tables_->radius; }

std::array<int, 3> SpatialGrid::multi_index(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = dim_ - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(flat % static_cast<std::size_t>(points_));
        flat /= static_cast<std::size_t>(points_);
    }
    return idx;
}

std::array<double, 3> SpatialGrid::position(std::size_t flat) const {
    auto idx = multi_index(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int d = 0; d < dim_; ++d) x[d] = tables_->coordinates[idx[d]];
    return x;
}

} // namespace mgt
