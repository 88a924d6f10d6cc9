#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mgt {

namespace detail {
struct GridTables;
}

/// Periodic box [-half_width, half_width)^dim with points_per_dim points per axis.
///
/// Flat storage is row-major with axis 0 slowest. Spectral arrays use the
/// standard DFT ordering (0, 1, ..., N/2-1, -N/2, ..., -1) scaled by pi/half_width.
/// Copies share the immutable lookup tables.
class SpatialGrid {
public:
    SpatialGrid() = default;

    int dim() const { return dim_; }
    double half_width() const { return half_width_; }
    int points_per_dim() const { return points_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return size_; }

    double cell_volume() const;
    double box_volume() const;
    /// Largest wavenumber magnitude on one axis (the Nyquist frequency).
    double k_max() const;

    /// Per-axis wavenumbers in DFT order.
    std::span<const double> wavenumbers() const;
    /// Per-axis physical coordinates -half_width + i*spacing.
    std::span<const double> coordinates() const;
    /// |k| for every flat spectral index.
    std::span<const double> wavenumber_norm() const;
    /// |k|^2 for every flat spectral index.
    std::span<const double> wavenumber_norm2() const;
    /// |x| for every flat physical index.
    std::span<const double> radius() const;

    std::array<int, 3> multi_index(std::size_t flat) const;
    /// Physical position of a flat index; unused trailing components are zero.
    std::array<double, 3> position(std::size_t flat) const;

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
        return a.dim_ == b.dim_ && a.points_ == b.points_ && a.half_width_ == b.half_width_;
    }

    friend SpatialGrid make_grid(int dim, double half_width, int points_per_dim);

private:
    int dim_ = 0;
    int points_ = 0;
    double half_width_ = 0.0;
    double spacing_ = 0.0;
    std::size_t size_ = 0;
    std::shared_ptr<const detail::GridTables> tables_;
};

/// Throws std::invalid_argument for dim outside {1,2,3}, non-positive half_width,
/// or points_per_dim odd or below 8.
SpatialGrid make_grid(int dim, double half_width, int points_per_dim);

} // namespace mgt
