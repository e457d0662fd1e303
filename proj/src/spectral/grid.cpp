#include "dispersive/grid.hpp"

#include "dispersive/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dispersive {

Grid::Grid(double length, std::size_t points, double x_min)
    : length_(length),
      points_(points),
      spacing_(length / static_cast<double>(points)),
      x_min_(x_min),
      coordinates_(points),
      wavenumbers_(points) {
    const double base = 2.0 * std::numbers::pi / length;
    const auto n = static_cast<std::ptrdiff_t>(points);
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        coordinates_[k] = x(static_cast<std::size_t>(k));
        const std::ptrdiff_t signed_k = k < n / 2 ? k : k - n;
        wavenumbers_[k] = base * static_cast<double>(signed_k);
    }
}

GridPtr Grid::make(double length, std::size_t points, double x_min) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError("grid length must be positive and finite");
    }
    if (points < 8 || points % 2 != 0) {
        throw ConfigError("grid point count must be even and at least 8 (got " +
                          std::to_string(points) + ")");
    }
    if (!std::isfinite(x_min)) throw ConfigError("grid origin must be finite");
    return GridPtr(new Grid(length, points, x_min));
}

}  // namespace dispersive
