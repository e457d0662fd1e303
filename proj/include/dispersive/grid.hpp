#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dispersive {

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic grid on [x_min, x_min + L) with N (even) points.
///
/// Wavenumbers are stored in FFT ordering: index k < N/2 holds 2*pi*k/L and
/// index k >= N/2 holds 2*pi*(k - N)/L. Index N/2 is the Nyquist mode
/// (wavenumber -pi*N/L); odd-order derivatives zero it.
class Grid {
public:
    static GridPtr make(double length, std::size_t points, double x_min = 0.0);

    double length() const noexcept { return length_; }
    std::size_t size() const noexcept { return points_; }
    double spacing() const noexcept { return spacing_; }
    double x_min() const noexcept { return x_min_; }
    double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * spacing_; }

    std::span<const double> coordinates() const noexcept { return coordinates_; }
    std::span<const double> wavenumbers() const noexcept { return wavenumbers_; }
    std::size_t nyquist_index() const noexcept { return points_ / 2; }

    bool same_as(const Grid& other) const noexcept {
        return this == &other ||
               (points_ == other.points_ && length_ == other.length_ && x_min_ == other.x_min_);
    }

private:
    Grid(double length, std::size_t points, double x_min);

    double length_;
    std::size_t points_;
    double spacing_;
    double x_min_;
    std::vector<double> coordinates_;
    std::vector<double> wavenumbers_;
};

}  // namespace dispersive
