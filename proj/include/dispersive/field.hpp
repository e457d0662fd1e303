#pragma once

#include "dispersive/grid.hpp"

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace dispersive {

using Complex = std::complex<double>;

enum class Representation { physical, spectral };

/// A real-valued profile on a Grid, held either as N physical samples or as
/// N complex Fourier amplitudes (unnormalized forward DFT, FFT ordering).
class Field {
public:
    Field() = default;

    static Field zeros(GridPtr grid);
    static Field physical(GridPtr grid, std::vector<double> values);
    static Field spectral(GridPtr grid, std::vector<Complex> modes);
    static Field sample(GridPtr grid, const std::function<double(double)>& f);
    static Field constant(GridPtr grid, double value);

    Representation representation() const noexcept { return rep_; }
    bool is_physical() const noexcept { return rep_ == Representation::physical; }
    bool is_spectral() const noexcept { return rep_ == Representation::spectral; }

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_ ? grid_->size() : 0; }

    /// Physical samples; throws RepresentationError if spectral.
    std::span<const double> values() const;
    std::span<double> values();
    /// Spectral amplitudes; throws RepresentationError if physical.
    std::span<const Complex> modes() const;
    std::span<Complex> modes();

    bool all_finite() const noexcept;

    Field& operator*=(double c);

private:
    Field(GridPtr grid, Representation rep) : grid_(std::move(grid)), rep_(rep) {}

    GridPtr grid_;
    Representation rep_ = Representation::physical;
    std::vector<double> real_;
    std::vector<Complex> modes_;
};

/// Throws GridMismatchError unless both fields share a grid.
void require_same_grid(const Field& a, const Field& b, const char* context);

}  // namespace dispersive
