#pragma once

#include "dispersive/field.hpp"

#include <complex>
#include <cstddef>
#include <span>

namespace dispersive {

/// FFTW-backed complex DFT pair of fixed length. Owns its aligned scratch
/// buffers, so one instance must not be used from two threads at once.
/// Plans are built with FFTW_ESTIMATE, which keeps results reproducible.
class SpectralTransform {
public:
    explicit SpectralTransform(std::size_t n);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;
    SpectralTransform(SpectralTransform&& other) noexcept;
    SpectralTransform& operator=(SpectralTransform&& other) noexcept;

    std::size_t size() const noexcept { return n_; }

    /// out_k = sum_n in_n exp(-2 pi i k n / N)
    void forward(std::span<const double> in, std::span<Complex> out);
    void forward(std::span<const Complex> in, std::span<Complex> out);
    /// out_n = Re( (1/N) sum_k in_k exp(2 pi i k n / N) ). Returns the largest
    /// discarded imaginary part.
    double inverse(std::span<const Complex> in, std::span<double> out);
    void inverse(std::span<const Complex> in, std::span<Complex> out);

private:
    void release() noexcept;

    std::size_t n_ = 0;
    Complex* in_ = nullptr;
    Complex* out_ = nullptr;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

/// Per-thread cached transform of the requested length.
SpectralTransform& thread_transform(std::size_t n);

Field to_spectral(const Field& f);
Field to_physical(const Field& f);
/// Returns the largest imaginary residue relative to the largest real sample.
Field to_physical(const Field& f, double& relative_imag_residue);

}  // namespace dispersive
