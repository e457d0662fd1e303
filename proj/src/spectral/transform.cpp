#include "dispersive/transform.hpp"

#include "dispersive/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace dispersive {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralTransform::SpectralTransform(std::size_t n) : n_(n) {
    if (n == 0) throw ConfigError("transform length must be positive");
    std::lock_guard lock(planner_mutex());
    in_ = reinterpret_cast<Complex*>(fftw_alloc_complex(n));
    out_ = reinterpret_cast<Complex*>(fftw_alloc_complex(n));
    if (!in_ || !out_) {
        release();
        throw std::bad_alloc();
    }
    const int len = static_cast<int>(n);
    forward_plan_ = fftw_plan_dft_1d(len, as_fftw(in_), as_fftw(out_), FFTW_FORWARD, FFTW_ESTIMATE);
    inverse_plan_ =
        fftw_plan_dft_1d(len, as_fftw(in_), as_fftw(out_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

SpectralTransform::~SpectralTransform() {
    if (in_ || forward_plan_) {
        std::lock_guard lock(planner_mutex());
        release();
    }
}

SpectralTransform::SpectralTransform(SpectralTransform&& other) noexcept
    : n_(other.n_),
      in_(other.in_),
      out_(other.out_),
      forward_plan_(other.forward_plan_),
      inverse_plan_(other.inverse_plan_) {
    other.in_ = other.out_ = nullptr;
    other.forward_plan_ = other.inverse_plan_ = nullptr;
}

SpectralTransform& SpectralTransform::operator=(SpectralTransform&& other) noexcept {
    if (this != &other) {
        {
            std::lock_guard lock(planner_mutex());
            release();
        }
        n_ = other.n_;
        in_ = other.in_;
        out_ = other.out_;
        forward_plan_ = other.forward_plan_;
        inverse_plan_ = other.inverse_plan_;
        other.in_ = other.out_ = nullptr;
        other.forward_plan_ = other.inverse_plan_ = nullptr;
    }
    return *this;
}

void SpectralTransform::release() noexcept {
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
    if (in_) fftw_free(in_);
    if (out_) fftw_free(out_);
    forward_plan_ = inverse_plan_ = nullptr;
    in_ = out_ = nullptr;
}

void SpectralTransform::forward(std::span<const double> in, std::span<Complex> out) {
    if (in.size() != n_ || out.size() != n_) throw GridMismatchError("transform size mismatch");
    for (std::size_t i = 0; i < n_; ++i) in_[i] = Complex(in[i], 0.0);
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    std::copy(out_, out_ + n_, out.begin());
}

void SpectralTransform::forward(std::span<const Complex> in, std::span<Complex> out) {
    if (in.size() != n_ || out.size() != n_) throw GridMismatchError("transform size mismatch");
    std::copy(in.begin(), in.end(), in_);
    fftw_execute(static_cast<fftw_plan>(forward_plan_));
    std::copy(out_, out_ + n_, out.begin());
}

double SpectralTransform::inverse(std::span<const Complex> in, std::span<double> out) {
    if (in.size() != n_ || out.size() != n_) throw GridMismatchError("transform size mismatch");
    std::copy(in.begin(), in.end(), in_);
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    const double scale = 1.0 / static_cast<double>(n_);
    double residue = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        out[i] = out_[i].real() * scale;
        residue = std::max(residue, std::fabs(out_[i].imag() * scale));
    }
    return residue;
}

void SpectralTransform::inverse(std::span<const Complex> in, std::span<Complex> out) {
    if (in.size() != n_ || out.size() != n_) throw GridMismatchError("transform size mismatch");
    std::copy(in.begin(), in.end(), in_);
    fftw_execute(static_cast<fftw_plan>(inverse_plan_));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = out_[i] * scale;
}

SpectralTransform& thread_transform(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<SpectralTransform>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<SpectralTransform>(n);
    return *slot;
}

Field to_spectral(const Field& f) {
    if (!f.is_physical()) throw RepresentationError("to_spectral expects a physical field");
    std::vector<Complex> modes(f.size());
    thread_transform(f.size()).forward(f.values(), modes);
    return Field::spectral(f.grid_ptr(), std::move(modes));
}

Field to_physical(const Field& f, double& relative_imag_residue) {
    if (!f.is_spectral()) throw RepresentationError("to_physical expects a spectral field");
    std::vector<double> values(f.size());
    const double residue = thread_transform(f.size()).inverse(f.modes(), values);
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, std::fabs(v));
    relative_imag_residue = peak > 0.0 ? residue / peak : residue;
    return Field::physical(f.grid_ptr(), std::move(values));
}

Field to_physical(const Field& f) {
    double ignored = 0.0;
    return to_physical(f, ignored);
}

}  // namespace dispersive
