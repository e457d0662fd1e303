#pragma once

// Data-parallel arithmetic kernels used by the spectral and time-stepping
// layers. Each kernel has a scalar reference implementation and, where the
// target supports it, an AVX2+FMA variant. The active table is chosen once at
// runtime from CPU features; DISPERSIVE_SIMD=scalar forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace dispersive::kernels {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

struct KernelTable {
    Isa isa;
    const char* name;

    // out = a * b (complex, elementwise)
    void (*cmul)(const Complex* a, const Complex* b, Complex* out, std::size_t n);
    // out += a * b (complex, elementwise)
    void (*cmul_acc)(const Complex* a, const Complex* b, Complex* out, std::size_t n);
    // out = w * x with real per-mode weight w
    void (*rcmul)(const double* w, const Complex* x, Complex* out, std::size_t n);
    // sum_i w_i |x_i|^2
    double (*weighted_power)(const double* w, const Complex* x, std::size_t n);

    // out = a * b (real, elementwise)
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    // out = -(a * v + b * d)
    void (*damping)(const double* a, const double* v, const double* b, const double* d,
                    double* out, std::size_t n);
    // out = a^e for integer e >= 1
    void (*ipow)(const double* a, int e, double* out, std::size_t n);
    // out = alpha * x + y
    void (*axpy)(double alpha, const double* x, const double* y, double* out, std::size_t n);

    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a_i b_i c_i
    double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
    double (*max_abs)(const double* a, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks the features.
const KernelTable* avx2_table() noexcept;

/// The table selected for this process.
const KernelTable& active() noexcept;

bool cpu_has_avx2_fma() noexcept;

// Span wrappers over the active table. Length mismatches throw std::invalid_argument.

void cmul(std::span<const Complex> a, std::span<const Complex> b, std::span<Complex> out);
void cmul_acc(std::span<const Complex> a, std::span<const Complex> b, std::span<Complex> out);
void rcmul(std::span<const double> w, std::span<const Complex> x, std::span<Complex> out);
double weighted_power(std::span<const double> w, std::span<const Complex> x);

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out);
void damping(std::span<const double> a, std::span<const double> v, std::span<const double> b,
             std::span<const double> d, std::span<double> out);
void ipow(std::span<const double> a, int e, std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<const double> y,
          std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c);
double max_abs(std::span<const double> a);

}  // namespace dispersive::kernels
