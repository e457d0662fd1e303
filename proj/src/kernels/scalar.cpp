#include "dispersive/kernels.hpp"

#include <cmath>

namespace dispersive::kernels {
namespace {

void cmul_scalar(const Complex* a, const Complex* b, Complex* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] = Complex(ar * br - ai * bi, ai * br + ar * bi);
    }
}

void cmul_acc_scalar(const Complex* a, const Complex* b, Complex* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out[i] += Complex(ar * br - ai * bi, ai * br + ar * bi);
    }
}

void rcmul_scalar(const double* w, const Complex* x, Complex* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = Complex(w[i] * x[i].real(), w[i] * x[i].imag());
}

double weighted_power_scalar(const double* w, const Complex* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    }
    return s;
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void damping_scalar(const double* a, const double* v, const double* b, const double* d,
                    double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = -(a[i] * v[i] + b[i] * d[i]);
}

void ipow_scalar(const double* a, int e, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        // square-and-multiply, same operation order as the vector variant
        double base = a[i];
        double acc = 1.0;
        int k = e;
        while (k > 0) {
            if (k & 1) acc *= base;
            base *= base;
            k >>= 1;
        }
        out[i] = acc;
    }
}

void axpy_scalar(double alpha, const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + y[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * c[i];
    return s;
}

double max_abs_scalar(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::fabs(a[i]);
        if (v > m || std::isnan(v)) m = v;
        if (std::isnan(m)) return m;
    }
    return m;
}

constexpr KernelTable kScalar{
    Isa::scalar,           "scalar",        cmul_scalar,      cmul_acc_scalar,
    rcmul_scalar,          weighted_power_scalar,
    mul_scalar,            damping_scalar,  ipow_scalar,      axpy_scalar,
    dot_scalar,            dot3_scalar,     max_abs_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace dispersive::kernels
