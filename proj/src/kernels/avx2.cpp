// Compiled with -mavx2 -mfma; only reached through avx2_table() after a
// runtime CPU check.

#include "dispersive/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#define DISPERSIVE_HAVE_AVX2 1
#include <immintrin.h>
#endif

#include <cmath>

namespace dispersive::kernels {

#if DISPERSIVE_HAVE_AVX2
namespace {

// Two interleaved complex doubles per register: [re0 im0 re1 im1].
inline __m256d complex_mul(__m256d a, __m256d b) {
    const __m256d b_re = _mm256_movedup_pd(b);
    const __m256d b_im = _mm256_permute_pd(b, 0xF);
    const __m256d a_swap = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void cmul_avx2(const Complex* a, const Complex* b, Complex* out, std::size_t n) {
    auto* pa = reinterpret_cast<const double*>(a);
    auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(po + 2 * i,
                         complex_mul(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void cmul_acc_avx2(const Complex* a, const Complex* b, Complex* out, std::size_t n) {
    auto* pa = reinterpret_cast<const double*>(a);
    auto* pb = reinterpret_cast<const double*>(b);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d prod =
            complex_mul(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
        _mm256_storeu_pd(po + 2 * i, _mm256_add_pd(_mm256_loadu_pd(po + 2 * i), prod));
    }
    for (; i < n; ++i) out[i] += a[i] * b[i];
}

void rcmul_avx2(const double* w, const Complex* x, Complex* out, std::size_t n) {
    auto* px = reinterpret_cast<const double*>(x);
    auto* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        // [w0 w0 w1 w1]
        const __m128d w2 = _mm_loadu_pd(w + i);
        const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
        _mm256_storeu_pd(po + 2 * i, _mm256_mul_pd(ww, _mm256_loadu_pd(px + 2 * i)));
    }
    for (; i < n; ++i) out[i] = Complex(w[i] * x[i].real(), w[i] * x[i].imag());
}

double weighted_power_avx2(const double* w, const Complex* x, std::size_t n) {
    auto* px = reinterpret_cast<const double*>(x);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m128d w2 = _mm_loadu_pd(w + i);
        const __m256d ww = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
        const __m256d v = _mm256_loadu_pd(px + 2 * i);
        acc = _mm256_fmadd_pd(ww, _mm256_mul_pd(v, v), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * std::norm(x[i]);
    return s;
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void damping_avx2(const double* a, const double* v, const double* b, const double* d,
                  double* out, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d bd = _mm256_mul_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(d + i));
        const __m256d s = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(v + i), bd);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(zero, s));
    }
    for (; i < n; ++i) out[i] = -(a[i] * v[i] + b[i] * d[i]);
}

void ipow_avx2(const double* a, int e, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d base = _mm256_loadu_pd(a + i);
        __m256d acc = _mm256_set1_pd(1.0);
        int k = e;
        while (k > 0) {
            if (k & 1) acc = _mm256_mul_pd(acc, base);
            base = _mm256_mul_pd(base, base);
            k >>= 1;
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
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

void axpy_avx2(double alpha, const double* x, const double* y, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) out[i] = alpha * x[i] + y[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot3_avx2(const double* a, const double* b, const double* c, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i] * c[i];
    return s;
}

double max_abs_avx2(const double* a, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    __m256d nan_seen = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i));
        nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(v, v, _CMP_UNORD_Q));
        m = _mm256_max_pd(m, v);
    }
    if (_mm256_movemask_pd(nan_seen) != 0) return std::nan("");
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double r = lanes[0];
    for (int k = 1; k < 4; ++k) r = lanes[k] > r ? lanes[k] : r;
    for (; i < n; ++i) {
        const double v = std::fabs(a[i]);
        if (std::isnan(v)) return v;
        if (v > r) r = v;
    }
    return r;
}

constexpr KernelTable kAvx2{
    Isa::avx2,          "avx2",         cmul_avx2,      cmul_acc_avx2,
    rcmul_avx2,         weighted_power_avx2,
    mul_avx2,           damping_avx2,   ipow_avx2,      axpy_avx2,
    dot_avx2,           dot3_avx2,      max_abs_avx2,
};

}  // namespace

const KernelTable* avx2_compiled_table() noexcept { return &kAvx2; }

#else

const KernelTable* avx2_compiled_table() noexcept { return nullptr; }

#endif

}  // namespace dispersive::kernels
