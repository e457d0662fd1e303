#include "dispersive/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace dispersive::kernels {

const KernelTable* avx2_compiled_table() noexcept;

bool cpu_has_avx2_fma() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* avx2_table() noexcept {
    if (!cpu_has_avx2_fma()) return nullptr;
    return avx2_compiled_table();
}

namespace {

const KernelTable& select() noexcept {
    if (const char* env = std::getenv("DISPERSIVE_SIMD")) {
        if (std::string(env) == "scalar") return scalar_table();
    }
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
}

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string("kernel length mismatch in ") + what);
}

}  // namespace

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

void cmul(std::span<const Complex> a, std::span<const Complex> b, std::span<Complex> out) {
    require_same(a.size(), b.size(), "cmul");
    require_same(a.size(), out.size(), "cmul");
    active().cmul(a.data(), b.data(), out.data(), a.size());
}

void cmul_acc(std::span<const Complex> a, std::span<const Complex> b, std::span<Complex> out) {
    require_same(a.size(), b.size(), "cmul_acc");
    require_same(a.size(), out.size(), "cmul_acc");
    active().cmul_acc(a.data(), b.data(), out.data(), a.size());
}

void rcmul(std::span<const double> w, std::span<const Complex> x, std::span<Complex> out) {
    require_same(w.size(), x.size(), "rcmul");
    require_same(w.size(), out.size(), "rcmul");
    active().rcmul(w.data(), x.data(), out.data(), w.size());
}

double weighted_power(std::span<const double> w, std::span<const Complex> x) {
    require_same(w.size(), x.size(), "weighted_power");
    return active().weighted_power(w.data(), x.data(), w.size());
}

void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    require_same(a.size(), b.size(), "mul");
    require_same(a.size(), out.size(), "mul");
    active().mul(a.data(), b.data(), out.data(), a.size());
}

void damping(std::span<const double> a, std::span<const double> v, std::span<const double> b,
             std::span<const double> d, std::span<double> out) {
    require_same(a.size(), v.size(), "damping");
    require_same(a.size(), b.size(), "damping");
    require_same(a.size(), d.size(), "damping");
    require_same(a.size(), out.size(), "damping");
    active().damping(a.data(), v.data(), b.data(), d.data(), out.data(), a.size());
}

void ipow(std::span<const double> a, int e, std::span<double> out) {
    require_same(a.size(), out.size(), "ipow");
    if (e < 1) throw std::invalid_argument("ipow exponent must be >= 1");
    active().ipow(a.data(), e, out.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<const double> y,
          std::span<double> out) {
    require_same(x.size(), y.size(), "axpy");
    require_same(x.size(), out.size(), "axpy");
    active().axpy(alpha, x.data(), y.data(), out.data(), x.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same(a.size(), b.size(), "dot");
    return active().dot(a.data(), b.data(), a.size());
}

double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
    require_same(a.size(), b.size(), "dot3");
    require_same(a.size(), c.size(), "dot3");
    return active().dot3(a.data(), b.data(), c.data(), a.size());
}

double max_abs(std::span<const double> a) { return active().max_abs(a.data(), a.size()); }

}  // namespace dispersive::kernels
