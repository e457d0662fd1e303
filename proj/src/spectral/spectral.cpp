#include "dispersive/spectral.hpp"

#include "dispersive/errors.hpp"
#include "dispersive/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dispersive {

std::vector<Complex> derivative_symbol(const Grid& grid, int order) {
    if (order < 0) throw ConfigError("derivative order must be nonnegative");
    const auto xi = grid.wavenumbers();
    std::vector<Complex> sym(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) {
        Complex p(1.0, 0.0);
        const Complex ixi(0.0, xi[k]);
        for (int r = 0; r < order; ++r) p *= ixi;
        sym[k] = p;
    }
    if (order % 2 == 1) sym[grid.nyquist_index()] = 0.0;
    return sym;
}

Field spectral_derivative(const Field& f, int order) {
    const auto sym = derivative_symbol(f.grid(), order);
    Field spec = f.is_spectral() ? f : to_spectral(f);
    auto modes = spec.modes();
    kernels::cmul(sym, modes, modes);
    return f.is_spectral() ? spec : to_physical(spec);
}

double l2_norm(const Field& f) {
    const auto v = f.values();
    return std::sqrt(kernels::dot(v, v) * f.grid().spacing());
}

double lq_norm(const Field& f, double q) {
    if (!(q >= 1.0)) throw ConfigError("Lebesgue exponent q must be >= 1");
    if (std::isinf(q)) return sup_norm(f);
    const auto v = f.values();
    double s = 0.0;
    for (double x : v) s += std::pow(std::fabs(x), q);
    return std::pow(s * f.grid().spacing(), 1.0 / q);
}

double sup_norm(const Field& f) { return kernels::max_abs(f.values()); }

double sobolev_norm(const Field& f, double s) {
    if (!(s >= 0.0)) throw ConfigError("Sobolev order must be nonnegative");
    const Field spec = f.is_spectral() ? f : to_spectral(f);
    const auto& grid = f.grid();
    const auto xi = grid.wavenumbers();
    std::vector<double> w(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) w[k] = std::pow(1.0 + xi[k] * xi[k], s);
    const double n = static_cast<double>(grid.size());
    return std::sqrt(kernels::weighted_power(w, spec.modes()) * grid.length() / (n * n));
}

double inner(const Field& a, const Field& b) {
    require_same_grid(a, b, "inner");
    return kernels::dot(a.values(), b.values()) * a.grid().spacing();
}

double peak_to_boundary_ratio(const Field& f) {
    const auto v = f.values();
    const double peak = kernels::max_abs(v);
    const double edge = std::max(std::fabs(v.front()), std::fabs(v.back()));
    if (edge == 0.0) return std::numeric_limits<double>::infinity();
    return peak / edge;
}

}  // namespace dispersive
