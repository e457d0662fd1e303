#include "dispersive/operator.hpp"

#include "dispersive/errors.hpp"
#include "dispersive/kernels.hpp"
#include "dispersive/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>

namespace dispersive {

void OperatorParams::validate() const {
    if (j < 1) throw ConfigError("dispersion index j must be >= 1");
    if (m < 1 || m > j) throw ConfigError("dissipation index m must satisfy 1 <= m <= j");
    if (p < 1 || (p >= 2 * j && !allow_unvalidated_power)) throw ConfigError("nonlinearity power p must satisfy 1 <= p < 2j");
}

CoefficientSet CoefficientSet::make(OperatorParams params, double tau, Field lambda0,
                                    Field lambda, double baseline) {
    CoefficientSet c;
    c.params = params;
    c.tau = tau;
    c.lambda0 = std::move(lambda0);
    c.lambda = std::move(lambda);
    c.validate();
    const auto v = c.lambda0.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    c.lambda0_constant = (*lo == *hi) ? *lo : baseline;
    return c;
}

void CoefficientSet::validate() const {
    params.validate();
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("delay tau must be >= 0");
    if (!lambda0.grid_ptr() || !lambda.grid_ptr()) {
        throw ConfigError("coefficient profiles must be sampled on a grid");
    }
    require_same_grid(lambda0, lambda, "coefficient set");
    if (!lambda0.is_physical() || !lambda.is_physical()) {
        throw RepresentationError("coefficient profiles are stored physically");
    }
    if (!lambda0.all_finite() || !lambda.all_finite()) {
        throw ConfigError("coefficient profiles must be bounded");
    }
    if (tau == 0.0 && kernels::max_abs(lambda.values()) != 0.0) {
        throw ConfigError("tau = 0 requires the delay feedback lambda to vanish");
    }
}

std::vector<Complex> linear_symbol(const Grid& grid, const OperatorParams& params,
                                   bool dissipation_on) {
    params.validate();
    const auto odd = derivative_symbol(grid, 2 * params.j + 1);
    const auto even = derivative_symbol(grid, 2 * params.m);
    const double odd_sign = (params.j + 1) % 2 == 0 ? 1.0 : -1.0;
    const double even_sign = params.m % 2 == 0 ? 1.0 : -1.0;
    std::vector<Complex> a(odd.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = -odd_sign * odd[k];
        if (dissipation_on) a[k] -= even_sign * even[k];
    }
    return a;
}

Field apply_A_lambda0(const Field& u, const CoefficientSet& coeffs) {
    require_same_grid(u, coeffs.lambda0, "apply_A_lambda0");
    if (!u.is_physical()) throw RepresentationError("apply_A_lambda0 expects a physical field");
    const int j = coeffs.params.j;
    const Field odd = spectral_derivative(u, 2 * j + 1);
    const Field even = spectral_derivative(u, 2 * j);
    const double odd_sign = (j + 1) % 2 == 0 ? 1.0 : -1.0;
    const double even_sign = j % 2 == 0 ? 1.0 : -1.0;
    Field out = Field::zeros(u.grid_ptr());
    auto o = out.values();
    const auto uo = odd.values();
    const auto ue = even.values();
    const auto uu = u.values();
    const auto l0 = coeffs.lambda0.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = -odd_sign * uo[i] - even_sign * ue[i] - l0[i] * uu[i];
    }
    return out;
}

std::vector<Complex> resolvent_symbol(const Grid& grid, const OperatorParams& params) {
    OperatorParams jj = params;
    jj.m = jj.j;
    jj.p = 1;
    auto h = linear_symbol(grid, jj, true);
    for (Complex& z : h) z = 1.0 - z;
    return h;
}

Field resolvent_solve(const Field& f, const OperatorParams& params) {
    const auto h = resolvent_symbol(f.grid(), params);
    Field spec = f.is_spectral() ? f : to_spectral(f);
    auto modes = spec.modes();
    for (std::size_t k = 0; k < modes.size(); ++k) modes[k] /= h[k];
    return f.is_spectral() ? spec : to_physical(spec);
}

std::size_t dealiased_length(std::size_t n, int p) {
    const std::size_t target = (n * static_cast<std::size_t>(p + 2) + 1) / 2;
    auto smooth = [](std::size_t m) {
        for (std::size_t f : {2u, 3u, 5u}) {
            while (m % f == 0) m /= f;
        }
        return m == 1;
    };
    std::size_t m = target + (target % 2);
    while (!smooth(m)) m += 2;
    return m;
}

Nonlinearity::Nonlinearity(GridPtr grid, int p)
    : grid_(std::move(grid)),
      p_(p),
      padded_transform_(dealiased_length(grid_->size(), p)),
      padded_(padded_transform_.size()),
      padded_real_(padded_transform_.size()),
      power_(padded_transform_.size()),
      flux_symbol_(derivative_symbol(*grid_, 1)) {
    if (p < 1) throw ConfigError("nonlinearity power must be >= 1");
    const double c = -1.0 / static_cast<double>(p + 1);
    for (Complex& z : flux_symbol_) z *= c;
}

void Nonlinearity::apply_spectral(std::span<const Complex> u_hat, std::span<Complex> out) {
    const std::size_t n = grid_->size();
    const std::size_t m = padded_.size();
    const std::size_t half = n / 2;
    if (u_hat.size() != n || out.size() != n) throw GridMismatchError("nonlinearity size");

    // Pad: positive modes at [0, N/2), negative at [M - N/2 + 1, M); the Nyquist
    // amplitude is split evenly between +N/2 and -N/2 so the padded field is real.
    const double up = static_cast<double>(m) / static_cast<double>(n);
    std::fill(padded_.begin(), padded_.end(), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < half; ++k) padded_[k] = u_hat[k] * up;
    for (std::size_t k = half + 1; k < n; ++k) padded_[m - n + k] = u_hat[k] * up;
    padded_[half] = 0.5 * up * u_hat[half];
    padded_[m - half] = 0.5 * up * u_hat[half];

    padded_transform_.inverse(padded_, padded_real_);
    kernels::ipow(padded_real_, p_ + 1, power_);
    if (!std::isfinite(kernels::max_abs(power_))) {
        throw DivergenceError("u^(p+1) overflowed in the nonlinear term");
    }
    padded_transform_.forward(power_, padded_);

    const double down = static_cast<double>(n) / static_cast<double>(m);
    for (std::size_t k = 0; k < half; ++k) out[k] = padded_[k] * down;
    for (std::size_t k = half + 1; k < n; ++k) out[k] = padded_[m - n + k] * down;
    out[half] = (padded_[half] + padded_[m - half]) * down;
    kernels::cmul(flux_symbol_, out, out);
}

Field nonlinearity(const Field& u, const OperatorParams& params) {
    if (!u.is_physical()) throw RepresentationError("nonlinearity expects a physical field");
    params.validate();
    Nonlinearity op(u.grid_ptr(), params.p);
    const Field spec = to_spectral(u);
    std::vector<Complex> out(u.size());
    op.apply_spectral(spec.modes(), out);
    return to_physical(Field::spectral(u.grid_ptr(), std::move(out)));
}

Field rhs(const Field& u, const Field& delayed, const CoefficientSet& coeffs) {
    require_same_grid(u, delayed, "rhs");
    require_same_grid(u, coeffs.lambda0, "rhs");
    if (!u.is_physical() || !delayed.is_physical()) {
        throw RepresentationError("rhs expects physical fields");
    }
    const auto a = linear_symbol(u.grid(), coeffs.params, coeffs.dissipation_on);
    Field spec = to_spectral(u);
    std::vector<Complex> tendency(u.size());
    kernels::cmul(a, spec.modes(), tendency);
    if (coeffs.nonlinearity_on) {
        Nonlinearity op(u.grid_ptr(), coeffs.params.p);
        std::vector<Complex> nl(u.size());
        op.apply_spectral(spec.modes(), nl);
        for (std::size_t k = 0; k < nl.size(); ++k) tendency[k] += nl[k];
    }
    Field out = to_physical(Field::spectral(u.grid_ptr(), std::move(tendency)));
    std::vector<double> damp(u.size());
    kernels::damping(coeffs.lambda0.values(), u.values(), coeffs.lambda.values(), delayed.values(),
                     damp);
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += damp[i];
    return out;
}

}  // namespace dispersive
