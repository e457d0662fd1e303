#pragma once

#include "dispersive/field.hpp"
#include "dispersive/grid.hpp"
#include "dispersive/transform.hpp"

#include <complex>
#include <span>
#include <vector>

namespace dispersive {

/// Orders of the model u_t + (-1)^{j+1} d^{2j+1}u + (-1)^m d^{2m}u + ... = 0
/// with nonlinearity (1/(p+1)) d(u^{p+1}).
struct OperatorParams {
    int j = 1;  // dispersion order index
    int m = 1;  // dissipation order index, 1 <= m <= j
    int p = 1;  // nonlinearity power, 1 <= p < 2j
    // Accept p >= 2j. Such runs lie outside the well-posedness hypotheses and
    // nothing about them is validated.
    bool allow_unvalidated_power = false;

    void validate() const;
};

struct CoefficientSet {
    OperatorParams params;
    double tau = 0.0;
    Field lambda0;  // undelayed damping profile
    Field lambda;   // delayed feedback profile
    // Constant part of lambda0 that may be folded into the exponential symbol.
    double lambda0_constant = 0.0;
    bool dissipation_on = true;
    bool nonlinearity_on = true;

    /// Builds and validates a set. lambda0_constant is set to the value of
    /// lambda0 when it is uniform, otherwise to `baseline`.
    static CoefficientSet make(OperatorParams params, double tau, Field lambda0, Field lambda,
                               double baseline = 0.0);

    const Grid& grid() const { return lambda0.grid(); }
    void validate() const;
};

/// a(xi) such that u_t = a(xi) u is the Fourier form of the linear part:
/// a = -(-1)^{j+1}(i xi)^{2j+1} - (-1)^m (i xi)^{2m} = i xi^{2j+1} - xi^{2m}.
/// The dissipative term is dropped when dissipation_on is false. The odd part
/// is zero at the Nyquist index.
std::vector<Complex> linear_symbol(const Grid& grid, const OperatorParams& params,
                                   bool dissipation_on = true);

/// A_{lambda0} u = -(-1)^{j+1} d^{2j+1}u - (-1)^j d^{2j}u - lambda0 u  (m = j form).
Field apply_A_lambda0(const Field& u, const CoefficientSet& coeffs);

/// h(xi) = 1 - a_jj(xi) = 1 + xi^{2j} - i xi^{2j+1}, the symbol of I - A.
std::vector<Complex> resolvent_symbol(const Grid& grid, const OperatorParams& params);

/// Solves (I - A) u = f for the m = j operator. Same representation as f.
Field resolvent_solve(const Field& f, const OperatorParams& params);

/// Smallest even 2-3-5-smooth length >= ceil(n (p+2) / 2).
std::size_t dealiased_length(std::size_t n, int p);

/// -(1/(p+1)) d(u^{p+1})/dx with the power formed on a zero-padded grid.
class Nonlinearity {
public:
    Nonlinearity(GridPtr grid, int p);

    std::size_t padded_size() const noexcept { return padded_.size(); }

    /// u_hat: N spectral amplitudes of u; out: N amplitudes of the result.
    /// Throws DivergenceError if u^{p+1} is not finite.
    void apply_spectral(std::span<const Complex> u_hat, std::span<Complex> out);

private:
    GridPtr grid_;
    int p_;
    SpectralTransform padded_transform_;
    std::vector<Complex> padded_;
    std::vector<double> padded_real_;
    std::vector<double> power_;
    std::vector<Complex> flux_symbol_;
};

Field nonlinearity(const Field& u, const OperatorParams& params);

/// Full tendency u_t for current state u and retarded state `delayed`.
Field rhs(const Field& u, const Field& delayed, const CoefficientSet& coeffs);

}  // namespace dispersive
