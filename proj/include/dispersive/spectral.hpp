#pragma once

#include "dispersive/field.hpp"
#include "dispersive/grid.hpp"
#include "dispersive/transform.hpp"

#include <vector>

namespace dispersive {

/// (i xi)^order per mode, with the Nyquist entry zeroed for odd order.
std::vector<Complex> derivative_symbol(const Grid& grid, int order);

/// d^order f / dx^order; result has the same representation as f.
Field spectral_derivative(const Field& f, int order);

// Rectangle-rule norms over one period. Physical representation required.
double l2_norm(const Field& f);
double lq_norm(const Field& f, double q);
double sup_norm(const Field& f);

/// (sum_k (1+xi_k^2)^s |f_k|^2 * L/N^2)^{1/2}; s = 0 reproduces l2_norm.
double sobolev_norm(const Field& f, double s);

/// Inner product (rectangle rule) of two physical fields.
double inner(const Field& a, const Field& b);

/// max(|f|) / max(|f(x_first)|, |f(x_last)|); infinity if the boundary is 0.
double peak_to_boundary_ratio(const Field& f);

}  // namespace dispersive
