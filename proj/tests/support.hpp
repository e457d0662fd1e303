#pragma once

#include "dispersive/field.hpp"
#include "dispersive/grid.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

using dispersive::Field;
using dispersive::GridPtr;

/// Random real trigonometric polynomial with modes |k| <= kmax.
inline Field random_band_limited(const GridPtr& grid, std::mt19937_64& rng, int kmax) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> a(kmax + 1), b(kmax + 1);
    for (int k = 0; k <= kmax; ++k) {
        a[k] = n(rng);
        b[k] = k == 0 ? 0.0 : n(rng);
    }
    const double w = 2.0 * M_PI / grid->length();
    return Field::sample(grid, [&](double x) {
        double s = 0.0;
        for (int k = 0; k <= kmax; ++k) s += a[k] * std::cos(k * w * x) + b[k] * std::sin(k * w * x);
        return s;
    });
}

/// Random sum of smooth Gaussians well inside the box (boundary-decayed and
/// band-limited to rounding on the grids the tests use).
inline Field random_localized(const GridPtr& grid, std::mt19937_64& rng, int bumps = 3) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), pos(-0.12, 0.12), wid(0.8, 2.0);
    const double centre = grid->x_min() + 0.5 * grid->length();
    std::vector<double> a(bumps), c(bumps), w(bumps);
    for (int k = 0; k < bumps; ++k) {
        a[k] = amp(rng);
        c[k] = centre + pos(rng) * grid->length();
        w[k] = wid(rng);
    }
    return Field::sample(grid, [&](double x) {
        double s = 0.0;
        for (int k = 0; k < bumps; ++k) {
            const double z = (x - c[k]) / w[k];
            s += a[k] * std::exp(-z * z);
        }
        return s;
    });
}

inline double max_abs_diff(const Field& a, const Field& b) {
    const auto x = a.values(), y = b.values();
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    return m;
}

}  // namespace testing_support
