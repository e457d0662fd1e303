#include "dispersive/errors.hpp"
#include "dispersive/operator.hpp"
#include "dispersive/spectral.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace dispersive;
using testing_support::max_abs_diff;
using testing_support::random_band_limited;

namespace {

const double kTwoPi = 2.0 * M_PI;

CoefficientSet constant_set(OperatorParams p, GridPtr g, double l0, double l, double tau = 0.0) {
    return CoefficientSet::make(p, tau, Field::constant(g, l0), Field::constant(g, l), l0);
}

std::size_t index_of(const Grid& g, double xi) {
    const auto w = g.wavenumbers();
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (std::fabs(w[k] - xi) < 1e-12) return k;
    }
    FAIL("wavenumber not on grid");
    return 0;
}

// Fourier coefficients of a real field, keyed by integer mode number.
std::map<int, Complex> coefficients(const Field& f) {
    const Field s = to_spectral(f);
    const int n = static_cast<int>(f.size());
    std::map<int, Complex> c;
    for (int k = 0; k < n; ++k) {
        const int mode = k < n / 2 ? k : k - n;
        if (k == n / 2) continue;
        if (std::abs(s.modes()[k]) > 1e-13 * n) c[mode] = s.modes()[k] / static_cast<double>(n);
    }
    return c;
}

std::map<int, Complex> convolve(const std::map<int, Complex>& a, const std::map<int, Complex>& b) {
    std::map<int, Complex> out;
    for (const auto& [ka, va] : a)
        for (const auto& [kb, vb] : b) out[ka + kb] += va * vb;
    return out;
}

}  // namespace

TEST_SUITE("operator") {

TEST_CASE("linear symbol values") {
    auto g = Grid::make(kTwoPi, 16);
    const auto a = linear_symbol(*g, {1, 1, 1});
    CHECK(a[index_of(*g, 1.0)].real() == doctest::Approx(-1.0));
    CHECK(a[index_of(*g, 1.0)].imag() == doctest::Approx(1.0));
    CHECK(a[0] == Complex(0.0, 0.0));
    // j = 2, m = 1 at xi = 2: i 2^5 - 2^2
    const auto b = linear_symbol(*g, {2, 1, 1});
    CHECK(b[index_of(*g, 2.0)].real() == doctest::Approx(-4.0));
    CHECK(b[index_of(*g, 2.0)].imag() == doctest::Approx(32.0));
}

TEST_CASE("symbol structure for all admissible (j, m)") {
    auto g = Grid::make(11.0, 64);
    const auto xi = g->wavenumbers();
    for (int j = 1; j <= 3; ++j) {
        for (int m = 1; m <= j; ++m) {
            CAPTURE(j);
            CAPTURE(m);
            const auto a = linear_symbol(*g, {j, m, 1});
            const auto skew = linear_symbol(*g, {j, m, 1}, false);
            for (std::size_t k = 1; k < 64; ++k) {
                CHECK(a[k].real() == doctest::Approx(-std::pow(xi[k], 2 * m)).epsilon(1e-13));
                CHECK(a[k].real() <= 0.0);
                CHECK(skew[k].real() == 0.0);
                if (k != 32) {
                    CHECK(std::abs(a[64 - k] - std::conj(a[k])) <= 1e-12 * std::abs(a[k]));
                } else {
                    CHECK(a[k].imag() == 0.0);
                }
            }
        }
    }
}

TEST_CASE("A_lambda0 on reference fields") {
    auto g = Grid::make(kTwoPi, 32);
    const auto c = constant_set({1, 1, 1}, g, 0.7, 0.0);
    const Field u = Field::constant(g, 2.0);
    const Field au = apply_A_lambda0(u, c);
    for (double v : au.values()) CHECK(v == doctest::Approx(-1.4));

    const auto z = constant_set({1, 1, 1}, g, 0.0, 0.0);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field expected = Field::sample(g, [](double x) { return std::cos(x) - std::sin(x); });
    const Field direct = apply_A_lambda0(s, z);
    CHECK(max_abs_diff(direct, expected) < 1e-12);

    // Spectral path: multiply by the symbol.
    const auto a = linear_symbol(*g, {1, 1, 1});
    Field spec = to_spectral(s);
    for (std::size_t k = 0; k < 32; ++k) spec.modes()[k] *= a[k];
    CHECK(max_abs_diff(to_physical(spec), direct) < 1e-12);
}

TEST_CASE("A_lambda0 is dissipative for nonnegative damping") {
    std::mt19937_64 rng(21);
    auto g = Grid::make(13.0, 128);
    for (int j = 1; j <= 3; ++j) {
        const Field l0 = Field::sample(g, [](double x) { return 0.5 + 0.4 * std::sin(x); });
        const auto c = CoefficientSet::make({j, j, 1}, 0.0, l0, Field::constant(g, 0.0));
        for (int trial = 0; trial < 20; ++trial) {
            const Field u = random_band_limited(g, rng, 20);
            CHECK(inner(apply_A_lambda0(u, c), u) <= 1e-10 * l2_norm(u) * l2_norm(u));
        }
    }
}

TEST_CASE("dissipativity identity: int (-1)^m d^{2m}u u = ||d^m u||^2") {
    std::mt19937_64 rng(23);
    auto g = Grid::make(10.0, 128);
    for (int m = 1; m <= 3; ++m) {
        for (int trial = 0; trial < 10; ++trial) {
            const Field u = random_band_limited(g, rng, 15);
            const double sign = m % 2 == 0 ? 1.0 : -1.0;
            const double lhs = sign * inner(spectral_derivative(u, 2 * m), u);
            const double dm = l2_norm(spectral_derivative(u, m));
            CHECK(lhs == doctest::Approx(dm * dm).epsilon(1e-10));
        }
    }
}

TEST_CASE("resolvent symbol and solve") {
    auto g = Grid::make(kTwoPi, 32);
    const auto h = resolvent_symbol(*g, {1, 1, 1});
    // With d/dx -> i xi, h = 1 + xi^2 - i xi^3.
    CHECK(h[index_of(*g, 1.0)].real() == doctest::Approx(2.0));
    CHECK(h[index_of(*g, 1.0)].imag() == doctest::Approx(-1.0));
    CHECK(h[index_of(*g, -1.0)].imag() == doctest::Approx(1.0));

    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field us = to_spectral(resolvent_solve(s, {1, 1, 1}));
    const Field fs = to_spectral(s);
    for (double xi : {1.0, -1.0}) {
        const std::size_t k = index_of(*g, xi);
        CHECK(std::abs(us.modes()[k] - fs.modes()[k] / h[k]) < 1e-12 * std::abs(fs.modes()[k]));
    }
    CHECK(sup_norm(resolvent_solve(Field::zeros(g), {1, 1, 1})) == 0.0);
}

TEST_CASE("resolvent round trip and contraction") {
    std::mt19937_64 rng(29);
    // Rounding of u is amplified by xi_max^{2j+1} when A is applied; this grid
    // has xi_max = 2.
    auto g = Grid::make(64.0 * M_PI, 128);
    for (int j = 1; j <= 3; ++j) {
        const auto c = constant_set({j, j, 1}, g, 0.0, 0.0);
        for (int trial = 0; trial < 20; ++trial) {
            const Field f = random_band_limited(g, rng, 30);
            const Field u = resolvent_solve(f, {j, j, 1});
            const Field au = apply_A_lambda0(u, c);
            std::vector<double> r(128);
            for (std::size_t i = 0; i < 128; ++i) r[i] = u.values()[i] - au.values()[i] - f.values()[i];
            CHECK(l2_norm(Field::physical(g, r)) / l2_norm(f) < 1e-12);
            CHECK(l2_norm(u) <= l2_norm(f) * (1.0 + 1e-15));
        }
    }
}

TEST_CASE("dealiased padding length") {
    CHECK(dealiased_length(256, 1) == 384);
    CHECK(dealiased_length(256, 2) >= 512);
    CHECK(dealiased_length(100, 3) >= 250);
    for (std::size_t n : {8u, 64u, 96u, 250u}) {
        for (int p = 1; p <= 5; ++p) {
            const std::size_t m = dealiased_length(n, p);
            CHECK(m % 2 == 0);
            CHECK(2 * m >= n * static_cast<std::size_t>(p + 2));
        }
    }
}

TEST_CASE("nonlinearity reference values") {
    auto g = Grid::make(kTwoPi, 32);
    CHECK(sup_norm(nonlinearity(Field::constant(g, 3.0), {1, 1, 1})) < 1e-12);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field expected = Field::sample(g, [](double x) { return -0.5 * std::sin(2 * x); });
    CHECK(max_abs_diff(nonlinearity(s, {1, 1, 1}), expected) < 1e-12);
}

TEST_CASE("dealiased products equal the exact spectral convolution") {
    std::mt19937_64 rng(31);
    auto g = Grid::make(kTwoPi, 64);
    for (int p = 1; p <= 3; ++p) {
        const Field u = random_band_limited(g, rng, 31);
        const auto c = coefficients(u);
        auto power = c;
        for (int k = 0; k < p; ++k) power = convolve(power, c);
        // -(1/(p+1)) d/dx, truncated to the representable modes.
        const Field got = to_spectral(nonlinearity(u, {2, 1, p}));
        double worst = 0.0, scale = 0.0;
        for (int k = 0; k < 64; ++k) {
            const int mode = k < 32 ? k : k - 64;
            Complex exact = 0.0;
            if (k != 32) {
                auto it = power.find(mode);
                if (it != power.end()) exact = -it->second * Complex(0.0, mode) / static_cast<double>(p + 1);
            }
            const Complex have = got.modes()[k] / 64.0;
            worst = std::max(worst, std::abs(have - exact));
            scale = std::max(scale, std::abs(exact));
        }
        CAPTURE(p);
        CHECK(worst < 1e-10 * scale);
    }
}

TEST_CASE("flux nonlinearity is orthogonal to u") {
    std::mt19937_64 rng(37);
    auto g = Grid::make(20.0, 128);
    for (int p = 1; p <= 3; ++p) {
        for (int trial = 0; trial < 10; ++trial) {
            const Field u = random_band_limited(g, rng, 25);
            const Field n = nonlinearity(u, {2, 1, p});
            CHECK(std::fabs(inner(n, u)) < 1e-10 * l2_norm(n) * l2_norm(u));
        }
    }
}

TEST_CASE("rhs special cases") {
    auto g = Grid::make(kTwoPi, 32);
    auto c = constant_set({1, 1, 1}, g, 0.3, 0.2, 0.1);
    c.nonlinearity_on = false;
    const Field u = Field::constant(g, 2.0);
    const Field r = rhs(u, u, c);
    for (double v : r.values()) CHECK(v == doctest::Approx(-1.0));

    // Pure dispersion: d/dt sin = -d^3 sin = cos.
    auto free = constant_set({1, 1, 1}, g, 0.0, 0.0);
    free.nonlinearity_on = false;
    free.dissipation_on = false;
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field cs = Field::sample(g, [](double x) { return std::cos(x); });
    CHECK(max_abs_diff(rhs(s, s, free), cs) < 1e-12);

    // Against the physical-derivative path for m = j and a variable lambda0.
    std::mt19937_64 rng(41);
    for (int j = 1; j <= 3; ++j) {
        const Field l0 = Field::sample(g, [](double x) { return 1.0 + 0.5 * std::cos(x); });
        auto v = CoefficientSet::make({j, j, 1}, 0.0, l0, Field::constant(g, 0.0));
        v.nonlinearity_on = false;
        const Field w = random_band_limited(g, rng, 10);
        const Field lhs = rhs(w, w, v), ref = apply_A_lambda0(w, v);
        CHECK(max_abs_diff(lhs, ref) < 1e-12 * std::max(1.0, sup_norm(ref)));
    }
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(OperatorParams{1, 1, 1}.validate());
    CHECK_THROWS_AS(OperatorParams({1, 2, 1}).validate(), ConfigError);
    CHECK_THROWS_AS(OperatorParams({1, 0, 1}).validate(), ConfigError);
    CHECK_THROWS_AS(OperatorParams({1, 1, 2}).validate(), ConfigError);
    CHECK_NOTHROW(OperatorParams({1, 1, 2, true}).validate());
    CHECK_NOTHROW(OperatorParams({2, 1, 3}).validate());
    auto g = Grid::make(kTwoPi, 16);
    CHECK_THROWS_AS(constant_set({1, 1, 1}, g, 1.0, 0.2, 0.0), ConfigError);
    CHECK_NOTHROW(constant_set({1, 1, 1}, g, 1.0, 0.2, 0.1));
    CHECK_THROWS_AS(CoefficientSet::make({1, 1, 1}, -1.0, Field::constant(g, 1.0), Field::constant(g, 0.0)),
                    ConfigError);
    auto other = Grid::make(kTwoPi, 32);
    CHECK_THROWS_AS(CoefficientSet::make({1, 1, 1}, 0.0, Field::constant(g, 1.0), Field::constant(other, 0.0)),
                    GridMismatchError);
}

}
