#include "dispersive/diagnostics.hpp"
#include "dispersive/errors.hpp"
#include "dispersive/run.hpp"
#include "dispersive/spectral.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace dispersive;

namespace {

const double kTwoPi = 2.0 * M_PI;

EnergyTrace synthetic(std::function<double(double)> f, double t_end = 5.0, int n = 51) {
    EnergyTrace tr;
    for (int k = 0; k < n; ++k) {
        TraceSample s;
        s.t = t_end * k / (n - 1);
        s.energy = f(s.t);
        s.lyapunov = s.energy;
        tr.samples.push_back(s);
    }
    return tr;
}

SimState linear_sine(double dt, double l0) {
    auto g = Grid::make(kTwoPi, 32);
    auto c = CoefficientSet::make({1, 1, 1}, 0.0, Field::constant(g, l0), Field::constant(g, 0.0), l0);
    c.nonlinearity_on = false;
    return SimState(c, DelayHistory::init([](double x, double) { return std::sin(x); }, g, 0.0, 0, dt),
                    {Scheme::etdrk4, dt, true});
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("energy of reference fields") {
    auto g = Grid::make(kTwoPi, 64);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    CHECK(energy(s) == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK(energy(Field::zeros(g)) == 0.0);
    Field s3 = s;
    s3 *= 3.0;
    CHECK(energy(s3) == doctest::Approx(9.0 * energy(s)).epsilon(1e-14));
}

TEST_CASE("Lyapunov functional reductions and closed form") {
    auto g = Grid::make(20.0, 64, -10.0);
    auto prof = [](double x, double) { return std::exp(-x * x); };
    const Field gf = Field::sample(g, [](double x) { return std::exp(-x * x); });
    {
        auto c = CoefficientSet::make({1, 1, 1}, 0.1, Field::constant(g, 1.0), Field::constant(g, 0.0), 1.0);
        SimState s(c, DelayHistory::init(prof, g, 0.1, 10), {});
        CHECK(lyapunov(s) == energy(s.u()));
    }
    {
        auto c = CoefficientSet::make({1, 1, 1}, 0.0, Field::constant(g, 1.0), Field::constant(g, 0.0), 1.0);
        SimState s(c, DelayHistory::init(prof, g, 0.0, 0, 0.01), {Scheme::etdrk4, 0.01});
        CHECK(lyapunov(s) == energy(s.u()));
    }
    const double lam = 0.4, tau = 0.1;
    const double g2 = l2_norm(gf) * l2_norm(gf);
    const double exact = energy(gf) + 0.5 * lam * g2 * (1.0 - std::exp(-tau));
    double prev = 0.0;
    for (std::size_t n : {5u, 10u, 20u}) {
        auto c = CoefficientSet::make({1, 1, 1}, tau, Field::constant(g, 1.0), Field::constant(g, lam), 1.0);
        SimState s(c, DelayHistory::init(prof, g, tau, n), {});
        const double err = std::fabs(lyapunov(s) - exact);
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.02));
        prev = err;
    }
}

TEST_CASE("cumulative quadrature orders and breakpoints") {
    std::vector<double> t, cubic, kinked;
    for (int k = 0; k <= 20; ++k) {
        const double x = 0.05 * k;
        t.push_back(x);
        cubic.push_back(1.0 - 2.0 * x + 3.0 * x * x - 4.0 * x * x * x);
        kinked.push_back(x * x + (x > 0.5 ? std::pow(x - 0.5, 1.0) : 0.0));
    }
    const auto c = cumulative_integral(t, cubic, TimeQuadrature::cubic);
    CHECK(c.back() == doctest::Approx(1.0 - 1.0 + 1.0 - 1.0).epsilon(1e-14));
    CHECK(std::fabs(c.back()) < 1e-14);
    const std::vector<double> lin(t.size(), 0.0);
    CHECK(cumulative_integral(t, lin, TimeQuadrature::trapezoid).back() == 0.0);

    // x^2 + (x - 1/2)_+ integrates to 1/3 + 1/8.
    const double exact = 1.0 / 3.0 + 0.125;
    const double bp[] = {0.5};
    const double with = cumulative_integral(t, kinked, TimeQuadrature::cubic, bp).back();
    const double without = cumulative_integral(t, kinked, TimeQuadrature::cubic).back();
    CHECK(std::fabs(with - exact) < 1e-14);
    CHECK(std::fabs(without - exact) > 1e-6);
    CHECK_THROWS_AS(cumulative_integral(t, std::vector<double>(3), TimeQuadrature::cubic), ConfigError);
}

TEST_CASE("balance residual: zero field and linear runs") {
    auto g = Grid::make(20.0, 64, -10.0);
    auto c = CoefficientSet::make({1, 1, 1}, 0.1, Field::constant(g, 1.0), Field::constant(g, 0.3), 1.0);
    SimState zero(c, DelayHistory::init([](double, double) { return 0.0; }, g, 0.1, 10), {});
    RunResult rz = run(zero, {1.0, 1, {}});
    for (const auto& s : rz.trace.samples) CHECK(s.residual == 0.0);

    SimState a = linear_sine(0.005, 0.5);
    RunResult ra = run(a, {1.0, 1, {}});
    const double e0 = ra.trace.samples.front().energy;
    CHECK(std::fabs(ra.trace.samples.back().residual) / e0 < 1e-8);

    SimState b = linear_sine(1e-4, 0.5);
    RunResult rb = run(b, {1.0, 1, {}, TimeQuadrature::trapezoid});
    CHECK(std::fabs(rb.trace.samples.back().residual) / e0 < 1e-8);
}

TEST_CASE("balance residual converges at fourth order on a delayed nonlinear run") {
    auto make = [](std::size_t n_tau) {
        auto g = Grid::make(40.0, 128, -20.0);
        const Field l0 = Field::sample(g, [](double x) { return 0.5 + 0.3 * std::exp(-x * x / 4.0); });
        const Field l = Field::sample(g, [](double x) { return 0.3 * std::exp(-x * x / 9.0); });
        auto c = CoefficientSet::make({1, 1, 1}, 0.1, l0, l, 0.5);
        auto h = DelayHistory::init([](double x, double s) { return std::exp(-x * x / 2.0) * (1.0 + 0.5 * s); },
                                    g, 0.1, n_tau);
        SimState s(c, std::move(h), {});
        RunResult r = run(s, {1.0, 1, {}});
        return std::fabs(r.trace.samples.back().residual / r.trace.samples.front().energy);
    };
    const double coarse = make(10), fine = make(20);
    CHECK(coarse / fine >= 8.0);
}

TEST_CASE("trace invariants on a delayed run") {
    auto g = Grid::make(40.0, 128, -20.0);
    auto c = CoefficientSet::make({1, 1, 1}, 0.2, Field::constant(g, 0.6),
                                  Field::sample(g, [](double x) { return -0.4 * std::exp(-x * x); }), 0.6);
    SimState s(c, DelayHistory::init([](double x, double) { return std::exp(-x * x / 3.0); }, g, 0.2, 20), {});
    RunResult r = run(s, {2.0, 3, {0.0, 1.0, 3.0}});
    REQUIRE(!r.diverged);
    for (std::size_t k = 0; k < r.trace.samples.size(); ++k) {
        const auto& x = r.trace.samples[k];
        CHECK(x.energy >= 0.0);
        CHECK(x.lyapunov >= x.energy);
        if (k) CHECK(x.t > r.trace.samples[k - 1].t);
    }
}

TEST_CASE("linear constant damping contracts at rate 2 gamma0") {
    SimState s = linear_sine(0.01, 0.5);
    RunResult r = run(s, {3.0, 1, {}});
    const double e0 = r.trace.samples.front().energy;
    for (const auto& x : r.trace.samples) CHECK(x.energy <= e0 * std::exp(-x.t) * (1.0 + 1e-10));
}

TEST_CASE("log-linear decay fits") {
    const DecayFit f = fit_decay_rate(synthetic([](double t) { return 3.0 * std::exp(-0.6 * t); }), 1.0, 5.0,
                                      Functional::energy);
    CHECK(f.rate == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.samples == 41);
    const DecayFit flat = fit_decay_rate(synthetic([](double) { return 2.0; }), 0.0, 5.0, Functional::energy);
    CHECK(flat.rate == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    const DecayFit mix = fit_decay_rate(
        synthetic([](double t) { return std::exp(-0.2 * t) + 50.0 * std::exp(-3.0 * t); }), 0.0, 5.0,
        Functional::lyapunov);
    CHECK(mix.r_squared < 0.99);
    CHECK_THROWS_AS(fit_decay_rate(synthetic([](double t) { return t - 1.0; }), 0.0, 5.0, Functional::energy),
                    FitError);
    CHECK_THROWS_AS(fit_decay_rate(synthetic([](double) { return 1.0; }), 6.0, 7.0, Functional::energy), FitError);
    CHECK_THROWS_AS(fit_decay_rate(synthetic([](double) { return 1.0; }), 0.0, 5.0, Functional::sobolev, 0),
                    FitError);
}

TEST_CASE("interpolation inequality on reference and random fields") {
    auto g = Grid::make(40.0, 512, -20.0);
    const Field gauss = Field::sample(g, [](double x) { return std::exp(-x * x); });
    CHECK(check_interpolation_inequality(gauss) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-10));
    Field scaled = gauss;
    scaled *= -7.5;
    CHECK(check_interpolation_inequality(scaled) == doctest::Approx(check_interpolation_inequality(gauss)).epsilon(1e-13));
    CHECK_THROWS_AS(check_interpolation_inequality(Field::zeros(g)), ConfigError);
    CHECK_THROWS_AS(check_interpolation_inequality(Field::constant(g, 1.0)), ConfigError);
    std::mt19937_64 rng(43);
    for (int k = 0; k < 50; ++k) {
        CHECK(check_interpolation_inequality(testing_support::random_localized(g, rng)) <= 1.0 + 1e-9);
    }
}

TEST_CASE("Gagliardo-Nirenberg ratio") {
    auto g = Grid::make(kTwoPi, 64);
    for (int xi : {1, 3, 7}) {
        const Field mode = Field::sample(g, [&](double x) { return std::cos(xi * x + 0.3); });
        for (int j = 1; j <= 3; ++j) {
            for (int m = 1; m <= j; ++m) CHECK(std::fabs(gn_ratio(mode, m, j) - 1.0) < 1e-12);
        }
    }
    auto box = Grid::make(40.0, 256, -20.0);
    const Field gauss = Field::sample(box, [](double x) { return std::exp(-x * x); });
    CHECK(check_gn_ratio(gauss, 2, 2) == 1.0);
    CHECK(check_gn_ratio(gauss, 1, 3) <= 1.0);
    CHECK_THROWS_AS(check_gn_ratio(gauss, 3, 2), ConfigError);
    CHECK_THROWS_AS(check_gn_ratio(Field::sample(g, [](double x) { return std::sin(x); }), 1, 2), ConfigError);
}

TEST_CASE("trace CSV layout") {
    EnergyTrace tr;
    tr.sobolev_orders = {0.0, 2.5};
    TraceSample s;
    s.t = 0.1;
    s.energy = 1.0 / 3.0;
    s.lyapunov = 0.5;
    s.sobolev = {1.0, 2.0};
    tr.samples.push_back(s);
    std::ostringstream out;
    const std::string comments[] = {"grid.N = 8"};
    write_trace_csv(out, tr, comments);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# grid.N = 8");
    std::getline(in, line);
    CHECK(line == "t,E,scriptE,diss,damp,delay,residual,Hs_0,Hs_2.5");
    std::getline(in, line);
    CHECK(line == "0.10000000000000001,0.33333333333333331,0.5,0,0,0,0,1,2");
    CHECK(!std::getline(in, line));
}

}
