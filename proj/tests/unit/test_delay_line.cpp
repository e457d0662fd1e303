#include "dispersive/delay_line.hpp"
#include "dispersive/errors.hpp"
#include "dispersive/spectral.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace dispersive;
using testing_support::max_abs_diff;

namespace {

double g_profile(double x) { return std::exp(-x * x); }

GridPtr box() { return Grid::make(20.0, 64, -10.0); }

}  // namespace

TEST_SUITE("delay_line") {

TEST_CASE("constant history fills every slot") {
    auto g = box();
    auto h = DelayHistory::init([](double x, double) { return g_profile(x); }, g, 0.1, 5);
    REQUIRE(h.slot_count() == 6);
    const Field ref = Field::sample(g, g_profile);
    for (std::size_t k = 0; k < 6; ++k) CHECK(max_abs_diff(h.slot(k), ref) == 0.0);
    CHECK(max_abs_diff(h.delayed_state(), ref) == 0.0);
    CHECK(h.newest_time() == 0.0);
    CHECK(h.oldest_time() == doctest::Approx(-0.1).epsilon(1e-15));
}

TEST_CASE("exponential-in-time history slots") {
    auto g = box();
    auto h = DelayHistory::init([](double x, double s) { return std::exp(s) * g_profile(x); }, g, 0.1, 4);
    for (std::size_t k = 0; k <= 4; ++k) {
        const double factor = std::exp(-0.1 + 0.025 * static_cast<double>(k));
        const Field ref = Field::sample(g, [&](double x) { return factor * g_profile(x); });
        CHECK(max_abs_diff(h.slot(k), ref) < 1e-15);
    }
}

TEST_CASE("zero delay keeps a single slot") {
    auto g = box();
    auto h = DelayHistory::init([](double x, double) { return g_profile(x); }, g, 0.0, 0, 0.01);
    CHECK(h.slot_count() == 1);
    const Field next = Field::constant(g, 3.0);
    h.push(next, 0.01);
    CHECK(max_abs_diff(h.delayed_state(), next) == 0.0);
    CHECK(max_abs_diff(h.newest(), next) == 0.0);
}

TEST_CASE("FIFO order and complete refresh") {
    auto g = box();
    const std::size_t n_tau = 4;
    auto h = DelayHistory::init([](double x, double) { return g_profile(x); }, g, 0.2, n_tau);
    const double dt = h.dt();
    for (std::size_t k = 1; k <= n_tau; ++k) {
        h.push(Field::constant(g, static_cast<double>(k)), static_cast<double>(k) * dt);
    }
    // After n_tau pushes the oldest slot is the initial state at s = 0.
    CHECK(max_abs_diff(h.delayed_state(), Field::sample(g, g_profile)) == 0.0);
    h.push(Field::constant(g, 5.0), 5 * dt);
    CHECK(h.delayed_state().values()[0] == 1.0);
    for (std::size_t k = 0; k <= n_tau; ++k) CHECK(h.slot(k).values()[3] == static_cast<double>(k + 1));
}

TEST_CASE("push rejects misaligned times and foreign grids") {
    auto g = box();
    auto h = DelayHistory::init([](double, double) { return 0.0; }, g, 0.1, 10);
    CHECK_THROWS_AS(h.push(Field::zeros(g), 0.02), HistoryError);
    CHECK_NOTHROW(h.push(Field::zeros(g), 0.01));
    CHECK_THROWS_AS(h.push(Field::zeros(Grid::make(20.0, 32, -10.0)), 0.02), GridMismatchError);
}

TEST_CASE("configuration errors") {
    auto g = box();
    CHECK_THROWS_AS(DelayHistory::init([](double, double) { return 0.0; }, g, 0.1, 0), ConfigError);
    CHECK_THROWS_AS(DelayHistory::init([](double, double) { return 0.0; }, g, -0.1, 4), ConfigError);
    CHECK_THROWS_AS(DelayHistory::from_slots(g, 0.1, 4, std::vector<Field>(3, Field::zeros(g))), ConfigError);
    DelayHistory empty;
    CHECK_THROWS_AS((void)empty.delayed_state(), HistoryError);
}

TEST_CASE("timestamps do not drift over 1e5 pushes") {
    auto g = Grid::make(1.0, 8);
    const double tau = 0.1;
    auto h = DelayHistory::init([](double, double) { return 0.0; }, g, tau, 7);
    const double dt = h.dt();
    const Field f = Field::zeros(g);
    for (int k = 1; k <= 100000; ++k) h.push(f, static_cast<double>(k) * dt);
    const double t = 100000 * dt;
    CHECK(h.newest_time() == t);
    CHECK(std::fabs(h.oldest_time() - (t - tau)) <= 4e-16 * t);
    for (std::size_t k = 1; k < h.slot_count(); ++k) {
        CHECK(h.timestamp(k) - h.timestamp(k - 1) == doctest::Approx(dt).epsilon(1e-9));
    }
}

TEST_CASE("memory integral special cases and closed form") {
    auto g = box();
    const double tau = 0.1;
    const Field gf = Field::sample(g, g_profile);
    const double g2 = l2_norm(gf) * l2_norm(gf);
    auto hist = [&](std::size_t n) {
        return DelayHistory::init([](double x, double) { return g_profile(x); }, g, tau, n);
    };
    CHECK(memory_integral(hist(10), Field::zeros(g), 0.0) == 0.0);
    auto h0 = DelayHistory::init([](double x, double) { return g_profile(x); }, g, 0.0, 0, 0.01);
    CHECK(memory_integral(h0, Field::constant(g, 1.0), 0.0) == 0.0);

    const double c = 0.3;
    const double exact = c * g2 * (1.0 - std::exp(-tau));
    double prev_err = 0.0;
    for (std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
        const double err = std::fabs(memory_integral(hist(n), Field::constant(g, c), 0.0) - exact);
        if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.01));
        prev_err = err;
    }
    // Sign of lambda does not matter and the bound tau |lambda|_inf max ||u||^2 holds.
    const double neg = memory_integral(hist(10), Field::constant(g, -c), 0.0);
    CHECK(neg == doctest::Approx(memory_integral(hist(10), Field::constant(g, c), 0.0)));
    CHECK(neg >= 0.0);
    CHECK(neg <= tau * c * g2);
}

TEST_CASE("snapshot round trip") {
    auto g = box();
    auto h = DelayHistory::init([](double x, double s) { return (1.0 + s) * g_profile(x); }, g, 0.1, 6);
    for (int k = 1; k <= 9; ++k) h.push(Field::constant(g, 0.1 * k), k * h.dt());
    std::stringstream buffer;
    h.write_snapshot(buffer);
    const DelayHistory back = DelayHistory::read_snapshot(buffer, g);
    REQUIRE(back.slot_count() == h.slot_count());
    CHECK(back.newest_time() == h.newest_time());
    for (std::size_t k = 0; k < h.slot_count(); ++k) {
        CHECK(back.timestamp(k) == h.timestamp(k));
        CHECK(max_abs_diff(back.slot(k), h.slot(k)) == 0.0);
    }
    std::stringstream again;
    h.write_snapshot(again);
    const DelayHistory rebuilt = DelayHistory::read_snapshot(again);
    CHECK(rebuilt.grid().same_as(*g));

    std::stringstream junk("not a snapshot");
    CHECK_THROWS_AS(DelayHistory::read_snapshot(junk, g), HistoryError);
}

}
