#include "dispersive/errors.hpp"
#include "dispersive/integrator.hpp"
#include "dispersive/kernels.hpp"
#include "dispersive/spectral.hpp"
#include "dispersive/transform.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>

namespace dispersive {

struct SimState::Workspace {
    explicit Workspace(const GridPtr& grid, int p)
        : transform(grid->size()),
          nonlinear(grid, p),
          n(grid->size()),
          u_hat(n),
          a_hat(n),
          b_hat(n),
          c_hat(n),
          n_u(n),
          n_a(n),
          n_b(n),
          n_c(n),
          tmp(n),
          stage_phys(n),
          forcing_phys(n),
          forcing_hat(n) {}

    SpectralTransform transform;
    Nonlinearity nonlinear;
    std::size_t n;
    std::vector<Complex> u_hat, a_hat, b_hat, c_hat;
    std::vector<Complex> n_u, n_a, n_b, n_c;
    std::vector<Complex> tmp;
    std::vector<double> stage_phys, forcing_phys;
    std::vector<Complex> forcing_hat;
    std::optional<Field> delayed_mid;
};

SimState::SimState(CoefficientSet coeffs, DelayHistory history, StepperOptions options)
    : coeffs_(std::move(coeffs)), history_(std::move(history)), options_(options) {
    coeffs_.validate();
    if (!history_.initialized()) throw HistoryError("simulation requires an initialized history");
    if (!history_.grid().same_as(coeffs_.grid())) {
        throw GridMismatchError("history and coefficients live on different grids");
    }
    if (std::fabs(history_.tau() - coeffs_.tau) > 1e-15 * std::max(1.0, coeffs_.tau)) {
        throw ConfigError("history tau differs from coefficient tau");
    }
    if (coeffs_.tau > 0.0) {
        const double aligned = history_.dt();
        if (options_.dt != 0.0 && std::fabs(options_.dt - aligned) > 1e-12 * aligned) {
            throw ConfigError("dt must equal tau / n_tau when tau > 0");
        }
        options_.dt = aligned;
    } else if (!(options_.dt > 0.0)) {
        throw ConfigError("a positive dt is required when tau = 0");
    } else if (history_.dt() != options_.dt) {
        throw ConfigError("delay-free history must be built with the simulation dt");
    }
    rebuild();
}

SimState::~SimState() = default;
SimState::SimState(SimState&&) noexcept = default;
SimState& SimState::operator=(SimState&&) noexcept = default;

void SimState::rebuild() {
    symbol_ = linear_symbol(coeffs_.grid(), coeffs_.params, coeffs_.dissipation_on);
    const double folded = options_.fold_constant_damping ? coeffs_.lambda0_constant : 0.0;
    for (Complex& a : symbol_) a -= folded;
    tables_ = etd_coefficients(symbol_, options_.dt);

    const auto l0 = coeffs_.lambda0.values();
    lambda0_explicit_.resize(l0.size());
    for (std::size_t i = 0; i < l0.size(); ++i) lambda0_explicit_[i] = l0[i] - folded;
    damping_active_ = kernels::max_abs(lambda0_explicit_) != 0.0 ||
                      kernels::max_abs(coeffs_.lambda.values()) != 0.0;

    if (!work_) work_ = std::make_unique<Workspace>(coeffs_.lambda0.grid_ptr(), coeffs_.params.p);
    work_->transform.forward(u().values(), work_->u_hat);
}

void SimState::set_linear_mode(LinearModeFlags flags) {
    coeffs_.nonlinearity_on = flags.nonlinearity_on;
    coeffs_.dissipation_on = flags.dissipation_on;
    rebuild();
}

// out = nonlinearity(v) - (lambda0 - folded) v - lambda d, in spectral space.
// `delayed == nullptr` means tau = 0, where the retarded state is v itself.
void SimState::explicit_term(std::span<const Complex> v_hat, const Field* delayed,
                             std::span<Complex> out) {
    Workspace& w = *work_;
    if (coeffs_.nonlinearity_on) {
        w.nonlinear.apply_spectral(v_hat, out);
    } else {
        std::fill(out.begin(), out.end(), Complex(0.0, 0.0));
    }
    if (!damping_active_) return;
    w.transform.inverse(v_hat, w.stage_phys);
    const std::span<const double> d =
        delayed ? delayed->values() : std::span<const double>(w.stage_phys);
    kernels::damping(lambda0_explicit_, w.stage_phys, coeffs_.lambda.values(), d, w.forcing_phys);
    w.transform.forward(w.forcing_phys, w.forcing_hat);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w.forcing_hat[k];
}

namespace {

// Lagrange weights at x = 1/2 for integer nodes first..first+count-1.
std::vector<double> midpoint_weights(int first, int count) {
    std::vector<double> w(count);
    for (int p = 0; p < count; ++p) {
        double l = 1.0;
        for (int q = 0; q < count; ++q) {
            if (q != p) l *= (0.5 - (first + q)) / static_cast<double>(p - q);
        }
        w[p] = l;
    }
    return w;
}

}  // namespace

// Retarded state at t + dt/2 - tau. Node r (relative to the oldest slot) is
// available for -tail <= r <= n_tau. Breakpoints sit at absolute step indices
// k n_tau (k = 0..3), where the solution's derivatives jump; a stencil may
// touch one at its ends but never contain one in its interior.
void SimState::build_mid_delay() {
    Workspace& w = *work_;
    const int n_tau = static_cast<int>(history_.n_tau());
    const int lo = -static_cast<int>(tail_.size());
    const int hi = n_tau;
    const long long oldest_abs = static_cast<long long>(step_index_) - n_tau;
    auto straddles = [&](int first, int count) {
        for (int k = 0; k <= 3; ++k) {
            const long long b = static_cast<long long>(k) * n_tau - oldest_abs;
            if (b > first && b < first + count - 1) return true;
        }
        return false;
    };
    int first = 0, count = 0;
    static constexpr int kCandidates[][2] = {{-1, 4}, {0, 4}, {-2, 4}, {-1, 3}, {0, 3}, {0, 2}};
    for (const auto& c : kCandidates) {
        if (c[0] < lo || c[0] + c[1] - 1 > hi) continue;
        if (c[1] > 2 && straddles(c[0], c[1])) continue;
        first = c[0];
        count = c[1];
        break;
    }
    const auto weights = midpoint_weights(first, count);
    if (!w.delayed_mid) w.delayed_mid = Field::zeros(coeffs_.lambda0.grid_ptr());
    auto mid = w.delayed_mid->values();
    std::fill(mid.begin(), mid.end(), 0.0);
    for (int q = 0; q < count; ++q) {
        const int r = first + q;
        const Field& node = r >= 0 ? history_.slot(static_cast<std::size_t>(r))
                                   : tail_[tail_.size() + static_cast<std::size_t>(r)];
        kernels::axpy(weights[q], node.values(), mid, mid);
    }
}

void SimState::advance_etd1() {
    Workspace& w = *work_;
    const Field* d0 = coeffs_.tau > 0.0 ? &history_.delayed_state() : nullptr;
    explicit_term(w.u_hat, d0, w.n_u);
    kernels::cmul(tables_.exp_full, w.u_hat, w.tmp);
    kernels::cmul_acc(tables_.phi1_full, w.n_u, w.tmp);
}

void SimState::advance_etdrk4() {
    Workspace& w = *work_;
    const Field* d_start = nullptr;
    const Field* d_mid = nullptr;
    const Field* d_end = nullptr;
    if (coeffs_.tau > 0.0) {
        d_start = &history_.slot(0);
        if (options_.delay_stages == DelayStages::frozen) {
            d_mid = d_end = d_start;
        } else {
            build_mid_delay();
            d_mid = &*w.delayed_mid;
            d_end = &history_.slot(1);
        }
    }

    explicit_term(w.u_hat, d_start, w.n_u);

    kernels::cmul(tables_.exp_half, w.u_hat, w.a_hat);
    kernels::cmul_acc(tables_.phi1_half, w.n_u, w.a_hat);
    explicit_term(w.a_hat, d_mid, w.n_a);

    kernels::cmul(tables_.exp_half, w.u_hat, w.b_hat);
    kernels::cmul_acc(tables_.phi1_half, w.n_a, w.b_hat);
    explicit_term(w.b_hat, d_mid, w.n_b);

    for (std::size_t k = 0; k < w.n; ++k) w.tmp[k] = 2.0 * w.n_b[k] - w.n_u[k];
    kernels::cmul(tables_.exp_half, w.a_hat, w.c_hat);
    kernels::cmul_acc(tables_.phi1_half, w.tmp, w.c_hat);
    explicit_term(w.c_hat, d_end, w.n_c);

    for (std::size_t k = 0; k < w.n; ++k) w.n_a[k] += w.n_b[k];
    kernels::cmul(tables_.exp_full, w.u_hat, w.tmp);
    kernels::cmul_acc(tables_.w_first, w.n_u, w.tmp);
    kernels::cmul_acc(tables_.w_middle, w.n_a, w.tmp);
    kernels::cmul_acc(tables_.w_last, w.n_c, w.tmp);
}

bool SimState::step() {
    if (failed()) throw DivergenceError("step on a failed state: " + failure_);
    Workspace& w = *work_;
    try {
        if (options_.scheme == Scheme::etd1) {
            advance_etd1();
        } else {
            advance_etdrk4();
        }
    } catch (const DivergenceError& e) {
        failure_ = std::string(e.what()) + " at t = " + std::to_string(t());
        return false;
    }

    Field next = Field::zeros(coeffs_.lambda0.grid_ptr());
    w.transform.inverse(w.tmp, next.values());
    const double norm = next.all_finite() ? l2_norm(next) : std::nan("");
    if (!std::isfinite(norm) || norm > kDivergenceNorm) {
        failure_ = "state diverged at t = " + std::to_string(t() + options_.dt) +
                   " (L2 norm " + std::to_string(norm) + ")";
        return false;
    }
    const double t_next = history_.newest_time() + options_.dt;
    if (coeffs_.tau > 0.0) {
        if (tail_.size() == 2) tail_.erase(tail_.begin());
        tail_.push_back(history_.slot(0));
    }
    history_.push(std::move(next), t_next);
    ++step_index_;
    // Re-derive the spectrum from the real field so conjugate symmetry stays exact.
    w.transform.forward(u().values(), w.u_hat);
    return true;
}

namespace {

constexpr std::array<char, 8> kCheckpointMagic{'D', 'L', 'Y', 'C', 'K', 'P', 'T', '\0'};

void write_f64(std::ostream& out, double v) {
    std::array<unsigned char, 8> b;
    std::memcpy(b.data(), &v, 8);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    out.write(reinterpret_cast<const char*>(b.data()), 8);
}

double read_f64(std::istream& in) {
    std::array<unsigned char, 8> b;
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) throw HistoryError("truncated checkpoint metadata");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    double v;
    std::memcpy(&v, b.data(), 8);
    return v;
}

}  // namespace

void SimState::write_checkpoint(std::ostream& out) const {
    history_.write_snapshot(out);
    out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
    write_f64(out, t());
    write_f64(out, options_.dt);
    write_f64(out, static_cast<double>(step_index_));
    write_f64(out, options_.scheme == Scheme::etd1 ? 1.0 : 4.0);
    write_f64(out, static_cast<double>(tail_.size()));
    for (const Field& f : tail_) {
        for (double v : f.values()) write_f64(out, v);
    }
    if (!out) throw HistoryError("failed to write checkpoint");
}

SimState SimState::read_checkpoint(std::istream& in, CoefficientSet coeffs,
                                   StepperOptions options) {
    DelayHistory history = DelayHistory::read_snapshot(in, coeffs.lambda0.grid_ptr());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kCheckpointMagic) throw HistoryError("checkpoint metadata missing");
    const double t = read_f64(in);
    const double dt = read_f64(in);
    const double steps = read_f64(in);
    const double scheme = read_f64(in);
    const double tail_count = read_f64(in);
    if (!(tail_count == 0.0 || tail_count == 1.0 || tail_count == 2.0)) {
        throw HistoryError("corrupt checkpoint tail");
    }
    std::vector<Field> tail;
    for (int k = 0; k < static_cast<int>(tail_count); ++k) {
        std::vector<double> v(history.grid().size());
        for (double& x : v) x = read_f64(in);
        tail.push_back(Field::physical(history.grid_ptr(), std::move(v)));
    }
    if (std::fabs(t - history.newest_time()) > 1e-12 * std::max(1.0, std::fabs(t))) {
        throw HistoryError("checkpoint time disagrees with history");
    }
    options.scheme = scheme == 1.0 ? Scheme::etd1 : Scheme::etdrk4;
    if (options.dt != 0.0 && options.dt != dt) {
        throw ConfigError("checkpoint dt differs from requested dt");
    }
    options.dt = dt;
    SimState state(std::move(coeffs), std::move(history), options);
    state.step_index_ = static_cast<std::size_t>(steps);
    state.tail_ = std::move(tail);
    return state;
}

}  // namespace dispersive
