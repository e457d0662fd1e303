#include "dispersive/delay_line.hpp"

#include "dispersive/errors.hpp"
#include "dispersive/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace dispersive {

namespace {

constexpr std::array<char, 8> kMagic{'D', 'L', 'Y', 'H', 'I', 'S', 'T', '\0'};
constexpr std::uint32_t kVersion = 2;

template <typename T>
void write_le(std::ostream& out, T value) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (!in) throw HistoryError("truncated history snapshot");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

void check_configuration(double tau, std::size_t n_tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("delay tau must be >= 0");
    if (tau > 0.0 && n_tau == 0) {
        throw ConfigError("tau > 0 requires n_tau >= 1 so that dt = tau / n_tau");
    }
}

}  // namespace

DelayHistory DelayHistory::init(const HistoryProfile& u0, GridPtr grid, double tau,
                                std::size_t n_tau, double step) {
    check_configuration(tau, n_tau);
    if (!grid) throw ConfigError("history requires a grid");
    if (tau == 0.0) n_tau = 0;
    const double dt = tau > 0.0 ? tau / static_cast<double>(n_tau) : step;
    std::vector<Field> slots;
    slots.reserve(n_tau + 1);
    for (std::size_t k = 0; k <= n_tau; ++k) {
        // s_k = -(n_tau - k) dt; the newest slot is exactly s = 0
        const double s = -static_cast<double>(n_tau - k) * dt;
        slots.push_back(Field::sample(grid, [&](double x) { return u0(x, s); }));
    }
    return from_slots(std::move(grid), tau, n_tau, std::move(slots), 0.0, step);
}

DelayHistory DelayHistory::from_slots(GridPtr grid, double tau, std::size_t n_tau,
                                      std::vector<Field> slots, double newest_time,
                                      double step) {
    check_configuration(tau, n_tau);
    if (tau == 0.0) n_tau = 0;
    if (slots.size() != n_tau + 1) {
        throw ConfigError("history needs exactly n_tau + 1 slots (got " +
                          std::to_string(slots.size()) + ")");
    }
    for (const Field& f : slots) {
        if (!f.grid_ptr() || !f.grid().same_as(*grid)) {
            throw GridMismatchError("history slots must share one grid");
        }
        if (!f.is_physical()) throw RepresentationError("history slots are stored physically");
    }
    DelayHistory h;
    h.grid_ = std::move(grid);
    h.tau_ = tau;
    h.n_tau_ = n_tau;
    h.dt_ = tau > 0.0 ? tau / static_cast<double>(n_tau) : step;
    if (tau > 0.0 && step > 0.0 && std::fabs(step - h.dt_) > 1e-12 * h.dt_) {
        throw ConfigError("time step must equal tau / n_tau when tau > 0");
    }
    h.origin_time_ = newest_time;
    h.newest_index_ = 0;
    h.head_ = 0;
    h.slots_ = std::move(slots);
    return h;
}

const Grid& DelayHistory::grid() const {
    if (!grid_) throw HistoryError("history not initialized");
    return *grid_;
}

const Field& DelayHistory::slot(std::size_t k) const {
    if (!initialized()) throw HistoryError("history not initialized");
    if (k >= slots_.size()) throw HistoryError("history slot index out of range");
    return slots_[physical_index(k)];
}

double DelayHistory::timestamp(std::size_t k) const {
    if (!initialized()) throw HistoryError("history not initialized");
    const auto offset = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(n_tau_);
    return origin_time_ + static_cast<double>(newest_index_ + offset) * dt_;
}

const Field& DelayHistory::delayed_state() const {
    if (!initialized()) throw HistoryError("delayed state requested before history init");
    return slot(0);
}

void DelayHistory::push(Field u_new, double t_new) {
    if (!initialized()) throw HistoryError("push before history init");
    if (!u_new.grid_ptr() || !u_new.grid().same_as(*grid_)) {
        throw GridMismatchError("pushed field is on a different grid");
    }
    if (!u_new.is_physical()) throw RepresentationError("history slots are stored physically");
    const double expected = origin_time_ + static_cast<double>(newest_index_ + 1) * dt_;
    if (!(dt_ > 0.0) || std::fabs(t_new - expected) > 1e-12 * std::max(1.0, std::fabs(expected))) {
        throw HistoryError("misaligned history push: expected t = " + std::to_string(expected) +
                           ", got " + std::to_string(t_new));
    }
    slots_[head_] = std::move(u_new);
    head_ = (head_ + 1) % slots_.size();
    ++newest_index_;
}

void DelayHistory::write_snapshot(std::ostream& out) const {
    if (!initialized()) throw HistoryError("cannot snapshot an empty history");
    out.write(kMagic.data(), kMagic.size());
    write_le<std::uint32_t>(out, kVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid_->size()));
    write_le<double>(out, tau_);
    write_le<double>(out, static_cast<double>(n_tau_));
    write_le<double>(out, dt_);
    write_le<double>(out, newest_time());
    // timestamps are origin + index * dt; keep both so a reload is exact
    write_le<double>(out, origin_time_);
    write_le<double>(out, static_cast<double>(newest_index_));
    write_le<double>(out, grid_->length());
    write_le<double>(out, grid_->x_min());
    for (std::size_t k = 0; k < slot_count(); ++k) {
        write_le<double>(out, timestamp(k));
        for (double v : slot(k).values()) write_le<double>(out, v);
    }
    if (!out) throw HistoryError("failed to write history snapshot");
}

DelayHistory DelayHistory::read_snapshot(std::istream& in, GridPtr grid) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw HistoryError("not a history snapshot (bad magic)");
    const auto version = read_le<std::uint32_t>(in);
    if (version != kVersion) throw HistoryError("unsupported snapshot version");
    const auto points = read_le<std::uint32_t>(in);
    const double tau = read_le<double>(in);
    const double n_tau_real = read_le<double>(in);
    const double dt = read_le<double>(in);
    const double newest_time = read_le<double>(in);
    const double origin = read_le<double>(in);
    const double index_real = read_le<double>(in);
    const double length = read_le<double>(in);
    const double x_min = read_le<double>(in);
    if (!(n_tau_real >= 0.0) || n_tau_real != std::floor(n_tau_real)) {
        throw HistoryError("corrupt snapshot slot count");
    }
    if (!std::isfinite(origin) || index_real != std::floor(index_real) || std::fabs(index_real) > 0x1p52) {
        throw HistoryError("corrupt snapshot time origin");
    }
    const auto n_tau = static_cast<std::size_t>(n_tau_real);
    if (grid) {
        if (grid->size() != points || grid->length() != length || grid->x_min() != x_min) {
            throw GridMismatchError("snapshot grid does not match the requested grid");
        }
    } else {
        grid = Grid::make(length, points, x_min);
    }
    std::vector<Field> slots;
    std::vector<double> times;
    for (std::size_t k = 0; k <= n_tau; ++k) {
        times.push_back(read_le<double>(in));
        std::vector<double> v(points);
        for (auto& x : v) x = read_le<double>(in);
        slots.push_back(Field::physical(grid, std::move(v)));
    }
    DelayHistory h = from_slots(grid, tau, n_tau, std::move(slots), newest_time, dt);
    h.origin_time_ = origin;
    h.newest_index_ = static_cast<std::int64_t>(index_real);
    if (std::fabs(h.newest_time() - newest_time) > 1e-12 * std::max(1.0, std::fabs(newest_time))) {
        throw HistoryError("snapshot time origin disagrees with its newest time");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::fabs(times[k] - h.timestamp(k)) > 1e-12 * std::max(1.0, std::fabs(times[k]))) {
            throw HistoryError("snapshot timestamps are not an arithmetic progression");
        }
    }
    return h;
}

double memory_integral(const DelayHistory& history, const Field& lambda, double t) {
    if (!history.initialized()) throw HistoryError("memory integral of empty history");
    require_same_grid(history.slot(0), lambda, "memory_integral");
    if (history.tau() == 0.0 || history.slot_count() < 2) return 0.0;
    std::vector<double> abs_lambda(lambda.size());
    const auto l = lambda.values();
    std::transform(l.begin(), l.end(), abs_lambda.begin(), [](double v) { return std::fabs(v); });
    const double dx = lambda.grid().spacing();
    const std::size_t n = history.slot_count();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto u = history.slot(k).values();
        const double weight = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        const double spatial = kernels::dot3(abs_lambda, u, u) * dx;
        sum += weight * std::exp(-(t - history.timestamp(k))) * spatial;
    }
    return sum * history.dt();
}

}  // namespace dispersive
