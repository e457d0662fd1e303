#pragma once

#include "dispersive/field.hpp"
#include "dispersive/grid.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace dispersive {

/// Solution history over [t - tau, t] stored as n_tau + 1 equally spaced
/// physical snapshots. Timestamps are derived from an integer step counter
/// (origin + index * dt), so they never drift.
class DelayHistory {
public:
    /// Profile of the initial history u0(x, s), s in [-tau, 0].
    using HistoryProfile = std::function<double(double x, double s)>;

    DelayHistory() = default;

    /// Samples u0 at s = -tau + k dt, k = 0..n_tau, with dt = tau / n_tau.
    /// For tau = 0 the ring has one slot and `step` is the push spacing.
    static DelayHistory init(const HistoryProfile& u0, GridPtr grid, double tau,
                             std::size_t n_tau, double step = 0.0);

    /// Adopts explicit slots (oldest first) whose newest timestamp is `newest_time`.
    static DelayHistory from_slots(GridPtr grid, double tau, std::size_t n_tau,
                                   std::vector<Field> slots, double newest_time = 0.0,
                                   double step = 0.0);

    bool initialized() const noexcept { return !slots_.empty(); }
    double tau() const noexcept { return tau_; }
    double dt() const noexcept { return dt_; }
    std::size_t n_tau() const noexcept { return n_tau_; }
    std::size_t slot_count() const noexcept { return slots_.size(); }
    const Grid& grid() const;
    const GridPtr& grid_ptr() const noexcept { return grid_; }

    /// k = 0 is the oldest slot.
    const Field& slot(std::size_t k) const;
    double timestamp(std::size_t k) const;
    double oldest_time() const { return timestamp(0); }
    double newest_time() const { return timestamp(slot_count() - 1); }
    const Field& newest() const { return slot(slot_count() - 1); }

    /// u(., t - tau): the oldest slot. Never interpolates.
    const Field& delayed_state() const;

    /// Appends u_new at t_new = newest_time + dt (checked to 1e-12), evicting
    /// the oldest slot.
    void push(Field u_new, double t_new);

    void write_snapshot(std::ostream& out) const;
    /// If `grid` is given the snapshot must match it; otherwise a grid is rebuilt.
    static DelayHistory read_snapshot(std::istream& in, GridPtr grid = nullptr);

private:
    std::size_t physical_index(std::size_t k) const { return (head_ + k) % slots_.size(); }

    GridPtr grid_;
    double tau_ = 0.0;
    std::size_t n_tau_ = 0;
    double dt_ = 0.0;
    double origin_time_ = 0.0;
    std::int64_t newest_index_ = 0;
    std::size_t head_ = 0;  // physical position of the oldest slot
    std::vector<Field> slots_;
};

/// Trapezoid-in-time, rectangle-in-space value of
/// int_{t-tau}^t int e^{-(t-s)} |lambda(x)| u(x,s)^2 dx ds over the stored slots.
double memory_integral(const DelayHistory& history, const Field& lambda, double t);

}  // namespace dispersive
