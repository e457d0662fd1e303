#pragma once

#include "dispersive/field.hpp"
#include "dispersive/integrator.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dispersive {

struct TraceSample {
    double t = 0.0;
    double energy = 0.0;       // E = 1/2 ||u||^2
    double lyapunov = 0.0;     // E + 1/2 memory integral
    double dissipation = 0.0;  // ||d^m u||^2 while dissipation is on, else 0
    double damping = 0.0;      // int lambda0 u^2
    double delay = 0.0;        // int lambda u(t - tau) u
    double residual = 0.0;     // cumulative energy-balance residual up to t
    std::vector<double> sobolev;  // ||u||_{H^s} for the trace's configured orders
};

struct EnergyTrace {
    std::vector<double> sobolev_orders;
    std::vector<TraceSample> samples;
    // Times where the integrands lose smoothness (multiples of tau for a
    // delayed run); the cubic rule keeps its stencils on one side of each.
    std::vector<double> breakpoints;
};

double energy(const Field& u);

/// E(u) + 1/2 memory_integral(history, lambda, t).
double lyapunov(const SimState& state);

/// Diagnostics of the current state (residual left at 0).
TraceSample sample_state(const SimState& state, std::span<const double> sobolev_orders);

enum class TimeQuadrature {
    trapezoid,  // second order
    cubic,      // piecewise cubic Lagrange, fourth order
};

/// Running integral of f over t (nonuniform spacing allowed); entry k is
/// the integral over [t_0, t_k]. No cubic stencil contains a breakpoint in
/// its interior; where that leaves fewer than four nodes the rule drops to
/// the highest order available.
std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f,
                                         TimeQuadrature rule,
                                         std::span<const double> breakpoints = {});

/// Residual at each sample of
///   E(t) + int_0^t (diss + damp + delay) ds - E(0).
std::vector<double> balance_residuals(const EnergyTrace& trace,
                                      TimeQuadrature rule = TimeQuadrature::cubic);

/// Final-sample residual.
double balance_residual(const EnergyTrace& trace, TimeQuadrature rule = TimeQuadrature::cubic);

/// Writes balance_residuals into the samples' residual column.
void fill_residuals(EnergyTrace& trace, TimeQuadrature rule = TimeQuadrature::cubic);

enum class Functional { energy, lyapunov, sobolev };

struct DecayFit {
    double rate = 0.0;  // negated slope of log(functional)
    double intercept = 0.0;
    double r_squared = 1.0;
    std::size_t samples = 0;
};

DecayFit fit_log_linear(std::span<const double> t, std::span<const double> values);

/// Least-squares fit of log(functional) over samples with t1 <= t <= t2.
DecayFit fit_decay_rate(const EnergyTrace& trace, double t1, double t2, Functional functional,
                        std::size_t sobolev_index = 0);

/// ||v||_inf^2 / (2 ||v||_2 ||v_x||_2). Requires v nonzero with
/// peak-to-boundary ratio above 1e10.
double check_interpolation_inequality(const Field& v);

/// ||d^m u|| / (||d^j u||^{m/j} ||u||^{1-m/j}) for 1 <= m <= j and u nonzero.
/// Any periodic field qualifies (a single Fourier mode gives exactly 1).
double gn_ratio(const Field& u, int m, int j);

/// gn_ratio restricted to boundary-decayed fields, the setting of the
/// whole-line inequality.
double check_gn_ratio(const Field& u, int m, int j);

/// CSV with header t,E,scriptE,diss,damp,delay,residual,Hs_<s>...; values
/// printed with 17 significant digits. Each comment line is written as
/// "# <line>" before the header.
void write_trace_csv(std::ostream& out, const EnergyTrace& trace,
                     std::span<const std::string> comments = {});

}  // namespace dispersive
