#include "dispersive/run.hpp"

#include "dispersive/errors.hpp"

#include <cmath>

namespace dispersive {

std::size_t steps_to_reach(double t_final, double dt) {
    if (!(t_final >= 0.0)) throw ConfigError("final time must be nonnegative");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    const double ratio = t_final / dt;
    const double rounded = std::round(ratio);
    if (std::fabs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError("final time is not an integer multiple of dt");
    }
    return static_cast<std::size_t>(rounded);
}

RunResult run(SimState& state, const RunOptions& options) {
    if (options.sample_stride == 0) throw ConfigError("sample stride must be >= 1");
    const std::size_t steps = steps_to_reach(options.t_final, state.dt());
    RunResult result;
    result.trace.sobolev_orders = options.sobolev_orders;
    const double tau = state.coeffs().tau;
    if (tau > 0.0) {
        const double t_end = state.t() + static_cast<double>(steps) * state.dt();
        for (int k = 1; k * tau < t_end + 0.5 * state.dt(); ++k) {
            result.trace.breakpoints.push_back(k * tau);
        }
    }
    result.trace.samples.push_back(sample_state(state, options.sobolev_orders));
    for (std::size_t n = 1; n <= steps; ++n) {
        if (!state.step()) {
            result.diverged = true;
            result.diagnostic = state.failure();
            break;
        }
        if (n % options.sample_stride == 0 || n == steps) {
            result.trace.samples.push_back(sample_state(state, options.sobolev_orders));
        }
    }
    fill_residuals(result.trace, options.residual_rule);
    return result;
}

}  // namespace dispersive
