#pragma once

#include "dispersive/diagnostics.hpp"
#include "dispersive/integrator.hpp"

#include <string>
#include <vector>

namespace dispersive {

struct RunOptions {
    double t_final = 1.0;
    std::size_t sample_stride = 1;
    std::vector<double> sobolev_orders;
    TimeQuadrature residual_rule = TimeQuadrature::cubic;
};

struct RunResult {
    EnergyTrace trace;
    bool diverged = false;
    std::string diagnostic;
};

/// Number of steps of size dt that reach t_final; throws ConfigError if
/// t_final is not an integer multiple of dt (to 1e-9 relative).
std::size_t steps_to_reach(double t_final, double dt);

/// Integrates from the state's current time by t_final, sampling at the start,
/// every sample_stride steps and at the end. Stops early on divergence with a
/// partial trace.
RunResult run(SimState& state, const RunOptions& options);

}  // namespace dispersive
