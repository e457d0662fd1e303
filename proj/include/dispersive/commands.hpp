#pragma once

// Scenario drivers behind the command-line tool. Each writes its outputs
// under `out` and returns a process exit code:
//   0 success (an unsatisfied certificate is still a success)
//   1 the integration diverged (partial outputs are kept)
//   2 the configuration was rejected

#include "dispersive/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dispersive {

enum ExitCode : int { kExitOk = 0, kExitDiverged = 1, kExitConfig = 2 };

/// Pointwise slack on the certified envelope C(u0, tau) e^{-rate t}.
inline constexpr double kEnvelopeSlack = 0.05;

/// simulate: trace.csv and summary.json.
int cmd_simulate(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// certify: certificate.json.
int cmd_certify(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// convergence: runs dt, dt/2, dt/4, dt/8 and writes convergence.json.
int cmd_convergence(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// decay-study: trace.csv and decay_report.json with fitted rates,
/// the certificate and the envelope check.
int cmd_decay_study(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);

/// sweep: cartesian product of the sweep.<key> axes, each run in its own
/// directory under `out`, index.json written after all runs finish.
int cmd_sweep(const ConfigEntries& base, const std::filesystem::path& base_dir,
              const std::filesystem::path& out, unsigned threads, std::ostream& log);

struct Invocation {
    std::string command;
    std::string config_text;
    std::filesystem::path config_dir;
    std::vector<std::string> overrides;
    std::filesystem::path out = ".";
    unsigned threads = 1;
};

/// Parses, validates and dispatches; configuration problems are reported to
/// `log` one per line.
int run_invocation(const Invocation& inv, std::ostream& log);

}  // namespace dispersive
