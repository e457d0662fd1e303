#pragma once

// Run configuration: a flat key = value document with dotted sections.
//
//   # comment
//   params.j = 2
//   lambda0.kind = gaussian
//   lambda0.amplitude = -0.3
//
// Validation resolves every key the run depends on, records the value it
// used (given or default) and reports all problems at once.

#include "dispersive/certificates.hpp"
#include "dispersive/errors.hpp"
#include "dispersive/delay_line.hpp"
#include "dispersive/integrator.hpp"
#include "dispersive/operator.hpp"
#include "dispersive/run.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dispersive {

/// Validation failure carrying every individual problem.
class ConfigErrors : public ConfigError {
public:
    explicit ConfigErrors(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Parsed key-value pairs in document order. Duplicate keys and malformed
/// lines are errors.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;
ConfigEntries parse_config_text(const std::string& text);

/// Applies "key=value" overrides; a key may be overridden whether or not the
/// document sets it.
void apply_overrides(ConfigEntries& entries, const std::vector<std::string>& overrides);

enum class ProfileKind { constant, gaussian, bump, table };

/// Coefficient profile: baseline + amplitude * shape((x - center) / scale).
///   gaussian: exp(-s^2) with s = (x - center) / width
///   bump:     exp(1 - 1/(1 - s^2)) for |s| < 1, s = (x - center) / radius
struct ProfileSpec {
    ProfileKind kind = ProfileKind::constant;
    double value = 0.0;  // constant
    double center = 0.0;
    double width = 1.0;
    double radius = 1.0;
    double amplitude = 0.0;
    double baseline = 0.0;
    std::filesystem::path file;  // table: one value per grid point
};

enum class InitialKind { gaussian, sech, sine, zero, table };

struct InitialSpec {
    InitialKind kind = InitialKind::gaussian;
    double amplitude = 1.0;
    double center = 0.0;
    double width = 1.0;
    double power = 2.0;      // sech: amplitude * sech(s)^power
    double wavenumber = 1.0;  // sine: amplitude * sin(k x + phase)
    double phase = 0.0;
    std::filesystem::path file;
};

enum class HistoryKind { constant, exponential, table };

/// u0(x, s) on [-tau, 0]: constant in s, initial(x) e^{alpha s}, or a table
/// of n_tau + 1 rows (oldest first) of N values each.
struct HistorySpec {
    HistoryKind kind = HistoryKind::constant;
    double alpha = 0.0;
    std::filesystem::path file;
};

struct CertificateSpec {
    bool attach = false;
    double q = 2.0;
    std::optional<double> gamma0;  // set: indefinite theorem; unset: constant sign
};

struct RunConfig {
    OperatorParams params;
    double tau = 0.0;
    std::size_t n_tau = 0;
    double length = 40.0;
    std::size_t points = 256;
    double x_min = -20.0;
    Scheme scheme = Scheme::etdrk4;
    DelayStages delay_stages = DelayStages::interpolated;
    double dt = 0.01;
    double t_final = 1.0;
    std::size_t sample_stride = 1;
    bool dissipation_on = true;
    bool nonlinearity_on = true;
    bool fold_constant_damping = false;
    ProfileSpec lambda0;
    ProfileSpec lambda;
    InitialSpec initial;
    HistorySpec history;
    CertificateSpec certificate;
    std::vector<double> sobolev_orders;
    double window_start = 1.0;
    double window_end = 1.0;
    TimeQuadrature residual_rule = TimeQuadrature::cubic;
    bool allow_boundary_mass = false;

    /// Every key the run depends on with the value used, in a canonical order.
    ConfigEntries resolved;
};

/// Validates a document. Relative table paths resolve against base_dir.
/// Throws ConfigErrors listing every problem.
RunConfig validate_config(const ConfigEntries& entries,
                          const std::filesystem::path& base_dir = {});
RunConfig validate_config_text(const std::string& text,
                               const std::vector<std::string>& overrides = {},
                               const std::filesystem::path& base_dir = {});

/// "key = value" lines of the resolved document.
std::string resolved_text(const RunConfig& config);
std::vector<std::string> resolved_lines(const RunConfig& config);

/// Extracts the embedded config from a trace CSV ("# key = value" preamble)
/// or a JSON output (its "config" object).
std::string embedded_config(const std::filesystem::path& output_file);

struct Problem {
    GridPtr grid;
    CoefficientSet coeffs;
    DelayHistory history;
    StepperOptions stepper;
    RunOptions run;
};

/// Samples the profiles and builds the initial state description.
Problem build_problem(const RunConfig& config);

}  // namespace dispersive
