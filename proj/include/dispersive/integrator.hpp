#pragma once

#include "dispersive/delay_line.hpp"
#include "dispersive/field.hpp"
#include "dispersive/operator.hpp"

#include <complex>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dispersive {

enum class Scheme { etd1, etdrk4 };

/// How the retarded state is supplied to ETDRK4's internal stages.
///  - interpolated: exact history slots at c = 0 and c = 1, cubic Lagrange
///    at c = 1/2 through four consecutive snapshots chosen so the stencil
///    never straddles a derivative breakpoint s = k tau (fourth order in dt).
///  - frozen: the oldest slot for every stage (first order in dt when the
///    delay term is active).
enum class DelayStages { interpolated, frozen };

const char* to_string(Scheme s) noexcept;
Scheme parse_scheme(const std::string& text);
const char* to_string(DelayStages d) noexcept;
DelayStages parse_delay_stages(const std::string& text);

struct PhiValues {
    Complex phi1, phi2, phi3;
};

/// phi_k(z) = sum_n z^n / (n+k)!; Taylor series for |z| < 1/2, closed form otherwise.
PhiValues phi_functions(Complex z);

/// Per-mode ETD weights for step dt. Weights include the factor dt.
struct EtdTables {
    std::vector<Complex> exp_full;   // e^{a dt}
    std::vector<Complex> exp_half;   // e^{a dt/2}
    std::vector<Complex> phi1_full;  // dt phi1(a dt)            (ETD1)
    std::vector<Complex> phi1_half;  // dt/2 phi1(a dt/2)        (ETDRK4 stages)
    std::vector<Complex> w_first;    // dt (phi1 - 3 phi2 + 4 phi3)
    std::vector<Complex> w_middle;   // 2 dt (phi2 - 2 phi3), applied to N_a + N_b
    std::vector<Complex> w_last;     // dt (4 phi3 - phi2)
};

EtdTables etd_coefficients(std::span<const Complex> a, double dt);

struct StepperOptions {
    Scheme scheme = Scheme::etdrk4;
    double dt = 0.0;  // required when tau = 0; must equal tau / n_tau otherwise
    bool fold_constant_damping = false;
    DelayStages delay_stages = DelayStages::interpolated;
};

struct LinearModeFlags {
    bool nonlinearity_on = true;
    bool dissipation_on = true;
};

/// Divergence bound on the L2 norm.
inline constexpr double kDivergenceNorm = 1e12;

/// A running simulation: current field, history ring, and stepping tables.
/// The newest history slot is always the current field.
class SimState {
public:
    SimState(CoefficientSet coeffs, DelayHistory history, StepperOptions options);
    ~SimState();
    SimState(SimState&&) noexcept;
    SimState& operator=(SimState&&) noexcept;

    double t() const { return history_.newest_time(); }
    std::size_t step_index() const noexcept { return step_index_; }
    const Field& u() const { return history_.newest(); }
    const DelayHistory& history() const noexcept { return history_; }
    const CoefficientSet& coeffs() const noexcept { return coeffs_; }
    const StepperOptions& options() const noexcept { return options_; }
    Scheme scheme() const noexcept { return options_.scheme; }
    double dt() const noexcept { return options_.dt; }
    const std::vector<Complex>& symbol() const noexcept { return symbol_; }

    bool failed() const noexcept { return !failure_.empty(); }
    const std::string& failure() const noexcept { return failure_; }

    /// Advances by dt. Returns false (and marks the state failed) on
    /// divergence; throws DivergenceError if called on a failed state.
    bool step();

    /// Toggles the nonlinearity and dissipation and rebuilds the tables.
    void set_linear_mode(LinearModeFlags flags);
    LinearModeFlags linear_mode() const noexcept {
        return {coeffs_.nonlinearity_on, coeffs_.dissipation_on};
    }

    /// History snapshot followed by a metadata block (t, dt, step index, scheme)
    /// and the evicted slots kept for stage interpolation.
    void write_checkpoint(std::ostream& out) const;
    /// Restores a checkpoint written for the same coefficients and options.
    static SimState read_checkpoint(std::istream& in, CoefficientSet coeffs,
                                    StepperOptions options);

private:
    struct Workspace;

    void rebuild();
    void build_mid_delay();
    void explicit_term(std::span<const Complex> v_hat, const Field* delayed,
                       std::span<Complex> out);
    void advance_etd1();
    void advance_etdrk4();

    CoefficientSet coeffs_;
    DelayHistory history_;
    StepperOptions options_;
    std::size_t step_index_ = 0;
    std::string failure_;

    std::vector<Complex> symbol_;
    EtdTables tables_;
    std::vector<double> lambda0_explicit_;
    bool damping_active_ = false;
    std::unique_ptr<Workspace> work_;
    // Up to two snapshots evicted from the history ring (most recent last),
    // used as extra interpolation nodes older than t - tau.
    std::vector<Field> tail_;
};

}  // namespace dispersive
