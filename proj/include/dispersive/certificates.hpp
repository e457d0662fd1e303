#pragma once

#include "dispersive/delay_line.hpp"
#include "dispersive/field.hpp"
#include "dispersive/operator.hpp"

#include <string>
#include <vector>

namespace dispersive {

/// c_q = (1 - 1/(2q)) (2/q)^{1/(2q-1)}, 1 <= q < inf.
double c_q(double q);

/// 2 (gamma0 - gamma - c_q norm^{2q/(2q-1)}) before the min{., 1} cap.
double rate_uncapped(double gamma0, double gamma, double q, double norm);

/// min{ 2(gamma0 - gamma - ((2q-1)/(2q)) (2/q)^{1/(2q-1)} ||beta||_q^{2q/(2q-1)}), 1 }.
/// Values <= 0 mean the certificate is vacuous.
double rate_nu(double gamma0, double gamma, double q, double beta_norm);

/// Same formula with ||beta + beta0||_q.
double rate_nu_tilde(double gamma0, double gamma, double q, double combined_norm);

/// 1/2 ||u(0)||^2 + int_{-tau}^0 e^s ||lambda||_inf ||u(s)||^2 ds, trapezoid over
/// the history slots. The history must be the initial one (newest slot at s = 0).
double envelope_constant(const DelayHistory& initial_history, const Field& lambda);

/// sqrt(3/2) (1 + e^{2 |lambda|_inf T})^{1/2} e^{(|lambda|_inf + |lambda0|_inf) T}.
double ct_constant(double T, double lambda_sup, double lambda0_sup);

enum class Theorem { constant_sign, indefinite };
enum class CertificateStatus { satisfied, unsatisfied, not_applicable };

const char* to_string(Theorem t) noexcept;
const char* to_string(CertificateStatus s) noexcept;

struct Condition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
    double margin = 0.0;  // rhs - lhs
    bool strict = true;   // lhs < rhs required (otherwise lhs <= rhs)
};

struct StabilityCertificate {
    Theorem theorem = Theorem::constant_sign;
    CertificateStatus status = CertificateStatus::unsatisfied;
    double q = 1.0;
    double gamma0 = 0.0;
    double gamma = 0.0;
    double beta_norm = 0.0;
    double beta0_norm = 0.0;
    double combined_norm = 0.0;
    double rate = 0.0;           // nu or nu-tilde, capped at 1
    double rate_uncapped = 0.0;
    double envelope_constant = 0.0;
    std::vector<Condition> conditions;
    std::string note;

    bool satisfied() const noexcept { return status == CertificateStatus::satisfied; }
};

/// Evaluations spent by the golden-section search over gamma.
inline constexpr int kGammaScanEvaluations = 64;

/// Constant-sign damping: gamma0 = min lambda0 over the grid (must be > 0),
/// beta = max(0, (e^tau+1)/2 |lambda| - gamma), gamma chosen to maximize nu.
StabilityCertificate certify_constant_sign(const CoefficientSet& coeffs, double q);

/// Indefinite damping with user-supplied gamma0 > 0: beta0 = max(0, gamma0 - lambda0),
/// gamma chosen to maximize nu-tilde subject to the combined-norm inequality.
StabilityCertificate certify_indefinite(const CoefficientSet& coeffs, double q, double gamma0);

}  // namespace dispersive
