#include "dispersive/certificates.hpp"

#include "dispersive/errors.hpp"
#include "dispersive/kernels.hpp"
#include "dispersive/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

namespace dispersive {

namespace {

void require_q(double q) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw ConfigError("Lebesgue exponent q must be in [1, inf)");
}

double norm_threshold(double gap, double q) {
    // ((gamma0 - gamma) / c_q)^{1 - 1/(2q)}
    return gap > 0.0 ? std::pow(gap / c_q(q), 1.0 - 1.0 / (2.0 * q)) : 0.0;
}

}  // namespace

double c_q(double q) {
    require_q(q);
    return (1.0 - 1.0 / (2.0 * q)) * std::pow(2.0 / q, 1.0 / (2.0 * q - 1.0));
}

double rate_uncapped(double gamma0, double gamma, double q, double norm) {
    require_q(q);
    const double c = ((2.0 * q - 1.0) / (2.0 * q)) * std::pow(2.0 / q, 1.0 / (2.0 * q - 1.0));
    return 2.0 * (gamma0 - gamma - c * std::pow(norm, 2.0 * q / (2.0 * q - 1.0)));
}

double rate_nu(double gamma0, double gamma, double q, double beta_norm) {
    return std::min(rate_uncapped(gamma0, gamma, q, beta_norm), 1.0);
}

double rate_nu_tilde(double gamma0, double gamma, double q, double combined_norm) {
    return std::min(rate_uncapped(gamma0, gamma, q, combined_norm), 1.0);
}

double envelope_constant(const DelayHistory& history, const Field& lambda) {
    if (!history.initialized()) throw HistoryError("envelope constant needs a full history");
    const double u0 = l2_norm(history.newest());
    double value = 0.5 * u0 * u0;
    if (history.tau() == 0.0 || history.slot_count() < 2) return value;
    const double lsup = sup_norm(lambda);
    const double t0 = history.newest_time();
    const std::size_t n = history.slot_count();
    double integral = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double norm = l2_norm(history.slot(k));
        const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
        integral += w * std::exp(history.timestamp(k) - t0) * lsup * norm * norm;
    }
    return value + integral * history.dt();
}

double ct_constant(double T, double lambda_sup, double lambda0_sup) {
    if (!(T > 0.0)) throw ConfigError("C_T requires T > 0");
    return std::sqrt(1.5) * std::sqrt(1.0 + std::exp(2.0 * lambda_sup * T)) *
           std::exp((lambda_sup + lambda0_sup) * T);
}

const char* to_string(Theorem t) noexcept {
    return t == Theorem::constant_sign ? "constant-sign" : "indefinite";
}

const char* to_string(CertificateStatus s) noexcept {
    switch (s) {
        case CertificateStatus::satisfied: return "satisfied";
        case CertificateStatus::unsatisfied: return "unsatisfied";
        case CertificateStatus::not_applicable: return "not-applicable";
    }
    return "unknown";
}

namespace {

Condition make_condition(std::string name, double lhs, double rhs, bool strict) {
    Condition c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.strict = strict;
    c.margin = rhs - lhs;
    c.satisfied = strict ? lhs < rhs : lhs <= rhs;
    return c;
}

struct GammaChoice {
    double gamma = 0.0;
    double norm = 0.0;    // ||beta + shift||_q at gamma
    double merit = 0.0;   // uncapped rate
};

/// Maximizes rate_uncapped(gamma0, gamma, q, ||shift + max(0, kappa|lambda| - gamma)||_q)
/// over gamma in [0, gamma0). The merit is concave in gamma, so golden-section
/// search applies; the kink gamma = kappa ||lambda||_inf (beta = 0) and the left
/// endpoint are evaluated explicitly as well. Ties in the capped rate go to the kink.
GammaChoice scan_gamma(const Field& lambda, const std::vector<double>& shift, double kappa,
                       double gamma0, double q) {
    const auto l = lambda.values();
    std::vector<double> combined(l.size());
    auto norm_at = [&](double gamma) {
        for (std::size_t i = 0; i < l.size(); ++i) {
            combined[i] = shift[i] + std::max(0.0, kappa * std::fabs(l[i]) - gamma);
        }
        return lq_norm(Field::physical(lambda.grid_ptr(), combined), q);
    };
    auto evaluate = [&](double gamma) {
        const double n = norm_at(gamma);
        return GammaChoice{gamma, n, rate_uncapped(gamma0, gamma, q, n)};
    };
    auto better = [](const GammaChoice& a, const GammaChoice& b) {
        // deterministic: larger merit wins, ties go to the smaller gamma
        return a.merit > b.merit || (a.merit == b.merit && a.gamma < b.gamma);
    };

    GammaChoice best = evaluate(0.0);
    const double kink = kappa * sup_norm(lambda);
    std::optional<GammaChoice> at_kink;
    if (kink < gamma0) {
        at_kink = evaluate(kink);
        if (better(*at_kink, best)) best = *at_kink;
    }

    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = gamma0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    GammaChoice f1 = evaluate(x1), f2 = evaluate(x2);
    for (int it = 2; it < kGammaScanEvaluations; ++it) {
        if (f1.merit >= f2.merit) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = evaluate(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = evaluate(x2);
        }
    }
    for (const GammaChoice& c : {f1, f2}) {
        if (c.gamma < gamma0 && better(c, best)) best = c;
    }
    // The certified rate is capped at 1. When the kink already reaches the
    // best capped rate, take it: beta vanishes there.
    if (at_kink && std::min(at_kink->merit, 1.0) >= std::min(best.merit, 1.0)) best = *at_kink;
    return best;
}

double kappa_of(double tau) { return 0.5 * (std::exp(tau) + 1.0); }

void add_gamma_conditions(StabilityCertificate& cert, const Field& lambda, double kappa,
                          const std::vector<double>& beta) {
    cert.conditions.push_back(make_condition("gamma_nonnegative", -cert.gamma, 0.0, false));
    cert.conditions.push_back(make_condition("gamma_below_gamma0", cert.gamma, cert.gamma0, true));
    // (e^tau+1)/2 |lambda| <= gamma + beta pointwise; report the worst point
    const auto l = lambda.values();
    double worst_lhs = 0.0, worst_rhs = 0.0, worst_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < l.size(); ++i) {
        const double lhs = kappa * std::fabs(l[i]);
        const double rhs = cert.gamma + beta[i];
        if (rhs - lhs < worst_gap) {
            worst_gap = rhs - lhs;
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
    }
    cert.conditions.push_back(make_condition("delay_dominated", worst_lhs, worst_rhs, false));
}

std::vector<double> exceedance(const Field& lambda, double kappa, double gamma) {
    const auto l = lambda.values();
    std::vector<double> beta(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        beta[i] = std::max(0.0, kappa * std::fabs(l[i]) - gamma);
    }
    return beta;
}

void settle_status(StabilityCertificate& cert) {
    const bool all = std::all_of(cert.conditions.begin(), cert.conditions.end(),
                                 [](const Condition& c) { return c.satisfied; });
    cert.status = all && cert.rate > 0.0 ? CertificateStatus::satisfied
                                         : CertificateStatus::unsatisfied;
}

}  // namespace

StabilityCertificate certify_constant_sign(const CoefficientSet& coeffs, double q) {
    require_q(q);
    coeffs.validate();
    StabilityCertificate cert;
    cert.theorem = Theorem::constant_sign;
    cert.q = q;
    const auto l0 = coeffs.lambda0.values();
    cert.gamma0 = *std::min_element(l0.begin(), l0.end());
    cert.conditions.push_back(make_condition("lambda0_lower_bound", 0.0, cert.gamma0, true));
    if (!(cert.gamma0 > 0.0)) {
        cert.status = CertificateStatus::not_applicable;
        cert.note = "min lambda0 <= 0; use the indefinite-damping certificate with a target gamma0";
        return cert;
    }
    const double kappa = kappa_of(coeffs.tau);
    const std::vector<double> zero(l0.size(), 0.0);
    const GammaChoice best = scan_gamma(coeffs.lambda, zero, kappa, cert.gamma0, q);
    cert.gamma = best.gamma;
    const auto beta = exceedance(coeffs.lambda, kappa, cert.gamma);
    cert.beta_norm = lq_norm(Field::physical(coeffs.lambda.grid_ptr(), beta), q);
    cert.combined_norm = cert.beta_norm;
    cert.rate_uncapped = rate_uncapped(cert.gamma0, cert.gamma, q, cert.beta_norm);
    cert.rate = rate_nu(cert.gamma0, cert.gamma, q, cert.beta_norm);
    add_gamma_conditions(cert, coeffs.lambda, kappa, beta);
    cert.conditions.push_back(make_condition(
        "beta_norm_bound", cert.beta_norm, norm_threshold(cert.gamma0 - cert.gamma, q), true));
    settle_status(cert);
    return cert;
}

StabilityCertificate certify_indefinite(const CoefficientSet& coeffs, double q, double gamma0) {
    require_q(q);
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
        throw ConfigError("indefinite-damping certificate needs a target gamma0 > 0");
    }
    coeffs.validate();
    StabilityCertificate cert;
    cert.theorem = Theorem::indefinite;
    cert.q = q;
    cert.gamma0 = gamma0;
    const auto l0 = coeffs.lambda0.values();
    std::vector<double> beta0(l0.size());
    for (std::size_t i = 0; i < l0.size(); ++i) beta0[i] = std::max(0.0, gamma0 - l0[i]);
    cert.beta0_norm = lq_norm(Field::physical(coeffs.lambda0.grid_ptr(), beta0), q);
    cert.conditions.push_back(
        make_condition("beta0_norm_bound", cert.beta0_norm, norm_threshold(gamma0, q), true));

    // lambda0 >= gamma0 - beta0 pointwise; holds by construction, reported at the worst point
    double worst_gap = std::numeric_limits<double>::infinity(), worst_lhs = 0.0, worst_rhs = 0.0;
    for (std::size_t i = 0; i < l0.size(); ++i) {
        const double lhs = gamma0 - beta0[i];
        if (l0[i] - lhs < worst_gap) {
            worst_gap = l0[i] - lhs;
            worst_lhs = lhs;
            worst_rhs = l0[i];
        }
    }
    cert.conditions.push_back(make_condition("lambda0_decomposition", worst_lhs, worst_rhs, false));

    const double kappa = kappa_of(coeffs.tau);
    const GammaChoice best = scan_gamma(coeffs.lambda, beta0, kappa, gamma0, q);
    cert.gamma = best.gamma;
    const auto beta = exceedance(coeffs.lambda, kappa, cert.gamma);
    cert.beta_norm = lq_norm(Field::physical(coeffs.lambda.grid_ptr(), beta), q);
    std::vector<double> combined(beta.size());
    for (std::size_t i = 0; i < beta.size(); ++i) combined[i] = beta[i] + beta0[i];
    cert.combined_norm = lq_norm(Field::physical(coeffs.lambda.grid_ptr(), combined), q);
    cert.rate_uncapped = rate_uncapped(gamma0, cert.gamma, q, cert.combined_norm);
    cert.rate = rate_nu_tilde(gamma0, cert.gamma, q, cert.combined_norm);
    add_gamma_conditions(cert, coeffs.lambda, kappa, beta);
    cert.conditions.push_back(make_condition("combined_norm_bound", cert.combined_norm,
                                             norm_threshold(gamma0 - cert.gamma, q), true));
    settle_status(cert);
    return cert;
}

}  // namespace dispersive
