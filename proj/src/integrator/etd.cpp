#include "dispersive/integrator.hpp"

#include "dispersive/errors.hpp"

#include <cmath>

namespace dispersive {

const char* to_string(Scheme s) noexcept { return s == Scheme::etd1 ? "etd1" : "etdrk4"; }

Scheme parse_scheme(const std::string& text) {
    if (text == "etd1" || text == "ETD1") return Scheme::etd1;
    if (text == "etdrk4" || text == "ETDRK4") return Scheme::etdrk4;
    throw ConfigError("unknown scheme '" + text + "' (expected etd1 or etdrk4)");
}

const char* to_string(DelayStages d) noexcept {
    return d == DelayStages::frozen ? "frozen" : "interpolated";
}

DelayStages parse_delay_stages(const std::string& text) {
    if (text == "interpolated") return DelayStages::interpolated;
    if (text == "frozen") return DelayStages::frozen;
    throw ConfigError("unknown delay stage rule '" + text + "' (expected interpolated or frozen)");
}

PhiValues phi_functions(Complex z) {
    if (std::abs(z) < 0.5) {
        // phi_k(z) = sum_n z^n / (n+k)!, 24 terms reaches rounding for |z| < 1/2
        PhiValues v{0.0, 0.0, 0.0};
        Complex term1 = 1.0;        // z^n / (n+1)!
        Complex term2 = 0.5;        // z^n / (n+2)!
        Complex term3 = 1.0 / 6.0;  // z^n / (n+3)!
        for (int n = 0; n < 24; ++n) {
            v.phi1 += term1;
            v.phi2 += term2;
            v.phi3 += term3;
            term1 *= z / static_cast<double>(n + 2);
            term2 *= z / static_cast<double>(n + 3);
            term3 *= z / static_cast<double>(n + 4);
        }
        return v;
    }
    const Complex ez = std::exp(z);
    const Complex phi1 = (ez - 1.0) / z;
    const Complex phi2 = (phi1 - 1.0) / z;
    const Complex phi3 = (phi2 - 0.5) / z;
    return {phi1, phi2, phi3};
}

EtdTables etd_coefficients(std::span<const Complex> a, double dt) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    const std::size_t n = a.size();
    EtdTables t;
    t.exp_full.resize(n);
    t.exp_half.resize(n);
    t.phi1_full.resize(n);
    t.phi1_half.resize(n);
    t.w_first.resize(n);
    t.w_middle.resize(n);
    t.w_last.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Complex z = a[k] * dt;
        const PhiValues full = phi_functions(z);
        const PhiValues half = phi_functions(0.5 * z);
        t.exp_full[k] = std::exp(z);
        t.exp_half[k] = std::exp(0.5 * z);
        t.phi1_full[k] = dt * full.phi1;
        t.phi1_half[k] = 0.5 * dt * half.phi1;
        t.w_first[k] = dt * (full.phi1 - 3.0 * full.phi2 + 4.0 * full.phi3);
        t.w_middle[k] = 2.0 * dt * (full.phi2 - 2.0 * full.phi3);
        t.w_last[k] = dt * (4.0 * full.phi3 - full.phi2);
    }
    return t;
}

}  // namespace dispersive
