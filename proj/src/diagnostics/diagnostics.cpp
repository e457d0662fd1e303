#include "dispersive/diagnostics.hpp"

#include "dispersive/errors.hpp"
#include "dispersive/kernels.hpp"
#include "dispersive/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace dispersive {

double energy(const Field& u) {
    const double n = l2_norm(u);
    return 0.5 * n * n;
}

double lyapunov(const SimState& state) {
    return energy(state.u()) +
           0.5 * memory_integral(state.history(), state.coeffs().lambda, state.t());
}

TraceSample sample_state(const SimState& state, std::span<const double> sobolev_orders) {
    const Field& u = state.u();
    const CoefficientSet& c = state.coeffs();
    const Grid& grid = u.grid();
    const double dx = grid.spacing();
    const auto uv = u.values();

    TraceSample s;
    s.t = state.t();
    s.energy = 0.5 * kernels::dot(uv, uv) * dx;
    s.lyapunov = s.energy + 0.5 * memory_integral(state.history(), c.lambda, s.t);
    s.damping = kernels::dot3(c.lambda0.values(), uv, uv) * dx;
    if (c.tau > 0.0) {
        s.delay = kernels::dot3(c.lambda.values(), state.history().delayed_state().values(), uv) * dx;
    }
    const Field spec = to_spectral(u);
    const auto xi = grid.wavenumbers();
    const double norm = grid.length() / (static_cast<double>(grid.size()) * grid.size());
    std::vector<double> w(xi.size());
    if (c.dissipation_on) {
        const int m2 = 2 * c.params.m;
        for (std::size_t k = 0; k < xi.size(); ++k) w[k] = std::pow(xi[k], m2);
        s.dissipation = kernels::weighted_power(w, spec.modes()) * norm;
    }
    for (double order : sobolev_orders) s.sobolev.push_back(sobolev_norm(spec, order));
    return s;
}

std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f,
                                         TimeQuadrature rule, std::span<const double> breakpoints) {
    if (t.size() != f.size()) throw ConfigError("cumulative_integral length mismatch");
    const std::size_t n = t.size();
    std::vector<double> acc(n, 0.0);
    if (n < 2) return acc;
    const bool cubic = rule == TimeQuadrature::cubic;
    // Breakpoints within this tolerance of a sample count as lying on it.
    auto inside = [&](std::size_t first, std::size_t last) {
        const double h = t[last] - t[first];
        for (double b : breakpoints) {
            if (b > t[first] + 1e-9 * h && b < t[last] - 1e-9 * h) return true;
        }
        return false;
    };
    // Two-point Gauss-Legendre integrates a cubic exactly on each interval.
    const double g = 0.5 / std::sqrt(3.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = t[i], b = t[i + 1], h = b - a;
        std::size_t first = i, count = 2;
        if (cubic) {
            // Centred stencil first, then the one-sided ones, then quadratics.
            const long long candidates[][2] = {{-1, 4}, {0, 4}, {-2, 4}, {-1, 3}, {0, 3}};
            for (const auto& c : candidates) {
                const long long lo = static_cast<long long>(i) + c[0];
                const long long hi = lo + c[1] - 1;
                if (lo < 0 || hi >= static_cast<long long>(n)) continue;
                if (inside(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi))) continue;
                first = static_cast<std::size_t>(lo);
                count = static_cast<std::size_t>(c[1]);
                break;
            }
        }
        double piece;
        if (count == 2) {
            piece = 0.5 * h * (f[i] + f[i + 1]);
        } else {
            auto interp = [&](double x) {
                double sum = 0.0;
                for (std::size_t p = first; p < first + count; ++p) {
                    double l = 1.0;
                    for (std::size_t q = first; q < first + count; ++q) {
                        if (q != p) l *= (x - t[q]) / (t[p] - t[q]);
                    }
                    sum += l * f[p];
                }
                return sum;
            };
            const double mid = 0.5 * (a + b);
            piece = 0.5 * h * (interp(mid - g * h) + interp(mid + g * h));
        }
        acc[i + 1] = acc[i] + piece;
    }
    return acc;
}

std::vector<double> balance_residuals(const EnergyTrace& trace, TimeQuadrature rule) {
    const auto& s = trace.samples;
    std::vector<double> t(s.size()), f(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        t[k] = s[k].t;
        f[k] = s[k].dissipation + s[k].damping + s[k].delay;
    }
    const auto integral = cumulative_integral(t, f, rule, trace.breakpoints);
    std::vector<double> r(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        r[k] = s[k].energy + integral[k] - s.front().energy;
    }
    return r;
}

double balance_residual(const EnergyTrace& trace, TimeQuadrature rule) {
    if (trace.samples.empty()) return 0.0;
    return balance_residuals(trace, rule).back();
}

void fill_residuals(EnergyTrace& trace, TimeQuadrature rule) {
    const auto r = balance_residuals(trace, rule);
    for (std::size_t k = 0; k < r.size(); ++k) trace.samples[k].residual = r[k];
}

DecayFit fit_log_linear(std::span<const double> t, std::span<const double> values) {
    if (t.size() != values.size()) throw FitError("fit length mismatch");
    if (t.size() < 2) throw FitError("decay fit needs at least two samples in the window");
    const double n = static_cast<double>(t.size());
    double st = 0.0, sy = 0.0;
    std::vector<double> y(values.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(values[k] > 0.0)) throw FitError("decay fit requires strictly positive samples");
        y[k] = std::log(values[k]);
        st += t[k];
        sy += y[k];
    }
    const double tm = st / n, ym = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        stt += (t[k] - tm) * (t[k] - tm);
        sty += (t[k] - tm) * (y[k] - ym);
        syy += (y[k] - ym) * (y[k] - ym);
    }
    if (!(stt > 0.0)) throw FitError("decay fit window has no time extent");
    const double slope = sty / stt;
    DecayFit fit;
    fit.rate = -slope;
    fit.intercept = ym - slope * tm;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double e = y[k] - (fit.intercept + slope * t[k]);
        ss_res += e * e;
    }
    // a flat trace is perfectly described by its zero slope
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.samples = t.size();
    return fit;
}

DecayFit fit_decay_rate(const EnergyTrace& trace, double t1, double t2, Functional functional,
                        std::size_t sobolev_index) {
    if (functional == Functional::sobolev && sobolev_index >= trace.sobolev_orders.size()) {
        throw FitError("Sobolev trace index out of range");
    }
    std::vector<double> t, y;
    for (const TraceSample& s : trace.samples) {
        if (s.t < t1 || s.t > t2) continue;
        t.push_back(s.t);
        switch (functional) {
            case Functional::energy: y.push_back(s.energy); break;
            case Functional::lyapunov: y.push_back(s.lyapunov); break;
            case Functional::sobolev: y.push_back(s.sobolev.at(sobolev_index)); break;
        }
    }
    return fit_log_linear(t, y);
}

namespace {
void require_decayed(const Field& v, const char* what) {
    if (sup_norm(v) == 0.0) throw ConfigError(std::string(what) + " is undefined for a zero field");
    if (!(peak_to_boundary_ratio(v) > 1e10)) {
        throw ConfigError(std::string(what) + " requires a boundary-decayed field");
    }
}
}  // namespace

double check_interpolation_inequality(const Field& v) {
    require_decayed(v, "interpolation inequality");
    const double sup = sup_norm(v);
    return sup * sup / (2.0 * l2_norm(v) * l2_norm(spectral_derivative(v, 1)));
}

double gn_ratio(const Field& u, int m, int j) {
    if (m < 1 || m > j) throw ConfigError("Gagliardo-Nirenberg ratio needs 1 <= m <= j");
    if (sup_norm(u) == 0.0) throw ConfigError("Gagliardo-Nirenberg ratio is undefined for a zero field");
    const double theta = static_cast<double>(m) / static_cast<double>(j);
    const double num = l2_norm(spectral_derivative(u, m));
    const double top = l2_norm(spectral_derivative(u, j));
    return num / (std::pow(top, theta) * std::pow(l2_norm(u), 1.0 - theta));
}

double check_gn_ratio(const Field& u, int m, int j) {
    if (m < 1 || m > j) throw ConfigError("Gagliardo-Nirenberg ratio needs 1 <= m <= j");
    require_decayed(u, "Gagliardo-Nirenberg ratio");
    return gn_ratio(u, m, j);
}

void write_trace_csv(std::ostream& out, const EnergyTrace& trace,
                     std::span<const std::string> comments) {
    for (const std::string& c : comments) out << "# " << c << '\n';
    out << "t,E,scriptE,diss,damp,delay,residual";
    for (double s : trace.sobolev_orders) {
        std::array<char, 64> buf;
        std::snprintf(buf.data(), buf.size(), "%g", s);
        out << ",Hs_" << buf.data();
    }
    out << '\n';
    auto put = [&out](double v) {
        std::array<char, 40> buf;
        std::snprintf(buf.data(), buf.size(), "%.17g", v);
        out << buf.data();
    };
    for (const TraceSample& s : trace.samples) {
        put(s.t);
        for (double v : {s.energy, s.lyapunov, s.dissipation, s.damping, s.delay, s.residual}) {
            out << ',';
            put(v);
        }
        for (double v : s.sobolev) {
            out << ',';
            put(v);
        }
        out << '\n';
    }
}

}  // namespace dispersive
