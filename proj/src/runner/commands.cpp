#include "dispersive/commands.hpp"

#include "dispersive/diagnostics.hpp"
#include "dispersive/errors.hpp"
#include "dispersive/spectral.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace dispersive {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json config_json(const RunConfig& config) {
    Json j = Json::object();
    for (const auto& [k, v] : config.resolved) j[k] = v;
    return j;
}

void write_json(const fs::path& path, const Json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

void write_trace(const fs::path& path, const RunConfig& config, const EnergyTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const auto lines = resolved_lines(config);
    write_trace_csv(out, trace, lines);
}

Json certificate_json(const StabilityCertificate& c) {
    Json conditions = Json::array();
    for (const auto& k : c.conditions) {
        conditions.push_back({{"name", k.name},
                              {"lhs", k.lhs},
                              {"rhs", k.rhs},
                              {"satisfied", k.satisfied},
                              {"margin", k.margin},
                              {"strict", k.strict}});
    }
    return Json{{"theorem", to_string(c.theorem)},
                {"status", to_string(c.status)},
                {"satisfied", c.satisfied()},
                {"q", c.q},
                {"gamma0", c.gamma0},
                {"gamma", c.gamma},
                {"norms",
                 {{"beta", c.beta_norm}, {"beta0", c.beta0_norm}, {"combined", c.combined_norm}}},
                {"rate", c.rate},
                {"rate_uncapped", c.rate_uncapped},
                {"envelope_constant", c.envelope_constant},
                {"conditions", conditions},
                {"note", c.note}};
}

StabilityCertificate make_certificate(const RunConfig& config, const Problem& problem) {
    StabilityCertificate cert =
        config.certificate.gamma0
            ? certify_indefinite(problem.coeffs, config.certificate.q, *config.certificate.gamma0)
            : certify_constant_sign(problem.coeffs, config.certificate.q);
    cert.envelope_constant = envelope_constant(problem.history, problem.coeffs.lambda);
    return cert;
}

Json fit_json(const EnergyTrace& trace, double t1, double t2, Functional f, std::size_t index = 0) {
    try {
        const DecayFit fit = fit_decay_rate(trace, t1, t2, f, index);
        return Json{{"rate", fit.rate},
                    {"intercept", fit.intercept},
                    {"r_squared", fit.r_squared},
                    {"samples", fit.samples}};
    } catch (const FitError& e) {
        return Json{{"error", e.what()}};
    }
}

Json fits_json(const RunConfig& config, const EnergyTrace& trace) {
    Json sobolev = Json::array();
    for (std::size_t k = 0; k < trace.sobolev_orders.size(); ++k) {
        Json entry = fit_json(trace, config.window_start, config.window_end, Functional::sobolev, k);
        entry["s"] = trace.sobolev_orders[k];
        sobolev.push_back(entry);
    }
    return Json{{"window", {config.window_start, config.window_end}},
                {"energy", fit_json(trace, config.window_start, config.window_end, Functional::energy)},
                {"scriptE",
                 fit_json(trace, config.window_start, config.window_end, Functional::lyapunov)},
                {"sobolev", sobolev}};
}

Json final_json(const SimState& state, const std::vector<double>& orders) {
    const Field& u = state.u();
    Json sobolev = Json::array();
    for (double s : orders) sobolev.push_back({{"s", s}, {"norm", sobolev_norm(u, s)}});
    return Json{{"t", state.t()},
                {"E", energy(u)},
                {"scriptE", lyapunov(state)},
                {"l2", l2_norm(u)},
                {"sup", sup_norm(u)},
                {"sobolev", sobolev}};
}

Json residual_json(const EnergyTrace& trace) {
    if (trace.samples.empty()) return Json{};
    double worst = 0.0;
    for (const auto& s : trace.samples) worst = std::max(worst, std::fabs(s.residual));
    const double e0 = trace.samples.front().energy;
    const double last = trace.samples.back().residual;
    return Json{{"final", last},
                {"max_abs", worst},
                {"relative_final", e0 > 0.0 ? Json(last / e0) : Json(nullptr)}};
}

struct EnvelopeCheck {
    bool checked = false;
    bool ok = false;
    double worst_ratio = 0.0;  // max scriptE / (C e^{-rate t})
    double first_violation = -1.0;
    std::string reason;
};

EnvelopeCheck check_envelope(const StabilityCertificate& cert, const EnergyTrace& trace) {
    EnvelopeCheck e;
    if (!cert.satisfied()) {
        e.reason = "certificate not satisfied";
        return e;
    }
    e.checked = true;
    e.ok = true;
    const double c = cert.envelope_constant;
    for (const auto& s : trace.samples) {
        const double bound = c * std::exp(-cert.rate * s.t);
        const double ratio = bound > 0.0 ? s.lyapunov / bound : (s.lyapunov > 0.0 ? INFINITY : 0.0);
        e.worst_ratio = std::max(e.worst_ratio, ratio);
        if (!(s.lyapunov <= (1.0 + kEnvelopeSlack) * bound)) {
            if (e.ok) e.first_violation = s.t;
            e.ok = false;
        }
    }
    return e;
}

Json envelope_json(const EnvelopeCheck& e, const StabilityCertificate& cert) {
    Json j{{"checked", e.checked}, {"slack", kEnvelopeSlack}};
    if (!e.checked) {
        j["reason"] = e.reason;
        return j;
    }
    j["ok"] = e.ok;
    j["rate"] = cert.rate;
    j["constant"] = cert.envelope_constant;
    j["worst_ratio"] = e.worst_ratio;
    j["first_violation_t"] = e.first_violation >= 0.0 ? Json(e.first_violation) : Json(nullptr);
    return j;
}

void prepare_dir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw std::runtime_error("cannot create " + out.string() + ": " + ec.message());
}

struct Simulation {
    Problem problem;
    StabilityCertificate certificate;
    bool have_certificate = false;
    SimState state;
    RunResult result;
};

Simulation simulate(const RunConfig& config, bool certify) {
    Problem problem = build_problem(config);
    StabilityCertificate cert;
    if (certify) cert = make_certificate(config, problem);
    SimState state(problem.coeffs, problem.history, problem.stepper);
    RunResult result = run(state, problem.run);
    return Simulation{std::move(problem), std::move(cert), certify, std::move(state),
                      std::move(result)};
}

}  // namespace

int cmd_simulate(const RunConfig& config, const fs::path& out, std::ostream& log) {
    prepare_dir(out);
    Simulation sim = simulate(config, config.certificate.attach);
    write_trace(out / "trace.csv", config, sim.result.trace);

    Json summary{{"command", "simulate"}, {"config", config_json(config)}};
    summary["diverged"] = sim.result.diverged;
    if (sim.result.diverged) summary["diagnostic"] = sim.result.diagnostic;
    summary["samples"] = sim.result.trace.samples.size();
    summary["final"] = final_json(sim.state, config.sobolev_orders);
    summary["residual"] = residual_json(sim.result.trace);
    summary["fits"] = fits_json(config, sim.result.trace);
    if (sim.have_certificate) {
        const EnvelopeCheck env = check_envelope(sim.certificate, sim.result.trace);
        summary["certificate"] = certificate_json(sim.certificate);
        summary["envelope"] = envelope_json(env, sim.certificate);
        summary["envelope_ok"] = env.checked ? Json(env.ok) : Json(nullptr);
    }
    write_json(out / "summary.json", summary);
    if (sim.result.diverged) {
        log << "diverged at t = " << sim.state.t() << ": " << sim.result.diagnostic << "\n";
        return kExitDiverged;
    }
    log << "simulate: " << sim.result.trace.samples.size() << " samples written to "
        << (out / "trace.csv").string() << "\n";
    return kExitOk;
}

int cmd_certify(const RunConfig& config, const fs::path& out, std::ostream& log) {
    prepare_dir(out);
    const Problem problem = build_problem(config);
    const StabilityCertificate cert = make_certificate(config, problem);
    Json doc = certificate_json(cert);
    doc["command"] = "certify";
    doc["config"] = config_json(config);
    write_json(out / "certificate.json", doc);
    log << "certify: " << to_string(cert.theorem) << " " << to_string(cert.status)
        << ", rate " << cert.rate << "\n";
    return kExitOk;
}

int cmd_convergence(const RunConfig& config, const fs::path& out, std::ostream& log) {
    prepare_dir(out);
    constexpr int kLevels = 4;
    std::vector<Field> finals;
    Json levels = Json::array();
    for (int k = 0; k < kLevels; ++k) {
        RunConfig level = config;
        const double scale = std::ldexp(1.0, k);
        level.dt = config.dt / scale;
        if (config.tau > 0.0) level.n_tau = config.n_tau * static_cast<std::size_t>(scale);
        Problem problem = build_problem(level);
        SimState state(problem.coeffs, problem.history, problem.stepper);
        const std::size_t steps = steps_to_reach(level.t_final, state.dt());
        for (std::size_t n = 0; n < steps; ++n) {
            if (!state.step()) {
                Json doc{{"command", "convergence"},
                         {"config", config_json(config)},
                         {"diverged", true},
                         {"level", k},
                         {"diagnostic", state.failure()}};
                write_json(out / "convergence.json", doc);
                log << "convergence: level " << k << " diverged: " << state.failure() << "\n";
                return kExitDiverged;
            }
        }
        levels.push_back({{"dt", state.dt()}, {"steps", steps}, {"final_l2", l2_norm(state.u())}});
        finals.push_back(state.u());
    }

    const double scale = std::max(l2_norm(finals.back()), 1e-300);
    std::vector<double> diffs;
    for (int k = 0; k + 1 < kLevels; ++k) {
        Field d = finals[k];
        auto dv = d.values();
        const auto next = finals[k + 1].values();
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] -= next[i];
        diffs.push_back(l2_norm(d) / scale);
    }
    // Differences this small are rounding noise; no order can be read off.
    constexpr double kExactFloor = 1e-12;
    const bool exact = std::all_of(diffs.begin(), diffs.end(), [](double d) { return d < kExactFloor; });
    Json orders = Json::array();
    double observed = NAN;
    if (!exact) {
        for (std::size_t k = 0; k + 1 < diffs.size(); ++k) {
            const double o = std::log2(diffs[k] / diffs[k + 1]);
            orders.push_back(o);
            observed = o;
        }
    }
    const double nominal = config.scheme == Scheme::etd1 ? 1.0 : 4.0;
    constexpr double kTolerance = 0.2;
    const bool within = exact || std::fabs(observed - nominal) <= kTolerance;
    Json doc{{"command", "convergence"},
             {"config", config_json(config)},
             {"diverged", false},
             {"scheme", to_string(config.scheme)},
             {"levels", levels},
             {"relative_differences", diffs},
             {"orders", orders},
             {"observed_order", exact ? Json(nullptr) : Json(observed)},
             {"nominal_order", nominal},
             {"tolerance", kTolerance},
             {"exact", exact},
             {"within_tolerance", within}};
    write_json(out / "convergence.json", doc);
    if (exact) {
        log << "convergence: differences at rounding level (exact)\n";
    } else {
        log << "convergence: observed order " << observed << " (nominal " << nominal << ")\n";
    }
    return kExitOk;
}

int cmd_decay_study(const RunConfig& config, const fs::path& out, std::ostream& log) {
    prepare_dir(out);
    Simulation sim = simulate(config, true);
    write_trace(out / "trace.csv", config, sim.result.trace);
    const EnvelopeCheck env = check_envelope(sim.certificate, sim.result.trace);

    Json doc{{"command", "decay-study"}, {"config", config_json(config)}};
    doc["diverged"] = sim.result.diverged;
    if (sim.result.diverged) doc["diagnostic"] = sim.result.diagnostic;
    doc["certificate"] = certificate_json(sim.certificate);
    doc["fits"] = fits_json(config, sim.result.trace);
    doc["envelope"] = envelope_json(env, sim.certificate);
    const Json& scriptE = doc["fits"]["scriptE"];
    if (sim.certificate.satisfied() && scriptE.contains("rate")) {
        doc["scriptE_rate_at_least_certified"] = scriptE["rate"].get<double>() >= sim.certificate.rate;
    }
    doc["final"] = final_json(sim.state, config.sobolev_orders);
    doc["residual"] = residual_json(sim.result.trace);
    write_json(out / "decay_report.json", doc);
    if (sim.result.diverged) {
        log << "decay-study: diverged: " << sim.result.diagnostic << "\n";
        return kExitDiverged;
    }
    log << "decay-study: certificate " << to_string(sim.certificate.status);
    if (env.checked) log << ", envelope " << (env.ok ? "holds" : "violated");
    log << "\n";
    return kExitOk;
}

namespace {

int dispatch(const std::string& command, const RunConfig& config, const fs::path& out,
             std::ostream& log) {
    if (command == "simulate") return cmd_simulate(config, out, log);
    if (command == "certify") return cmd_certify(config, out, log);
    if (command == "convergence") return cmd_convergence(config, out, log);
    if (command == "decay-study") return cmd_decay_study(config, out, log);
    throw ConfigError("unknown command " + command);
}

// Runs one command, turning failures into exit codes.
int guarded(const std::function<int()>& body, std::ostream& log) {
    try {
        return body();
    } catch (const ConfigErrors& e) {
        for (const auto& p : e.problems()) log << "config error: " << p << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DivergenceError& e) {
        log << "diverged: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int cmd_sweep(const ConfigEntries& base, const fs::path& base_dir, const fs::path& out,
              unsigned threads, std::ostream& log) {
    ConfigEntries plain;
    std::map<std::string, std::vector<std::string>> axes;
    std::string command = "simulate";
    for (const auto& [k, v] : base) {
        if (k == "sweep.command") {
            command = v;
        } else if (k.rfind("sweep.", 0) == 0) {
            std::vector<std::string> values;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto a = item.find_first_not_of(" \t");
                const auto b = item.find_last_not_of(" \t");
                if (a == std::string::npos) throw ConfigError(k + " has an empty value");
                values.push_back(item.substr(a, b - a + 1));
            }
            axes[k.substr(6)] = values;
        } else {
            plain.emplace_back(k, v);
        }
    }
    if (command == "sweep") throw ConfigError("sweep.command cannot be sweep");
    if (axes.empty()) throw ConfigError("sweep needs at least one sweep.<key> = v1, v2, ... axis");

    // Cartesian product in key order, last axis varying fastest.
    std::vector<std::vector<std::pair<std::string, std::string>>> combos(1);
    for (const auto& [key, values] : axes) {
        std::vector<std::vector<std::pair<std::string, std::string>>> next;
        for (const auto& partial : combos) {
            for (const auto& v : values) {
                auto c = partial;
                c.emplace_back(key, v);
                next.push_back(std::move(c));
            }
        }
        combos = std::move(next);
    }

    // Validate everything before running anything.
    std::vector<RunConfig> configs;
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < combos.size(); ++i) {
        ConfigEntries entries = plain;
        std::vector<std::string> overrides;
        for (const auto& [k, v] : combos[i]) overrides.push_back(k + "=" + v);
        try {
            apply_overrides(entries, overrides);
            configs.push_back(validate_config(entries, base_dir));
        } catch (const ConfigErrors& e) {
            for (const auto& p : e.problems()) problems.push_back("run " + std::to_string(i) + ": " + p);
        }
    }
    if (!problems.empty()) throw ConfigErrors(problems);

    prepare_dir(out);
    std::vector<int> codes(configs.size(), 0);
    std::vector<std::string> logs(configs.size());
    auto dir_name = [](std::size_t i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "run_%04zu", i);
        return std::string(buf);
    };
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            std::ostringstream run_log;
            codes[i] = guarded([&] { return dispatch(command, configs[i], out / dir_name(i), run_log); },
                               run_log);
            logs[i] = run_log.str();
        }
    };
    const unsigned n_workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Json runs = Json::array();
    int exit_code = kExitOk;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        Json settings = Json::object();
        for (const auto& [k, v] : combos[i]) settings[k] = v;
        const char* status = codes[i] == kExitOk ? "ok" : codes[i] == kExitDiverged ? "diverged" : "error";
        runs.push_back({{"index", i}, {"dir", dir_name(i)}, {"settings", settings},
                        {"exit_code", codes[i]}, {"status", status}});
        exit_code = std::max(exit_code, codes[i]);
        log << dir_name(i) << ": " << logs[i];
    }
    Json axes_json = Json::object();
    for (const auto& [k, v] : axes) axes_json[k] = v;
    Json base_json = Json::object();
    for (const auto& [k, v] : plain) base_json[k] = v;
    write_json(out / "index.json", Json{{"command", command},
                                        {"base", base_json},
                                        {"axes", axes_json},
                                        {"runs", runs}});
    return exit_code;
}

int run_invocation(const Invocation& inv, std::ostream& log) {
    return guarded(
        [&] {
            ConfigEntries entries = parse_config_text(inv.config_text);
            apply_overrides(entries, inv.overrides);
            if (inv.command == "sweep") {
                return cmd_sweep(entries, inv.config_dir, inv.out, inv.threads, log);
            }
            for (const auto& [k, v] : entries) {
                if (k.rfind("sweep.", 0) == 0) {
                    throw ConfigError(k + " is only meaningful for the sweep command");
                }
            }
            const RunConfig config = validate_config(entries, inv.config_dir);
            return dispatch(inv.command, config, inv.out, log);
        },
        log);
}

}  // namespace dispersive
