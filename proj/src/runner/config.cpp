#include "dispersive/config.hpp"

#include "dispersive/errors.hpp"
#include "dispersive/spectral.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace dispersive {

namespace fs = std::filesystem;

namespace {

constexpr double kBoundaryDecay = 1e10;

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += sep;
        out += parts[k];
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    return std::all_of(key.begin(), key.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    });
}

std::optional<double> parse_real(const std::string& text) {
    if (text.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::optional<long long> parse_integer(const std::string& text) {
    if (text.empty()) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
    return v;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

// Every key the schema knows, so that a misplaced key can be told apart from
// a misspelled one.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k = {
            "params.j", "params.m", "params.p", "model.allow_unvalidated_power",
            "model.dissipation", "model.nonlinearity", "model.fold_constant_damping",
            "delay.tau", "delay.n_tau", "grid.L", "grid.N", "grid.x_min", "time.scheme",
            "time.dt", "time.T_final", "time.sample_stride", "time.delay_stages",
            "initial.kind", "initial.amplitude", "initial.center", "initial.width",
            "initial.power", "initial.wavenumber", "initial.phase", "initial.file",
            "history.kind", "history.alpha", "history.file", "certificate.attach",
            "certificate.q", "certificate.gamma0", "diagnostics.sobolev",
            "decay.window_start", "decay.window_end", "output.residual_quadrature",
            "validate.allow_boundary_mass"};
        for (const char* p : {"lambda0", "lambda"}) {
            for (const char* f : {"kind", "value", "center", "width", "radius", "amplitude",
                                  "baseline", "file"}) {
                k.insert(std::string(p) + "." + f);
            }
        }
        return k;
    }();
    return keys;
}

// Typed access to the entries. Each read marks a key consumed and records the
// value used; problems accumulate instead of throwing.
class Reader {
public:
    Reader(const ConfigEntries& entries, std::vector<std::string>& errors,
           ConfigEntries& resolved)
        : errors_(errors), resolved_(resolved) {
        for (const auto& [k, v] : entries) values_[k] = v;
    }

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    bool present(const std::string& key) const { return values_.count(key) != 0; }

    void record(const std::string& key, const std::string& value) {
        resolved_.emplace_back(key, value);
    }

    void error(const std::string& message) { errors_.push_back(message); }

    double real(const std::string& key, double fallback) {
        double v = fallback;
        if (auto text = raw(key)) {
            if (auto parsed = parse_real(*text)) {
                v = *parsed;
            } else {
                error(key + ": expected a finite real number, got '" + *text + "'");
            }
        }
        record(key, fmt_real(v));
        return v;
    }

    long long integer(const std::string& key, long long fallback) {
        long long v = fallback;
        if (auto text = raw(key)) {
            if (auto parsed = parse_integer(*text)) {
                v = *parsed;
            } else {
                error(key + ": expected an integer, got '" + *text + "'");
            }
        }
        record(key, std::to_string(v));
        return v;
    }

    bool boolean(const std::string& key, bool fallback) {
        bool v = fallback;
        if (auto text = raw(key)) {
            if (*text == "true") {
                v = true;
            } else if (*text == "false") {
                v = false;
            } else {
                error(key + ": expected true or false, got '" + *text + "'");
            }
        }
        record(key, v ? "true" : "false");
        return v;
    }

    std::string choice(const std::string& key, const std::string& fallback,
                       const std::vector<std::string>& allowed) {
        std::string v = fallback;
        if (auto text = raw(key)) {
            if (std::find(allowed.begin(), allowed.end(), *text) != allowed.end()) {
                v = *text;
            } else {
                error(key + ": '" + *text + "' is not one of " + join(allowed, ", "));
            }
        }
        record(key, v);
        return v;
    }

    /// Keys set in the document but never read.
    std::vector<std::string> unused() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_) {
            if (!used_.count(k)) out.push_back(k);
        }
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
    std::vector<std::string>& errors_;
    ConfigEntries& resolved_;
};

std::vector<std::vector<double>> read_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        while (ss >> tok) {
            auto v = parse_real(tok);
            if (!v) {
                throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                  ": not a finite number '" + tok + "'");
            }
            row.push_back(*v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// One value per grid point, optionally preceded by its x coordinate.
std::vector<double> read_profile_table(const fs::path& path, const Grid& grid) {
    const auto rows = read_table(path);
    if (rows.size() != grid.size()) {
        throw ConfigError(path.string() + ": expected " + std::to_string(grid.size()) +
                          " rows (one per grid point), found " + std::to_string(rows.size()));
    }
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() == 1) {
            values[i] = rows[i][0];
        } else if (rows[i].size() == 2) {
            if (std::fabs(rows[i][0] - grid.x(i)) > 1e-9 * std::max(1.0, std::fabs(grid.x(i)))) {
                throw ConfigError(path.string() + ": row " + std::to_string(i + 1) +
                                  " has x = " + fmt_real(rows[i][0]) +
                                  " but the grid point is " + fmt_real(grid.x(i)));
            }
            values[i] = rows[i][1];
        } else {
            throw ConfigError(path.string() + ": rows must hold 'value' or 'x value'");
        }
    }
    return values;
}

fs::path resolve_path(const std::string& text, const fs::path& base_dir) {
    fs::path p(text);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return fs::absolute(p).lexically_normal();
}

ProfileSpec read_profile(Reader& r, const std::string& prefix, double default_value,
                         const fs::path& base_dir) {
    ProfileSpec s;
    const auto kind = r.choice(prefix + ".kind", "constant", {"constant", "gaussian", "bump", "table"});
    if (kind == "constant") {
        s.kind = ProfileKind::constant;
        s.value = r.real(prefix + ".value", default_value);
    } else if (kind == "gaussian" || kind == "bump") {
        s.kind = kind == "gaussian" ? ProfileKind::gaussian : ProfileKind::bump;
        s.baseline = r.real(prefix + ".baseline", 0.0);
        s.amplitude = r.real(prefix + ".amplitude", 1.0);
        s.center = r.real(prefix + ".center", 0.0);
        if (s.kind == ProfileKind::gaussian) {
            s.width = r.real(prefix + ".width", 1.0);
            if (!(s.width > 0.0)) r.error(prefix + ".width must be positive");
        } else {
            s.radius = r.real(prefix + ".radius", 1.0);
            if (!(s.radius > 0.0)) r.error(prefix + ".radius must be positive");
        }
    } else {
        s.kind = ProfileKind::table;
        auto file = r.raw(prefix + ".file");
        if (!file) {
            r.error(prefix + ".file is required when " + prefix + ".kind = table");
            r.record(prefix + ".file", "");
        } else {
            s.file = resolve_path(*file, base_dir);
            r.record(prefix + ".file", s.file.string());
            if (!fs::exists(s.file)) r.error(prefix + ".file: " + s.file.string() + " does not exist");
        }
    }
    return s;
}

double profile_shape(const ProfileSpec& s, double x) {
    switch (s.kind) {
        case ProfileKind::gaussian: {
            const double z = (x - s.center) / s.width;
            return std::exp(-z * z);
        }
        case ProfileKind::bump: {
            const double z = (x - s.center) / s.radius;
            return std::fabs(z) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - z * z)) : 0.0;
        }
        default:
            return 0.0;
    }
}

Field sample_profile(const ProfileSpec& s, const GridPtr& grid) {
    switch (s.kind) {
        case ProfileKind::constant:
            return Field::constant(grid, s.value);
        case ProfileKind::table:
            return Field::physical(grid, read_profile_table(s.file, *grid));
        default:
            return Field::sample(grid, [&](double x) { return s.baseline + s.amplitude * profile_shape(s, x); });
    }
}

std::function<double(double)> initial_function(const InitialSpec& s) {
    switch (s.kind) {
        case InitialKind::gaussian:
            return [s](double x) {
                const double z = (x - s.center) / s.width;
                return s.amplitude * std::exp(-z * z);
            };
        case InitialKind::sech:
            return [s](double x) {
                const double z = (x - s.center) / s.width;
                return s.amplitude * std::pow(1.0 / std::cosh(z), s.power);
            };
        case InitialKind::sine:
            return [s](double x) { return s.amplitude * std::sin(s.wavenumber * x + s.phase); };
        default:
            return [](double) { return 0.0; };
    }
}

InitialSpec read_initial(Reader& r, const fs::path& base_dir, double length) {
    InitialSpec s;
    const auto kind = r.choice("initial.kind", "gaussian", {"gaussian", "sech", "sine", "zero", "table"});
    if (kind == "gaussian" || kind == "sech") {
        s.kind = kind == "gaussian" ? InitialKind::gaussian : InitialKind::sech;
        s.amplitude = r.real("initial.amplitude", 1.0);
        s.center = r.real("initial.center", 0.0);
        s.width = r.real("initial.width", 1.0);
        if (!(s.width > 0.0)) r.error("initial.width must be positive");
        if (s.kind == InitialKind::sech) {
            s.power = r.real("initial.power", 2.0);
            if (!(s.power > 0.0)) r.error("initial.power must be positive");
        }
    } else if (kind == "sine") {
        s.kind = InitialKind::sine;
        s.amplitude = r.real("initial.amplitude", 1.0);
        s.wavenumber = r.real("initial.wavenumber", 2.0 * std::numbers::pi / length);
        s.phase = r.real("initial.phase", 0.0);
        const double cycles = s.wavenumber * length / (2.0 * std::numbers::pi);
        if (length > 0.0 && std::fabs(cycles - std::round(cycles)) > 1e-9 * std::max(1.0, cycles)) {
            r.error("initial.wavenumber must be a multiple of 2*pi/grid.L to be periodic");
        }
    } else if (kind == "zero") {
        s.kind = InitialKind::zero;
    } else {
        s.kind = InitialKind::table;
        auto file = r.raw("initial.file");
        if (!file) {
            r.error("initial.file is required when initial.kind = table");
            r.record("initial.file", "");
        } else {
            s.file = resolve_path(*file, base_dir);
            r.record("initial.file", s.file.string());
            if (!fs::exists(s.file)) r.error("initial.file: " + s.file.string() + " does not exist");
        }
    }
    return s;
}

Field sample_initial(const InitialSpec& s, const GridPtr& grid) {
    if (s.kind == InitialKind::table) return Field::physical(grid, read_profile_table(s.file, *grid));
    return Field::sample(grid, initial_function(s));
}

std::vector<Field> read_history_table(const fs::path& path, const GridPtr& grid,
                                      std::size_t n_tau) {
    const auto rows = read_table(path);
    if (rows.size() != n_tau + 1) {
        throw ConfigError(path.string() + ": expected " + std::to_string(n_tau + 1) +
                          " rows (delay.n_tau + 1, oldest first), found " +
                          std::to_string(rows.size()));
    }
    std::vector<Field> slots;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].size() != grid->size()) {
            throw ConfigError(path.string() + ": row " + std::to_string(k + 1) + " has " +
                              std::to_string(rows[k].size()) + " values, expected " +
                              std::to_string(grid->size()));
        }
        slots.push_back(Field::physical(grid, rows[k]));
    }
    return slots;
}

void check_boundary_decay(const Field& f, const std::string& what, bool allowed,
                          std::vector<std::string>& errors) {
    if (allowed) return;
    const double ratio = peak_to_boundary_ratio(f);
    if (!(ratio > kBoundaryDecay)) {
        errors.push_back(what + ": peak-to-boundary ratio " + fmt_sci(ratio) +
                         " does not exceed 1e10 (widen grid.L or set "
                         "validate.allow_boundary_mass = true)");
    }
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> problems)
    : ConfigError(join(problems, "; ")), problems_(std::move(problems)) {}

ConfigEntries parse_config_text(const std::string& text) {
    ConfigEntries entries;
    std::map<std::string, std::size_t> seen;
    std::vector<std::string> errors;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Comments start at a '#' that opens the line or follows whitespace.
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string::npos) {
            errors.push_back(where + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) {
            errors.push_back(where + ": invalid key '" + key + "'");
            continue;
        }
        if (value.empty()) {
            errors.push_back(where + ": " + key + " has no value");
            continue;
        }
        if (auto it = seen.find(key); it != seen.end()) {
            errors.push_back(where + ": duplicate key " + key + " (first set on line " +
                             std::to_string(it->second) + ")");
            continue;
        }
        seen[key] = line_no;
        entries.emplace_back(key, value);
    }
    if (!errors.empty()) throw ConfigErrors(std::move(errors));
    return entries;
}

void apply_overrides(ConfigEntries& entries, const std::vector<std::string>& overrides) {
    std::vector<std::string> errors;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            errors.push_back("override '" + o + "' is not key=value");
            continue;
        }
        const std::string key = trim(o.substr(0, eq));
        const std::string value = trim(o.substr(eq + 1));
        if (!valid_key(key) || value.empty()) {
            errors.push_back("override '" + o + "' is not key=value");
            continue;
        }
        auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const auto& e) { return e.first == key; });
        if (it != entries.end()) {
            it->second = value;
        } else {
            entries.emplace_back(key, value);
        }
    }
    if (!errors.empty()) throw ConfigErrors(std::move(errors));
}

RunConfig validate_config(const ConfigEntries& entries, const fs::path& base_dir) {
    RunConfig c;
    std::vector<std::string> errors;
    Reader r(entries, errors, c.resolved);

    c.params.j = static_cast<int>(r.integer("params.j", 1));
    c.params.m = static_cast<int>(r.integer("params.m", 1));
    c.params.p = static_cast<int>(r.integer("params.p", 1));
    c.params.allow_unvalidated_power = r.boolean("model.allow_unvalidated_power", false);
    try {
        c.params.validate();
    } catch (const ConfigError& e) {
        errors.push_back(e.what());
    }
    c.dissipation_on = r.boolean("model.dissipation", true);
    c.nonlinearity_on = r.boolean("model.nonlinearity", true);
    c.fold_constant_damping = r.boolean("model.fold_constant_damping", false);

    c.tau = r.real("delay.tau", 0.0);
    if (!(c.tau >= 0.0)) errors.push_back("delay.tau must be nonnegative");
    if (c.tau > 0.0) {
        if (!r.present("delay.n_tau")) {
            errors.push_back("delay.n_tau is required when delay.tau > 0 (alignment rule: "
                             "time.dt * delay.n_tau = delay.tau)");
        }
        const long long n = r.integer("delay.n_tau", 0);
        if (n < 1 && r.present("delay.n_tau")) errors.push_back("delay.n_tau must be >= 1");
        c.n_tau = n > 0 ? static_cast<std::size_t>(n) : 0;
    } else if (r.present("delay.n_tau")) {
        const long long n = r.integer("delay.n_tau", 0);
        if (n < 0) errors.push_back("delay.n_tau must be >= 0");
        c.n_tau = 0;
    }

    c.length = r.real("grid.L", 40.0);
    const long long points = r.integer("grid.N", 256);
    if (points < 8 || points % 2 != 0) {
        errors.push_back("grid.N must be even and at least 8, got " + std::to_string(points));
    }
    c.points = points > 0 ? static_cast<std::size_t>(points) : 0;
    if (!(c.length > 0.0)) errors.push_back("grid.L must be positive");
    c.x_min = r.real("grid.x_min", -0.5 * c.length);

    const auto scheme = r.choice("time.scheme", "etdrk4", {"etd1", "etdrk4"});
    c.scheme = parse_scheme(scheme);
    c.delay_stages = parse_delay_stages(
        r.choice("time.delay_stages", "interpolated", {"interpolated", "frozen"}));
    if (c.tau > 0.0 && c.n_tau > 0) {
        const double aligned = c.tau / static_cast<double>(c.n_tau);
        if (auto text = r.raw("time.dt")) {
            auto given = parse_real(*text);
            if (!given) {
                errors.push_back("time.dt: expected a finite real number, got '" + *text + "'");
            } else if (std::fabs(*given - aligned) > 1e-12 * aligned) {
                errors.push_back("time.dt = " + *text + " violates the alignment rule time.dt * "
                                 "delay.n_tau = delay.tau (expected " + fmt_real(aligned) + ")");
            }
        }
        c.dt = aligned;
        r.record("time.dt", fmt_real(c.dt));
    } else {
        c.dt = r.real("time.dt", 0.01);
        if (!(c.dt > 0.0)) errors.push_back("time.dt must be positive");
    }
    c.t_final = r.real("time.T_final", 1.0);
    if (!(c.t_final >= 0.0)) {
        errors.push_back("time.T_final must be nonnegative");
    } else if (c.dt > 0.0) {
        try {
            steps_to_reach(c.t_final, c.dt);
        } catch (const ConfigError&) {
            errors.push_back("time.T_final = " + fmt_real(c.t_final) +
                             " is not an integer multiple of time.dt = " + fmt_real(c.dt));
        }
    }
    const long long stride = r.integer("time.sample_stride", 1);
    if (stride < 1) errors.push_back("time.sample_stride must be >= 1");
    c.sample_stride = stride > 0 ? static_cast<std::size_t>(stride) : 1;

    c.lambda0 = read_profile(r, "lambda0", 1.0, base_dir);
    c.lambda = read_profile(r, "lambda", 0.0, base_dir);
    if (c.tau > 0.0) {
        const auto kind = r.choice("history.kind", "constant", {"constant", "exponential", "table"});
        if (kind == "constant") {
            c.history.kind = HistoryKind::constant;
        } else if (kind == "exponential") {
            c.history.kind = HistoryKind::exponential;
            c.history.alpha = r.real("history.alpha", 1.0);
        } else {
            c.history.kind = HistoryKind::table;
            auto file = r.raw("history.file");
            if (!file) {
                errors.push_back("history.file is required when history.kind = table");
                r.record("history.file", "");
            } else {
                c.history.file = resolve_path(*file, base_dir);
                r.record("history.file", c.history.file.string());
                if (!fs::exists(c.history.file)) {
                    errors.push_back("history.file: " + c.history.file.string() + " does not exist");
                }
            }
        }
    }

    // A table history carries u(0) as its newest row.
    if (c.history.kind != HistoryKind::table) c.initial = read_initial(r, base_dir, c.length);

    c.certificate.attach = r.boolean("certificate.attach", false);
    c.certificate.q = r.real("certificate.q", 2.0);
    if (!(c.certificate.q >= 1.0)) errors.push_back("certificate.q must be >= 1");
    if (auto text = r.raw("certificate.gamma0"); text && *text != "auto") {
        if (auto v = parse_real(*text); v && *v > 0.0) {
            c.certificate.gamma0 = *v;
            r.record("certificate.gamma0", fmt_real(*v));
        } else {
            errors.push_back("certificate.gamma0 must be 'auto' or a positive number, got '" +
                             *text + "'");
            r.record("certificate.gamma0", *text);
        }
    } else {
        r.record("certificate.gamma0", "auto");
    }

    {
        std::vector<double> orders = {0.0, static_cast<double>(c.params.j),
                                      static_cast<double>(2 * c.params.j + 1)};
        if (auto text = r.raw("diagnostics.sobolev")) {
            orders.clear();
            for (const auto& item : split_list(*text)) {
                auto v = parse_real(item);
                if (!v || *v < 0.0) {
                    errors.push_back("diagnostics.sobolev: '" + item + "' is not a nonnegative order");
                } else {
                    orders.push_back(*v);
                }
            }
        }
        c.sobolev_orders = orders;
        std::vector<std::string> shown;
        for (double s : orders) shown.push_back(fmt_real(s));
        r.record("diagnostics.sobolev", join(shown, ", "));
    }

    {
        double start = std::max(2.0 * c.tau, 1.0);
        if (!(start < c.t_final)) start = 0.5 * c.t_final;
        c.window_start = r.real("decay.window_start", start);
        c.window_end = r.real("decay.window_end", c.t_final);
        if (c.t_final > 0.0 &&
            !(c.window_start >= 0.0 && c.window_start < c.window_end && c.window_end <= c.t_final)) {
            errors.push_back("decay window must satisfy 0 <= decay.window_start < "
                             "decay.window_end <= time.T_final");
        }
    }
    c.residual_rule = r.choice("output.residual_quadrature", "cubic", {"cubic", "trapezoid"}) == "cubic"
                          ? TimeQuadrature::cubic
                          : TimeQuadrature::trapezoid;
    c.allow_boundary_mass = r.boolean("validate.allow_boundary_mass", false);

    for (const auto& key : r.unused()) {
        if (known_keys().count(key)) {
            errors.push_back(key + " does not apply to this configuration (check the "
                             "corresponding kind or delay.tau)");
        } else {
            errors.push_back("unknown key " + key);
        }
    }
    // Sample everything once so that shape problems surface here.
    if (errors.empty()) {
        try {
            Problem problem = build_problem(c);
            const bool allow = c.allow_boundary_mass;
            check_boundary_decay(problem.history.newest(), "initial data", allow, errors);
            for (const auto* spec : {&c.lambda0, &c.lambda}) {
                if (spec->kind != ProfileKind::gaussian && spec->kind != ProfileKind::bump) continue;
                if (spec->amplitude == 0.0) continue;
                ProfileSpec shape = *spec;
                shape.baseline = 0.0;
                check_boundary_decay(sample_profile(shape, problem.grid),
                                     spec == &c.lambda0 ? "lambda0 profile" : "lambda profile",
                                     allow, errors);
            }
        } catch (const ConfigError& e) {
            errors.push_back(e.what());
        }
    }
    if (!errors.empty()) throw ConfigErrors(std::move(errors));
    return c;
}

RunConfig validate_config_text(const std::string& text, const std::vector<std::string>& overrides,
                               const fs::path& base_dir) {
    ConfigEntries entries = parse_config_text(text);
    apply_overrides(entries, overrides);
    return validate_config(entries, base_dir);
}

std::vector<std::string> resolved_lines(const RunConfig& config) {
    std::vector<std::string> lines;
    for (const auto& [k, v] : config.resolved) lines.push_back(k + " = " + v);
    return lines;
}

std::string resolved_text(const RunConfig& config) {
    std::string out;
    for (const auto& line : resolved_lines(config)) out += line + "\n";
    return out;
}

std::string embedded_config(const fs::path& output_file) {
    std::ifstream in(output_file);
    if (!in) throw ConfigError("cannot open " + output_file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();
    const auto start = content.find_first_not_of(" \t\r\n");
    if (start != std::string::npos && content[start] == '{') {
        nlohmann::ordered_json doc;
        try {
            doc = nlohmann::ordered_json::parse(content);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(output_file.string() + ": " + e.what());
        }
        if (!doc.contains("config") || !doc["config"].is_object()) {
            throw ConfigError(output_file.string() + " has no embedded config object");
        }
        std::string text;
        for (const auto& [k, v] : doc["config"].items()) {
            text += k + " = " + v.get<std::string>() + "\n";
        }
        return text;
    }
    std::string text, line;
    std::istringstream lines(content);
    while (std::getline(lines, line)) {
        if (line.rfind("# ", 0) != 0) break;
        text += line.substr(2) + "\n";
    }
    if (text.empty()) throw ConfigError(output_file.string() + " has no embedded config");
    return text;
}

Problem build_problem(const RunConfig& c) {
    Problem p;
    p.grid = Grid::make(c.length, c.points, c.x_min);
    Field lambda0 = sample_profile(c.lambda0, p.grid);
    Field lambda = sample_profile(c.lambda, p.grid);
    double baseline = 0.0;
    if (c.lambda0.kind == ProfileKind::constant) baseline = c.lambda0.value;
    if (c.lambda0.kind == ProfileKind::gaussian || c.lambda0.kind == ProfileKind::bump) {
        baseline = c.lambda0.baseline;
    }
    p.coeffs = CoefficientSet::make(c.params, c.tau, std::move(lambda0), std::move(lambda), baseline);
    p.coeffs.dissipation_on = c.dissipation_on;
    p.coeffs.nonlinearity_on = c.nonlinearity_on;

    if (c.tau > 0.0) {
        if (c.history.kind == HistoryKind::table) {
            p.history = DelayHistory::from_slots(p.grid, c.tau, c.n_tau,
                                                 read_history_table(c.history.file, p.grid, c.n_tau));
        } else {
            const Field u0 = sample_initial(c.initial, p.grid);
            const auto values = u0.values();
            const double x0 = p.grid->x_min(), dx = p.grid->spacing();
            const double alpha = c.history.kind == HistoryKind::exponential ? c.history.alpha : 0.0;
            // Profiles are evaluated on grid points only, so look them up by index.
            auto profile = [&](double x, double s) {
                const auto i = static_cast<std::size_t>(std::llround((x - x0) / dx));
                return values[i] * std::exp(alpha * s);
            };
            p.history = DelayHistory::init(profile, p.grid, c.tau, c.n_tau);
        }
    } else {
        const Field u0 = sample_initial(c.initial, p.grid);
        const auto values = u0.values();
        const double x0 = p.grid->x_min(), dx = p.grid->spacing();
        auto profile = [&](double x, double) {
            return values[static_cast<std::size_t>(std::llround((x - x0) / dx))];
        };
        p.history = DelayHistory::init(profile, p.grid, 0.0, 0, c.dt);
    }

    p.stepper.scheme = c.scheme;
    p.stepper.dt = c.dt;
    p.stepper.fold_constant_damping = c.fold_constant_damping;
    p.stepper.delay_stages = c.delay_stages;
    p.run.t_final = c.t_final;
    p.run.sample_stride = c.sample_stride;
    p.run.sobolev_orders = c.sobolev_orders;
    p.run.residual_rule = c.residual_rule;
    return p;
}

}  // namespace dispersive
