#include "dispersive/commands.hpp"
#include "dispersive/config.hpp"
#include "dispersive/errors.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace dispersive;
namespace fs = std::filesystem;

namespace {

std::string value_of(const RunConfig& c, const std::string& key) {
    for (const auto& [k, v] : c.resolved) {
        if (k == key) return v;
    }
    return "<missing>";
}

std::vector<std::string> problems_of(const std::string& text, const std::vector<std::string>& o = {}) {
    try {
        validate_config_text(text, o);
    } catch (const ConfigErrors& e) {
        return e.problems();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("dispersive_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

const char* kSmall = "grid.N = 64\ntime.T_final = 0.1\n";

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("defaults are resolved and echoed") {
    const RunConfig c = validate_config_text("");
    CHECK(c.params.j == 1);
    CHECK(c.points == 256);
    CHECK(c.length == 40.0);
    CHECK(c.x_min == -20.0);
    CHECK(c.scheme == Scheme::etdrk4);
    CHECK(c.dt == 0.01);
    CHECK(value_of(c, "grid.N") == "256");
    CHECK(value_of(c, "time.scheme") == "etdrk4");
    CHECK(value_of(c, "lambda0.kind") == "constant");
    CHECK(value_of(c, "certificate.gamma0") == "auto");
    CHECK(value_of(c, "diagnostics.sobolev") == "0, 1, 3");
    CHECK(value_of(c, "history.kind") == "<missing>");
}

TEST_CASE("delay alignment rule") {
    CHECK(any_contains(problems_of("delay.tau = 0.1\n"), "delay.n_tau is required"));
    const RunConfig c = validate_config_text("delay.tau = 0.1\ndelay.n_tau = 20\nlambda.value = 0.2\n");
    CHECK(c.dt == doctest::Approx(0.005).epsilon(1e-15));
    CHECK(value_of(c, "history.kind") == "constant");
    CHECK(any_contains(problems_of("delay.tau = 0.1\ndelay.n_tau = 20\ntime.dt = 0.01\n"), "alignment rule"));
    CHECK(problems_of("delay.tau = 0.1\ndelay.n_tau = 20\ntime.dt = 0.005\n").empty());
}

TEST_CASE("problems are collected, not stopped at the first") {
    const auto p = problems_of("grid.N = 63\ntime.scheme = rk9\nbogus.key = 1\ntime.T_final = 0.015\n");
    CHECK(p.size() >= 3);
    CHECK(any_contains(p, "grid.N must be even"));
    CHECK(any_contains(p, "time.scheme"));
    CHECK(any_contains(p, "unknown key bogus.key"));
    CHECK(any_contains(problems_of("lambda0.width = 2\n"), "does not apply"));
}

TEST_CASE("document syntax") {
    CHECK_THROWS_AS(parse_config_text("grid.N = 8\ngrid.N = 16\n"), ConfigErrors);
    CHECK_THROWS_AS(parse_config_text("grid.N 8\n"), ConfigErrors);
    CHECK_THROWS_AS(parse_config_text("grid.N =\n"), ConfigErrors);
    const auto e = parse_config_text("# header\n  grid.L = 30  # trailing\nfile = a#b\n");
    REQUIRE(e.size() == 2);
    CHECK(e[0].second == "30");
    CHECK(e[1].second == "a#b");
}

TEST_CASE("overrides replace or add keys") {
    ConfigEntries e = parse_config_text("grid.N = 64\n");
    apply_overrides(e, {"grid.N=128", "params.j = 2"});
    REQUIRE(e.size() == 2);
    CHECK(e[0].second == "128");
    CHECK(e[1] == std::pair<std::string, std::string>("params.j", "2"));
    CHECK_THROWS_AS(apply_overrides(e, {"novalue"}), ConfigErrors);
}

TEST_CASE("resolved text round-trips") {
    const RunConfig a = validate_config_text("params.j = 2\nlambda0.kind = gaussian\nlambda0.baseline = 1\n"
                                             "lambda0.amplitude = -0.3\ninitial.kind = sech\n");
    const RunConfig b = validate_config_text(resolved_text(a));
    CHECK(a.resolved == b.resolved);
}

TEST_CASE("boundary decay is enforced unless allowed") {
    const std::string wide = "initial.width = 8\n";
    CHECK(any_contains(problems_of(wide), "1e10"));
    CHECK(problems_of(wide + "validate.allow_boundary_mass = true\n").empty());
    CHECK(problems_of("initial.kind = sine\n").size() == 1);
    CHECK(problems_of("initial.kind = sine\ngrid.L = 6.283185307179586\ninitial.wavenumber = 1\n"
                      "validate.allow_boundary_mass = true\n").empty());
}

TEST_CASE("zero data yields an all-zero trace") {
    TempDir dir("zero");
    const RunConfig c = validate_config_text(std::string(kSmall) + "initial.kind = zero\n");
    std::ostringstream log;
    REQUIRE(cmd_simulate(c, dir.path, log) == kExitOk);
    std::ifstream in(dir.path / "trace.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        ++rows;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        while (std::getline(ss, cell, ',')) CHECK(std::stod(cell) == 0.0);
    }
    CHECK(rows == 11);
}

TEST_CASE("table profiles and histories") {
    TempDir dir("tables");
    const std::size_t n = 16, n_tau = 2;
    const double L = 40.0, dx = L / n;
    {
        std::ofstream out(dir.path / "l0.txt");
        for (std::size_t i = 0; i < n; ++i) out << -20.0 + i * dx << " " << 1.0 + 0.01 * i << "\n";
        std::ofstream hist(dir.path / "hist.txt");
        for (std::size_t row = 0; row <= n_tau; ++row) {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = -20.0 + i * dx;
                hist << (row + 1) * std::exp(-x * x) << (i + 1 < n ? " " : "\n");
            }
        }
    }
    const std::string base = "grid.N = 16\ndelay.tau = 0.1\ndelay.n_tau = 2\nlambda.value = 0.1\n"
                             "lambda0.kind = table\nlambda0.file = l0.txt\n"
                             "history.kind = table\nhistory.file = hist.txt\ntime.T_final = 0.1\n";
    const RunConfig c = validate_config_text(base, {}, dir.path);
    const Problem p = build_problem(c);
    CHECK(p.coeffs.lambda0.values()[3] == doctest::Approx(1.03).epsilon(1e-15));
    CHECK(p.history.newest().values()[8] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p.history.slot(0).values()[8] == doctest::Approx(1.0).epsilon(1e-15));
    try {
        validate_config_text(base + "initial.width = 2\n", {}, dir.path);
        FAIL("initial.* must not apply to a table history");
    } catch (const ConfigErrors& e) {
        CHECK(any_contains(e.problems(), "initial.width does not apply"));
    }
    {
        std::ofstream bad(dir.path / "short.txt");
        bad << "1\n2\n";
    }
    std::string short_lambda = base;
    short_lambda.replace(short_lambda.find("lambda.value = 0.1"), 18, "lambda.kind = table\nlambda.file = short.txt");
    try {
        validate_config_text(short_lambda, {}, dir.path);
        FAIL("a short table must be rejected");
    } catch (const ConfigErrors& e) {
        CHECK(any_contains(e.problems(), "expected 16 rows"));
    }
    CHECK(any_contains(problems_of(base, {"history.file=absent.txt"}), "does not exist"));
}

TEST_CASE("exit codes") {
    TempDir dir("codes");
    std::ostringstream log;
    Invocation bad{"simulate", "grid.N = 7\n", {}, {}, dir.path / "bad"};
    CHECK(run_invocation(bad, log) == kExitConfig);
    CHECK(log.str().find("grid.N") != std::string::npos);

    // an unsatisfied certificate is still a successful certify run
    Invocation cert{"certify", std::string(kSmall) + "lambda0.value = 0.1\nlambda.value = 5\n"
                                                     "delay.tau = 0.1\ndelay.n_tau = 10\n",
                    {}, {}, dir.path / "cert"};
    CHECK(run_invocation(cert, log) == kExitOk);
    const auto j = read_json(dir.path / "cert" / "certificate.json");
    CHECK(j["satisfied"] == false);
    CHECK(j["command"] == "certify");

    Invocation blow{"simulate", "lambda0.value = -200\ntime.scheme = etd1\ntime.dt = 0.1\ntime.T_final = 10\n"
                                "model.nonlinearity = false\n",
                    {}, {}, dir.path / "blow"};
    CHECK(run_invocation(blow, log) == kExitDiverged);
    CHECK(fs::exists(dir.path / "blow" / "trace.csv"));

    Invocation stray{"simulate", std::string(kSmall) + "sweep.grid.N = 32, 64\n", {}, {}, dir.path / "stray"};
    CHECK(run_invocation(stray, log) == kExitConfig);
}

TEST_CASE("sweep writes one directory per combination and an index") {
    TempDir dir("sweep");
    std::ostringstream log;
    Invocation inv{"sweep", std::string(kSmall) + "sweep.params.j = 1, 2\nsweep.grid.L = 40, 50\n",
                   {}, {}, dir.path, 2};
    REQUIRE(run_invocation(inv, log) == kExitOk);
    const auto idx = read_json(dir.path / "index.json");
    REQUIRE(idx["runs"].size() == 4);
    // axes in key order, the last varying fastest
    CHECK(idx["runs"][1]["settings"]["grid.L"] == "40");
    CHECK(idx["runs"][1]["settings"]["params.j"] == "2");
    CHECK(idx["runs"][2]["settings"]["grid.L"] == "50");
    for (int i = 0; i < 4; ++i) {
        CHECK(idx["runs"][i]["exit_code"] == 0);
        CHECK(fs::exists(dir.path / idx["runs"][i]["dir"].get<std::string>() / "summary.json"));
    }
    Invocation bad{"sweep", std::string(kSmall) + "sweep.grid.N = 64, 63\n", {}, {}, dir.path / "bad"};
    CHECK(run_invocation(bad, log) == kExitConfig);
    CHECK(log.str().find("run 1:") != std::string::npos);
    CHECK(!fs::exists(dir.path / "bad" / "index.json"));
}

TEST_CASE("outputs embed a config that reproduces the run") {
    TempDir dir("embed");
    const RunConfig c = validate_config_text(std::string(kSmall) + "initial.amplitude = 0.7\n");
    std::ostringstream log;
    REQUIRE(cmd_simulate(c, dir.path / "a", log) == kExitOk);
    for (const char* name : {"trace.csv", "summary.json"}) {
        const RunConfig again = validate_config_text(embedded_config(dir.path / "a" / name));
        CHECK(again.resolved == c.resolved);
    }
    const RunConfig again = validate_config_text(embedded_config(dir.path / "a" / "trace.csv"));
    REQUIRE(cmd_simulate(again, dir.path / "b", log) == kExitOk);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    CHECK(slurp(dir.path / "a" / "trace.csv") == slurp(dir.path / "b" / "trace.csv"));
}

}
