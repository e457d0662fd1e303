// Command-line front end: dispersive <simulate|certify|convergence|decay-study|sweep>
//   --config <file> | --from-output <trace.csv|*.json>  --out <dir>
//   [--override key=value]... [--threads n]

#include "dispersive/commands.hpp"
#include "dispersive/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped dispersive equation with delayed feedback: simulation and stability studies"};
    app.require_subcommand(1);

    std::string config_path, from_output;
    dispersive::Invocation inv;
    std::string out = ".";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "integrate and write trace.csv + summary.json"},
        {"certify", "evaluate the stability certificate (certificate.json)"},
        {"convergence", "temporal self-convergence over dt, dt/2, dt/4, dt/8"},
        {"decay-study", "simulate, certify, fit decay rates and check the envelope"},
        {"sweep", "cartesian product over sweep.<key> = v1, v2, ... axes"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto* cfg = sub->add_option("--config", config_path, "key = value configuration file");
        auto* from = sub->add_option("--from-output", from_output,
                                     "rerun the config embedded in a trace CSV or JSON output");
        cfg->excludes(from);
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--override", inv.overrides, "key=value, applied after the file")
            ->allow_extra_args(false);
        if (std::string(name) == "sweep") {
            sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dispersive::kExitConfig;
    }

    inv.command = app.get_subcommands().front()->get_name();
    inv.out = out;
    inv.threads = threads;
    try {
        if (!config_path.empty()) {
            inv.config_text = read_file(config_path);
            inv.config_dir = std::filesystem::absolute(config_path).parent_path();
        } else if (!from_output.empty()) {
            inv.config_text = dispersive::embedded_config(from_output);
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return dispersive::kExitConfig;
    }
    return dispersive::run_invocation(inv, std::cerr);
}
