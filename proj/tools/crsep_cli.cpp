// Command-line runner for SEP sweeps of the cognitive radio link.
//
//   crsep run <config> [--seed N] [--trials N] [--engines a,b,mc] [--out PATH]
//   crsep validate <config>
//   crsep preset <name> [--print-config] [same options as run]
//
// Exit codes: 0 success, 2 config error, 3 runtime or infeasibility error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "crsep/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<unsigned> workers;
    std::string engines;
    std::string out;
    std::string json;
    bool strict = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--seed", o.seed, "Master seed for Monte Carlo");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per sweep point");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores); results do not depend on it");
    cmd->add_option("--engines", o.engines, "Comma list of a(nalytic), b(ound), mc");
    cmd->add_option("--out", o.out, "CSV output path (default: config value, else stdout)");
    cmd->add_option("--json", o.json, "Also write a JSON mirror to this path");
    cmd->add_flag("--strict", o.strict, "Exit 3 if any row failed");
}

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    return true;
}

bool write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

void print_diagnostics(const std::string& source, const std::vector<crsep::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << source << ": " << crsep::format_diagnostic(d) << "\n";
}

int run_text(const std::string& source, const std::string& text, const RunOptions& o) {
    crsep::ParseResult parsed = crsep::parse_config(text);
    if (!parsed.config) {
        print_diagnostics(source, parsed.diagnostics);
        return kConfigError;
    }
    crsep::ExperimentConfig config = *parsed.config;
    if (o.seed) config.monte_carlo.master_seed = *o.seed;
    if (o.trials) config.monte_carlo.trials = *o.trials;
    if (o.workers) config.monte_carlo.workers = *o.workers;
    if (!o.engines.empty()) {
        crsep::Engines e{false, false, false};
        std::stringstream ss(o.engines);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "a" || item == "analytic") e.analytic = true;
            else if (item == "b" || item == "bound") e.bound = true;
            else if (item == "mc" || item == "monte_carlo") e.monte_carlo = true;
            else {
                std::cerr << "--engines: unknown engine '" << item << "'\n";
                return kConfigError;
            }
        }
        config.engines = e;
    }
    if (!o.out.empty()) config.output_path = o.out;
    if (!o.json.empty()) config.json_path = o.json;
    if (const auto diags = crsep::validate(config); !diags.empty()) {
        print_diagnostics(source, diags);
        return kConfigError;
    }

    std::vector<crsep::ResultRow> rows;
    try {
        rows = crsep::run_experiment(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }

    const std::string csv = crsep::to_csv(rows);
    if (config.output_path.empty()) {
        std::cout << csv;
    } else if (!write_file(config.output_path, csv)) {
        std::cerr << "error: cannot write " << config.output_path << "\n";
        return kRuntimeError;
    }
    if (!config.json_path.empty() && !write_file(config.json_path, crsep::to_json(rows))) {
        std::cerr << "error: cannot write " << config.json_path << "\n";
        return kRuntimeError;
    }

    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.status != "ok") {
            ++failed;
            std::cerr << "row " << r.series << " @ " << r.sweep_value << ": " << r.status << "\n";
        }
    }
    if (failed == rows.size() || (o.strict && failed > 0)) return kRuntimeError;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SEP analysis and simulation for cognitive radio links"};
    app.require_subcommand(1);

    std::string config_path;
    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run the sweep described by a config file");
    run->add_option("config", config_path, "Config file")->required();
    add_run_options(run, run_opts);

    std::string validate_path;
    auto* val = app.add_subcommand("validate", "Check a config file without running it");
    val->add_option("config", validate_path, "Config file")->required();

    std::string preset_name;
    bool print_config = false;
    RunOptions preset_opts;
    auto* preset = app.add_subcommand("preset", "Run a built-in figure preset (fig1 .. fig8)");
    preset->add_option("name", preset_name, "Preset name")->required();
    preset->add_flag("--print-config", print_config, "Print the preset config instead of running it");
    add_run_options(preset, preset_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (*run) {
        std::string text;
        if (!read_file(config_path, text)) {
            std::cerr << "error: cannot read " << config_path << "\n";
            return kConfigError;
        }
        return run_text(config_path, text, run_opts);
    }
    if (*val) {
        std::string text;
        if (!read_file(validate_path, text)) {
            std::cerr << "error: cannot read " << validate_path << "\n";
            return kConfigError;
        }
        const auto diags = crsep::validate(text);
        print_diagnostics(validate_path, diags);
        if (!diags.empty()) return kConfigError;
        std::cout << validate_path << ": ok\n";
        return 0;
    }
    std::string text;
    try {
        text = crsep::preset_text(preset_name);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << " (available:";
        for (const auto& n : crsep::preset_names()) std::cerr << " " << n;
        std::cerr << ")\n";
        return kConfigError;
    }
    if (print_config) {
        std::cout << text;
        return 0;
    }
    return run_text(preset_name, text, preset_opts);
}
