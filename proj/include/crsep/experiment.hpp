#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crsep/gaussian_mixture.hpp"
#include "crsep/modulation.hpp"
#include "crsep/scenario.hpp"
#include "crsep/simulation.hpp"

namespace crsep {

enum class SweepAxis { q_avg_db, p_pk_db, p_detect, p_false_alarm };

/// How the transmit powers of each sweep point are chosen.
enum class ConstraintMode {
    fixed,      // p0 / p1 given directly
    average,    // SSS: optimized under Q_avg; OSA: min(P_pk, Q_avg / ((1 - P_d) E|g|^2))
    peak,       // min(P_pk, Q_pk / |g|^2) per symbol
};

struct Engines {
    bool analytic = true;
    bool bound = true;
    bool monte_carlo = false;
};

struct SensingPair {
    double p_detect;
    double p_false_alarm;
};

struct ExperimentConfig {
    std::vector<Scheme> schemes{Scheme::sss};
    std::vector<Modulation> modulations{{2, 2}};
    std::vector<SensingPair> sensing{{0.9, 0.05}};
    double prior_busy = 0.4;
    double noise_variance = 0.01;

    GaussianMixture mixture = GaussianMixture::four_component_preset();
    bool gaussian_reference = false;  // add a p = 1 series of equal total variance

    ConstraintMode mode = ConstraintMode::average;
    double p_pk_db = 4.0;
    std::optional<double> q_avg_db;
    std::optional<double> q_pk_db;
    double mean_gain_to_primary = 1.0;
    std::optional<double> p0;  // linear, fixed mode
    std::optional<double> p1;

    SweepAxis axis = SweepAxis::q_avg_db;
    double sweep_start = -20.0;
    double sweep_stop = 0.0;
    double sweep_step = 1.0;

    Engines engines;
    MonteCarloConfig monte_carlo;

    std::string output_path;  // empty: stdout
    std::string json_path;    // empty: no JSON mirror

    std::vector<double> sweep_values() const;
};

struct Diagnostic {
    int line;  // 0 when not tied to a line
    std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

struct ParseResult {
    std::optional<ExperimentConfig> config;  // set only when diagnostics is empty
    std::vector<Diagnostic> diagnostics;
};

/// Parses the `[section]` / `key = value` config format and checks every
/// structural and domain invariant, collecting all violations.
ParseResult parse_config(const std::string& text);

/// Diagnostics only; empty for a valid config.
std::vector<Diagnostic> validate(const std::string& text);

/// Invariant checks on an already-built config (used after CLI overrides).
std::vector<Diagnostic> validate(const ExperimentConfig& config);

/// Config text of a named figure preset (fig1 .. fig8).
std::string preset_text(const std::string& name);
std::vector<std::string> preset_names();

/// One curve of an experiment: every combination of scheme, sensing pair,
/// interference model and modulation.
struct Series {
    std::string label;
    Scheme scheme;
    Modulation modulation;
    SensingPair sensing;
    std::string interference_name;
    GaussianMixture interference;
};

std::vector<Series> expand_series(const ExperimentConfig& config);

struct ResultRow {
    std::string series;
    Scheme scheme = Scheme::sss;
    Modulation modulation;
    std::string interference;
    double p_detect = 0.0;
    double p_false_alarm = 0.0;
    double sweep_value = 0.0;
    std::optional<double> p0;
    std::optional<double> p1;
    std::optional<double> sep_analytic;
    std::optional<double> sep_bound;
    std::optional<double> sep_mc;
    std::optional<double> mc_ci95;
    std::optional<double> skip_fraction;
    std::optional<std::uint64_t> trials;
    std::string status = "ok";
};

/// Scenario of one sweep point of one series, with powers resolved by the
/// constraint mode. Throws on infeasible or invalid parameters.
Scenario build_scenario(const ExperimentConfig& config, const Series& series, double sweep_value);

/// Evaluates one sweep point. Runtime errors land in row.status.
ResultRow evaluate_point(const ExperimentConfig& config, const Series& series,
                         std::size_t sweep_index, double sweep_value, unsigned mc_workers = 1);

/// Rows in series-major, sweep order. Points run in parallel on
/// config.monte_carlo.workers threads; output does not depend on it.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows);

const char* to_string(SweepAxis axis);
const char* to_string(ConstraintMode mode);

}  // namespace crsep
