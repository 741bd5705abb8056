#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "manetsim/metrics.hpp"
#include "manetsim/protocols.hpp"
#include "manetsim/simulation.hpp"

namespace manet {

struct ProtocolChoice {
    Protocol protocol = Protocol::aodv;
    std::optional<double> r_t; ///< greedy forwarding only; falls back to the config value

    bool operator==(const ProtocolChoice&) const = default;
};

/// Parses "AODV", "GF", "GF:0.4" or "MP" (case-insensitive).
ProtocolChoice parse_protocol(std::string_view text);
std::string format_protocol(const ProtocolChoice& choice);

struct Sweep {
    std::string variable;
    std::vector<double> values;

    bool operator==(const Sweep&) const = default;
};

/// Experiment description. Threshold, reference SNR and shadowing spread are
/// held in dB; everything else is linear.
struct ExperimentConfig {
    double alpha = 3.5;
    double sigma_s_db = 8.0;
    double r_f = 0.2;
    double G_over_h = 96.0;
    double gamma_db = 0.0;
    double beta_db = 0.0;

    std::size_t M = 200;
    double r_net = 1.0;
    double r_ex = 0.05;
    double dest_distance = 0.5;

    double mu = 0.4;
    double p = 0.3;
    /// When set, mu is derived as relay_density / lambda.
    std::optional<double> relay_density;
    /// When set, p is derived as contention_density / (lambda (1 - mu)).
    std::optional<double> contention_density;

    int B = 4;
    double r_t = 0.3;
    double r_g = 0.15;
    double T = 1.0;
    double T_e = 1.2;
    double T_d = 0.1;
    std::size_t max_hops = 30;

    std::size_t topologies = 200;
    std::size_t K_t1 = 10;
    std::size_t K_t2 = 10;
    std::size_t K_t3 = 10;

    std::vector<ProtocolChoice> protocols{{Protocol::aodv, {}}, {Protocol::greedy, {}}, {Protocol::max_progress, {}}};
    std::uint64_t seed = 1;
    std::string out = "results";
    std::size_t workers = 1;
    std::string topology_file;
    std::vector<Sweep> sweeps;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Sets one field from its text form. Throws ConfigError naming the key.
void set_value(ExperimentConfig& config, std::string_view key, std::string_view value);
/// Sets a numeric field; the variable names accepted by sweeps.
void set_numeric(ExperimentConfig& config, std::string_view key, double value);
std::vector<std::string> sweep_variables();

/// Parses "var=v1,v2,..."; numbers may carry a "/pi" suffix.
Sweep parse_sweep(std::string_view text);

/// `key = value` lines; `#` starts a comment; `sweep` may repeat.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Text form accepted by parse_config; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

/// Applies derived densities and checks every field. Throws ConfigError.
ExperimentConfig resolve(const ExperimentConfig& config);

Scenario make_scenario(const ExperimentConfig& config);
std::vector<ProtocolConfig> make_protocols(const ExperimentConfig& config);

struct ResultRow {
    double sweep_value = 0.0;
    std::string protocol;
    double relay_density = 0.0;
    double contention_density = 0.0;
    AveragedMetrics metrics;
};

struct ResultTable {
    std::string variable;
    std::vector<ResultRow> rows;
    bool interrupted = false;
};

struct RunOptions {
    const std::atomic<bool>* stop = nullptr;
    std::function<void(const std::string& message)> log;
    TrialObserver observer;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

/// One table per sweep (a single-point dest_distance table without sweeps),
/// one row per (sweep value, protocol).
std::vector<ResultTable> run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

std::string format_table(const ResultTable& table);
/// Writes `sweep_<variable>.csv` per table and `manifest.txt` into `directory`.
void emit_results(const std::vector<ResultTable>& tables, const ExperimentConfig& config,
                  const std::filesystem::path& directory);

/// Shortest text that parses back to the same double.
std::string format_number(double value);

} // namespace manet
