// Command-line driver: builds an ExperimentConfig from a config file, flags
// and --set overrides, runs the sweeps and writes CSV tables plus a manifest.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manetsim/errors.hpp"
#include "manetsim/experiment.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int)
{
    g_stop.store(true);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Monte-Carlo routing simulator for finite ad hoc networks"};

    std::string config_file;
    std::vector<std::string> protocols;
    std::vector<std::string> sweeps;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> topologies;
    std::optional<std::size_t> trials_per_layer;
    std::optional<std::size_t> workers;
    bool dry_run = false;
    bool quiet = false;

    app.add_option("-c,--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("-p,--protocol", protocols, "protocols to run: AODV, GF, GF:<r_t>, MP")->delimiter(',');
    app.add_option("-s,--sweep", sweeps, "sweep specification var=v1,v2,... (repeatable)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("-o,--out", out, "output directory");
    app.add_option("--topologies", topologies, "number of topologies");
    app.add_option("--trials-per-layer", trials_per_layer, "iterations of each of the three inner layers");
    app.add_option("-j,--workers", workers, "worker threads (overrides MANETSIM_WORKERS)");
    app.add_option("--set", overrides, "override any config key, key=value (repeatable)");
    app.add_flag("--dry-run", dry_run, "print the resolved configuration and exit");
    app.add_flag("-q,--quiet", quiet, "no progress output");

    CLI11_PARSE(app, argc, argv);

    manet::ExperimentConfig config;
    try {
        if (!config_file.empty()) {
            config = manet::load_config(config_file);
        }
        if (const char* env = std::getenv("MANETSIM_WORKERS"); env != nullptr && *env != '\0') {
            manet::set_value(config, "workers", env);
        }
        for (const auto& item : overrides) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw manet::ConfigError("--set expects key=value, got '" + item + "'");
            }
            manet::set_value(config, item.substr(0, eq), item.substr(eq + 1));
        }
        if (!protocols.empty()) {
            config.protocols.clear();
            for (const auto& p : protocols) {
                config.protocols.push_back(manet::parse_protocol(p));
            }
        }
        if (!sweeps.empty()) {
            config.sweeps.clear();
            for (const auto& s : sweeps) {
                config.sweeps.push_back(manet::parse_sweep(s));
            }
        }
        if (seed) {
            config.seed = *seed;
        }
        if (out) {
            config.out = *out;
        }
        if (topologies) {
            config.topologies = *topologies;
        }
        if (trials_per_layer) {
            config.K_t1 = config.K_t2 = config.K_t3 = *trials_per_layer;
        }
        if (workers) {
            config.workers = *workers;
        }
        manet::resolve(config);
    } catch (const std::exception& e) {
        std::cerr << "manetsim: " << e.what() << '\n';
        return 2;
    }

    if (dry_run) {
        std::cout << manet::format_config(config);
        return 0;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    manet::RunOptions options;
    options.stop = &g_stop;
    if (!quiet) {
        options.log = [](const std::string& message) { std::cerr << message << '\n'; };
        options.progress = [](std::size_t done, std::size_t total) {
            std::cerr << "\r  topologies " << done << '/' << total << std::flush;
            if (done == total) {
                std::cerr << '\n';
            }
        };
    }

    try {
        const auto tables = manet::run_experiment(config, options);
        manet::emit_results(tables, config, config.out);
        bool interrupted = false;
        for (const auto& t : tables) {
            interrupted = interrupted || t.interrupted;
        }
        if (interrupted) {
            std::cerr << "\nmanetsim: interrupted; partial results written to " << config.out << '\n';
            return 130;
        }
        if (!quiet) {
            std::cerr << "results written to " << config.out << '\n';
        }
    } catch (const manet::ConfigError& e) {
        std::cerr << "manetsim: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "manetsim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
