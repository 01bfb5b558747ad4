#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uwsim/batch.hpp"
#include "uwsim/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"uwsim: discrete-event simulator for underwater RF sensor networks"};

    std::string scenario;
    std::string config_file;
    std::vector<std::string> sets;
    int trials = 0;
    std::uint64_t seed = 0;
    std::string outdir;
    bool events_log = false;

    app.add_option("--scenario", scenario,
                   "Scenario preset: p2p | routing-grid | diffusion-unicast | diffusion-broadcast");
    app.add_option("--config", config_file, "key=value config file with [section] headers");
    app.add_option("--set", sets, "Override one key, e.g. --set radio.tx_power_dbm=20")
        ->take_all();
    app.add_option("--trials", trials, "Independent seeded trials per parameter point");
    app.add_option("--seed", seed, "Master seed (expands per trial/node/purpose)");
    app.add_option("--out", outdir, "Output directory");
    app.add_flag("--events-log", events_log, "Write the per-frame events.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    uwsim::SimConfig cfg;
    try {
        if (!config_file.empty()) uwsim::load_config_file(cfg, config_file);
        for (const std::string& assignment : sets) {
            const auto eq = assignment.find('=');
            if (eq == std::string::npos) {
                throw uwsim::ConfigError("--set expects key=value, got `" + assignment + "`");
            }
            uwsim::apply_assignment(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
        }
        if (app.count("--scenario")) cfg.scenario = scenario;
        if (app.count("--trials")) cfg.trials = trials;
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--out")) cfg.outdir = outdir;
        if (events_log) cfg.events_log = true;

        cfg.finalize();
        std::cout << uwsim::effective_config(cfg);
        uwsim::run_batch(cfg);
    } catch (const uwsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const uwsim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "wrote " << cfg.outdir << "/summary.csv\n";
    return 0;
}
