#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "iet/errors.hpp"
#include "iet/runner.hpp"

/* exit codes: 0 ok, 1 runtime failure, 2 bad config, 3 budget exhausted */
int main(int argc, char** argv) {
    CLI::App app{"expctl: exact interval-exchange walk experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, report_dir;
    std::uint64_t seed_override = 0;
    int threads = 0;
    int oracle_n = 6;

    CLI::App* run = app.add_subcommand("run", "run one experiment config into a directory");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--out", out_dir, "output directory (created if missing)")->required();
    CLI::Option* seed_opt = run->add_option("--seed", seed_override, "override the config seed");
    run->add_option("--threads", threads,
                    "worker threads (default: EXPCTL_THREADS, else all cores)");

    CLI::App* rep = app.add_subcommand("report", "summarize the records in a directory");
    rep->add_option("dir", report_dir, "directory written by 'run'")->required();

    CLI::App* orc = app.add_subcommand("oracle", "exact small-n crosscheck of the config's walk");
    orc->add_option("config", config_path, "experiment config file")->required();
    orc->add_option("--n", oracle_n, "word length bound")->required()
        ->check(CLI::Range(0, 64));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            iet::ExperimentConfig cfg = iet::load_config(config_path);
            if (seed_opt->count() > 0) {
                cfg.seed = seed_override;
                cfg.has_seed = true;
            }
            int t = threads > 0 ? threads : iet::default_threads();
            int n = iet::run_experiment(cfg, out_dir, t);
            std::cout << "wrote " << n << " records to " << out_dir << "\n";
        } else if (rep->parsed()) {
            std::cout << iet::report_text(report_dir);
        } else {
            iet::ExperimentConfig cfg = iet::load_config(config_path);
            std::cout << iet::oracle_text(cfg, oracle_n);
        }
    } catch (const iet::budget_error& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 3;
    } catch (const iet::config_error& e) {
        std::cerr << "config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
