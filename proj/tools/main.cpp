#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ilab/cli.hpp"

namespace {

using ilab::cli::RunConfig;

/// Registers a string option that lands in the RunConfig only when passed,
/// so defaults resolve inside the command (and get echoed from there).
void add_opt(CLI::App* app, RunConfig& cfg, const std::string& flag, const std::string& key,
             const std::string& desc) {
    auto value = std::make_shared<std::string>();
    app->add_option_function<std::string>(
           flag, [&cfg, key](const std::string& v) { cfg.set(key, v); }, desc)
        ->expected(1);
    (void)value;
}

void add_flag(CLI::App* app, RunConfig& cfg, const std::string& flag, const std::string& key,
              const std::string& desc) {
    app->add_flag_callback(flag, [&cfg, key] { cfg.set(key, "1"); }, desc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-D missile-target interception laboratory: predictive guidance with "
                 "learned target-acceleration forecasts, plus PN/APN baselines"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file (flags override it)");

    CLI::App* gen = app.add_subcommand("gen-data", "generate maneuver trajectories and a dataset");
    add_opt(gen, cfg, "--flights", "flights", "number of simulated flights (default 500)");
    add_opt(gen, cfg, "--flight-time", "flight-time", "seconds per flight (default 30)");
    add_opt(gen, cfg, "--dt", "dt", "integration step (default 0.02)");
    add_opt(gen, cfg, "--n-history", "n-history", "observation window length (default 100)");
    add_opt(gen, cfg, "--horizon", "horizon", "label horizon length (default 10)");
    add_opt(gen, cfg, "--windows", "windows", "windows per flight (default 15)");
    add_opt(gen, cfg, "--noise", "noise", "feature noise fraction (default 0.05)");
    add_opt(gen, cfg, "--a-max-g", "a-max-g", "label normalization limit in g (default 8)");
    add_opt(gen, cfg, "--max-g", "max-g", "maneuver g-load limit (default 8)");
    add_opt(gen, cfg, "--seed", "seed", "rng seed (default 1)");
    add_opt(gen, cfg, "--out", "out", "output directory");
    add_flag(gen, cfg, "--csv", "csv", "also export dataset.csv");

    CLI::App* train = app.add_subcommand("train", "train a trajectory predictor");
    add_opt(train, cfg, "--dataset", "dataset", "dataset.bin path (required)");
    add_opt(train, cfg, "--arch", "arch", "rnn | lstm | mlstm (default lstm)");
    add_opt(train, cfg, "--size", "size", "small | medium | large (default large)");
    add_opt(train, cfg, "--epochs", "epochs", "training epochs (default 40)");
    add_opt(train, cfg, "--batch", "batch", "minibatch size (default 64)");
    add_opt(train, cfg, "--lr", "lr", "adagrad learning rate (default 0.08)");
    add_opt(train, cfg, "--beta", "beta", "classification loss weight (default 0.2)");
    add_opt(train, cfg, "--seed", "seed", "rng seed (default 1)");
    add_opt(train, cfg, "--threads", "threads", "worker threads (default: hardware)");
    add_opt(train, cfg, "--out", "out", "output directory");
    add_flag(train, cfg, "--verbose", "verbose", "print per-epoch losses");

    CLI::App* eval = app.add_subcommand("eval-predictor", "evaluate a trained predictor");
    add_opt(eval, cfg, "--model", "model", "model.bin path (required)");
    add_opt(eval, cfg, "--dataset", "dataset", "dataset.bin path (required)");
    add_opt(eval, cfg, "--dump", "dump", "example predictions to dump (default 8)");
    add_opt(eval, cfg, "--out", "out", "output directory");

    CLI::App* sim = app.add_subcommand("simulate", "run one benchmark engagement");
    add_opt(sim, cfg, "--law", "law", "pn | apn | nmpc | nmpc-tap (default pn)");
    add_opt(sim, cfg, "--np", "np", "prediction horizon (default 10)");
    add_opt(sim, cfg, "--model", "model", "model.bin (required for nmpc-tap)");
    add_opt(sim, cfg, "--noise", "noise", "measurement noise fraction (default 0.05)");
    add_opt(sim, cfg, "--seed", "seed", "rng seed (default 1)");
    add_opt(sim, cfg, "--t-max", "t-max", "time limit, s (default 20)");
    add_opt(sim, cfg, "--n-prime", "n-prime", "navigation constant (default 3)");
    add_opt(sim, cfg, "--out", "out", "output directory");

    CLI::App* mc = app.add_subcommand("montecarlo", "paired-seed Monte-Carlo comparison");
    add_opt(mc, cfg, "--runs", "runs", "runs per law (default 100)");
    add_opt(mc, cfg, "--np", "np", "comma list of horizons (default 10,30,40)");
    add_opt(mc, cfg, "--laws", "laws", "comma list of laws (default pn,apn,nmpc,nmpc-tap)");
    add_opt(mc, cfg, "--model", "model", "model.bin (required when nmpc-tap runs)");
    add_opt(mc, cfg, "--noise", "noise", "measurement noise fraction (default 0.05)");
    add_opt(mc, cfg, "--seed", "seed", "master seed (default 1)");
    add_opt(mc, cfg, "--threads", "threads", "worker threads (default: hardware)");
    add_opt(mc, cfg, "--t-max", "t-max", "time limit per run, s (default 20)");
    add_flag(mc, cfg, "--randomize-maneuver", "randomize-maneuver",
             "resample target maneuver parameters per run");
    add_opt(mc, cfg, "--out", "out", "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            RunConfig file_cfg = RunConfig::from_file(config_path);
            // Command-line values win over the file.
            for (auto& [k, v] : cfg.kv) file_cfg.kv[k] = v;
            cfg = file_cfg;
        }
        if (gen->parsed()) return ilab::cli::cmd_gen_data(cfg);
        if (train->parsed()) return ilab::cli::cmd_train(cfg);
        if (eval->parsed()) return ilab::cli::cmd_eval_predictor(cfg);
        if (sim->parsed()) return ilab::cli::cmd_simulate(cfg);
        if (mc->parsed()) return ilab::cli::cmd_montecarlo(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
