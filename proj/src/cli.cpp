#include "ilab/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ilab/dataset.hpp"
#include "ilab/sim.hpp"
#include "ilab/train.hpp"

namespace ilab::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double RunConfig::get_num(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

long RunConfig::get_int(const std::string& key, long fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stol(it->second);
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    return it->second == "1" || it->second == "true" || it->second == "yes";
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.kv[key] = value;
    }
    return cfg;
}

namespace {

constexpr double kDefaultDt = 0.02;

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    const fs::path dir = cfg.get("out", "out");
    fs::create_directories(dir);
    return dir;
}

/// Write the fully resolved configuration (re-loadable via --config).
void echo_config(const std::map<std::string, std::string>& resolved, const fs::path& dir,
                 const std::string& command) {
    std::ofstream os(dir / "effective_config.txt");
    os << "# effective configuration, command: " << command << "\n";
    for (const auto& [k, v] : resolved) os << k << " = " << v << "\n";
}

void write_json(const ordered_json& j, const fs::path& path) {
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

std::vector<std::string> parse_str_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int cmd_gen_data(RunConfig cfg) {
    const long flights = cfg.get_int("flights", 500);
    const double flight_time = cfg.get_num("flight-time", 30.0);
    const double dt = cfg.get_num("dt", kDefaultDt);
    const long n_history = cfg.get_int("n-history", 100);
    const long horizon = cfg.get_int("horizon", 10);
    const long windows = cfg.get_int("windows", 15);
    const double noise = cfg.get_num("noise", 0.05);
    const double a_max_g = cfg.get_num("a-max-g", 8.0);
    const double max_g = cfg.get_num("max-g", 8.0);
    const double box = cfg.get_num("init-box", 2000.0);
    const double v_t = cfg.get_num("target-speed", 100.0);
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    const bool csv = cfg.get_bool("csv", false);
    const fs::path dir = prepare_out_dir(cfg);

    std::map<std::string, std::string> resolved{
        {"flights", std::to_string(flights)},   {"flight-time", fmt_num(flight_time)},
        {"dt", fmt_num(dt)},                    {"n-history", std::to_string(n_history)},
        {"horizon", std::to_string(horizon)},   {"windows", std::to_string(windows)},
        {"noise", fmt_num(noise)},              {"a-max-g", fmt_num(a_max_g)},
        {"max-g", fmt_num(max_g)},              {"init-box", fmt_num(box)},
        {"target-speed", fmt_num(v_t)},         {"seed", std::to_string(seed)},
        {"csv", csv ? "1" : "0"},               {"out", dir.string()},
    };
    echo_config(resolved, dir, "gen-data");

    Rng master(seed);
    ManeuverLimits limits;
    limits.max_g = max_g;
    std::vector<Trajectory> trajectories;
    trajectories.reserve(static_cast<std::size_t>(flights));
    for (long i = 0; i < flights; ++i) {
        Rng rng = master.split(static_cast<std::uint64_t>(i));
        ManeuverScript script = sample_script(rng, limits, flight_time);
        script.initial.x = rng.uniform(-box, box);
        script.initial.y = rng.uniform(-box, box);
        script.initial.theta = wrap_angle(rng.uniform(-kPi, kPi));
        script.initial.speed = v_t;
        trajectories.push_back(make_trajectory(script, dt));
    }

    DatasetConfig dcfg;
    dcfg.n_history = static_cast<std::uint32_t>(n_history);
    dcfg.horizon = static_cast<std::uint32_t>(horizon);
    dcfg.windows_per_trajectory = static_cast<std::uint32_t>(windows);
    dcfg.noise_sigma = noise;
    dcfg.a_max = a_max_g * kGravity;
    Rng window_rng = master.split(static_cast<std::uint64_t>(flights) + 1);
    Dataset ds = build_dataset(trajectories, dcfg, window_rng);
    save_dataset(ds, (dir / "dataset.bin").string());
    if (csv) export_dataset_csv(ds, (dir / "dataset.csv").string());

    ordered_json j;
    j["format"] = "ilab-dataset-summary-v1";
    j["flights"] = flights;
    j["samples"] = {{"train", ds.train.size()}, {"val", ds.val.size()}, {"test", ds.test.size()}};
    j["n_history"] = ds.n_history;
    j["horizon"] = ds.horizon;
    j["dt"] = ds.dt;
    j["noise_sigma"] = ds.noise_sigma;
    j["a_max"] = ds.a_max;
    j["scaler"] = {{"fmin", ds.scaler.fmin}, {"fmax", ds.scaler.fmax}};
    write_json(j, dir / "dataset_summary.json");
    std::printf("dataset: %zu train / %zu val / %zu test samples -> %s\n", ds.train.size(),
                ds.val.size(), ds.test.size(), (dir / "dataset.bin").c_str());
    return 0;
}

int cmd_train(RunConfig cfg) {
    const std::string dataset_path = cfg.get("dataset", "");
    if (dataset_path.empty()) {
        std::fprintf(stderr, "train: --dataset is required\n");
        return 2;
    }
    if (!fs::exists(dataset_path)) {
        std::fprintf(stderr, "train: dataset not found: %s\n", dataset_path.c_str());
        return 2;
    }
    const std::string arch_s = cfg.get("arch", "lstm");
    const std::string size_s = cfg.get("size", "large");
    TrainConfig tcfg;
    tcfg.epochs = static_cast<int>(cfg.get_int("epochs", 40));
    tcfg.batch_size = static_cast<int>(cfg.get_int("batch", 64));
    tcfg.lr = cfg.get_num("lr", 0.08);
    tcfg.beta = cfg.get_num("beta", 0.2);
    tcfg.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    tcfg.threads = static_cast<int>(cfg.get_int("threads", 0));
    tcfg.verbose = cfg.get_bool("verbose", false);
    const fs::path dir = prepare_out_dir(cfg);

    std::map<std::string, std::string> resolved{
        {"dataset", dataset_path},
        {"arch", arch_s},
        {"size", size_s},
        {"epochs", std::to_string(tcfg.epochs)},
        {"batch", std::to_string(tcfg.batch_size)},
        {"lr", fmt_num(tcfg.lr)},
        {"beta", fmt_num(tcfg.beta)},
        {"seed", std::to_string(tcfg.seed)},
        {"threads", std::to_string(tcfg.threads)},
        {"out", dir.string()},
    };
    echo_config(resolved, dir, "train");

    Dataset ds = load_dataset(dataset_path);
    const ArchKind arch = parse_arch(arch_s);
    Rng init_rng(tcfg.seed);
    EncoderDecoderModel model =
        make_model(arch, parse_preset(size_s), static_cast<int>(ds.n_history),
                   static_cast<int>(ds.horizon), ds.dt, ds.a_max, ds.scaler, init_rng);

    TrainResult result;
    if (tcfg.epochs > 0) {
        result = train(model, ds, tcfg);
    } else {
        model.beta = tcfg.beta;
    }
    save_model(model, (dir / "model.bin").string());
    write_loss_csv(result, (dir / "loss.csv").string(), model.uses_classifier());

    double class_acc = -1.0;
    const double test_mse = evaluate_mse(model, ds.test, &class_acc);
    ordered_json j;
    j["format"] = "ilab-train-summary-v1";
    j["arch"] = arch_s;
    j["size"] = size_s;
    j["epochs"] = tcfg.epochs;
    j["best_epoch"] = result.best_epoch;
    j["test_mse"] = test_mse;
    if (class_acc >= 0.0) j["test_class_acc"] = class_acc;
    write_json(j, dir / "train_summary.json");
    std::printf("trained %s/%s: test mse %.5f%s -> %s\n", arch_s.c_str(), size_s.c_str(), test_mse,
                class_acc >= 0.0 ? (" acc " + std::to_string(class_acc)).c_str() : "",
                (dir / "model.bin").c_str());
    return 0;
}

int cmd_eval_predictor(RunConfig cfg) {
    const std::string model_path = cfg.get("model", "");
    const std::string dataset_path = cfg.get("dataset", "");
    if (model_path.empty() || dataset_path.empty()) {
        std::fprintf(stderr, "eval-predictor: --model and --dataset are required\n");
        return 2;
    }
    const long dump_n = cfg.get_int("dump", 8);
    const fs::path dir = prepare_out_dir(cfg);
    std::map<std::string, std::string> resolved{{"model", model_path},
                                                {"dataset", dataset_path},
                                                {"dump", std::to_string(dump_n)},
                                                {"out", dir.string()}};
    echo_config(resolved, dir, "eval-predictor");

    EncoderDecoderModel model = load_model(model_path);
    Dataset ds = load_dataset(dataset_path);
    double class_acc = -1.0;
    const double test_mse = evaluate_mse(model, ds.test, &class_acc);

    // Example predictions (real vs predicted, m/s^2) for inspection.
    std::FILE* f = std::fopen((dir / "predictions.csv").string().c_str(), "w");
    if (f) {
        std::fprintf(f, "sample,step,real,predicted\n");
        const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(dump_n),
                                                    ds.test.size());
        for (std::size_t i = 0; i < n; ++i) {
            Batch one = make_batch(ds.test, {i}, model.n_history, model.horizon);
            InferenceResult res = forward(model, one.features, model.horizon);
            for (int j = 0; j < model.horizon; ++j) {
                std::fprintf(f, "%zu,%d,%.6f,%.6f\n", i, j,
                             unscale_accel(one.labels(j, 0), model.a_max),
                             unscale_accel(res.outputs(j, 0), model.a_max));
            }
        }
        std::fclose(f);
    }

    ordered_json j;
    j["format"] = "ilab-eval-v1";
    j["test_mse"] = test_mse;
    if (class_acc >= 0.0) j["test_class_acc"] = class_acc;
    j["samples"] = ds.test.size();
    write_json(j, dir / "eval.json");
    std::printf("test mse %.5f over %zu samples\n", test_mse, ds.test.size());
    return 0;
}

namespace {

LawOptions law_options_from(const RunConfig& cfg, int np, const EncoderDecoderModel* model) {
    LawOptions opts;
    opts.n_prime = cfg.get_num("n-prime", 3.0);
    opts.mpc = MpcConfig::make(np, cfg.get_num("dt", kDefaultDt));
    const double u_max_g = cfg.get_num("u-max-g", 25.0);
    opts.mpc.u_max = u_max_g * kGravity;
    opts.mpc.u_min = -opts.mpc.u_max;
    opts.mpc.du_max = cfg.get_num("du-frac", 0.025) * opts.mpc.u_max;
    opts.mpc.du_min = -opts.mpc.du_max;
    opts.model = model;
    opts.warmup_steps = model ? model->n_history
                              : static_cast<int>(cfg.get_int("warmup-steps", 100));
    return opts;
}

ordered_json summary_json(const McSummary& s) {
    return ordered_json{{"md_mean", s.md_mean}, {"md_std", s.md_std},   {"it_mean", s.it_mean},
                        {"air", s.air},         {"runs", s.runs},       {"failures", s.failures}};
}

}  // namespace

int cmd_simulate(RunConfig cfg) {
    const std::string law_s = cfg.get("law", "pn");
    const LawKind law = parse_law(law_s);
    const int np = static_cast<int>(cfg.get_int("np", 10));
    const double noise = cfg.get_num("noise", 0.05);
    const double t_max = cfg.get_num("t-max", 20.0);
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    const std::string model_path = cfg.get("model", "");
    const fs::path dir = prepare_out_dir(cfg);

    EncoderDecoderModel model;
    const bool needs_model = law == LawKind::NmpcTap;
    if (needs_model) {
        if (model_path.empty()) {
            std::fprintf(stderr, "simulate: --model is required for nmpc-tap\n");
            return 2;
        }
        model = load_model(model_path);
    }

    std::map<std::string, std::string> resolved{
        {"law", law_s},           {"np", std::to_string(np)},
        {"noise", fmt_num(noise)},{"t-max", fmt_num(t_max)},
        {"seed", std::to_string(seed)}, {"model", model_path},
        {"n-prime", fmt_num(cfg.get_num("n-prime", 3.0))},
        {"out", dir.string()},
    };
    echo_config(resolved, dir, "simulate");

    Scenario sc = benchmark_scenario(seed, noise);
    sc.t_max = t_max;
    LawOptions opts = law_options_from(cfg, np, needs_model ? &model : nullptr);
    EngagementRecord rec = run_engagement(sc, law, opts);
    write_engagement_csv(rec, (dir / ("engagement_" + law_s + ".csv")).string());

    ordered_json j;
    j["format"] = "ilab-engagement-v1";
    j["law"] = law_s;
    j["np"] = np;
    j["miss_distance"] = rec.miss_distance;
    j["interception_time"] = rec.interception_time;
    j["intercepted"] = rec.intercepted;
    j["aborted"] = rec.aborted;
    j["steps"] = rec.steps.size();
    j["qp_fallbacks"] = rec.qp_fallbacks;
    write_json(j, dir / "metrics.json");
    std::printf("%s: miss %.3f m at t=%.3f s (%zu steps)\n", law_s.c_str(), rec.miss_distance,
                rec.interception_time, rec.steps.size());
    return 0;
}

int cmd_montecarlo(RunConfig cfg) {
    const std::vector<std::string> laws = parse_str_list(cfg.get("laws", "pn,apn,nmpc,nmpc-tap"));
    const std::vector<int> nps = parse_int_list(cfg.get("np", "10,30,40"));
    const int runs = static_cast<int>(cfg.get_int("runs", 100));
    const double noise = cfg.get_num("noise", 0.05);
    const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
    const std::string model_path = cfg.get("model", "");
    const bool randomize = cfg.get_bool("randomize-maneuver", false);
    const int threads = static_cast<int>(cfg.get_int("threads", 0));
    const fs::path dir = prepare_out_dir(cfg);

    const bool wants_tap =
        std::find(laws.begin(), laws.end(), "nmpc-tap") != laws.end();
    EncoderDecoderModel model;
    if (wants_tap) {
        if (model_path.empty()) {
            std::fprintf(stderr, "montecarlo: --model is required when nmpc-tap is run\n");
            return 2;
        }
        model = load_model(model_path);
    }

    std::map<std::string, std::string> resolved{
        {"laws", cfg.get("laws", "pn,apn,nmpc,nmpc-tap")},
        {"np", cfg.get("np", "10,30,40")},
        {"runs", std::to_string(runs)},
        {"noise", fmt_num(noise)},
        {"seed", std::to_string(seed)},
        {"model", model_path},
        {"randomize-maneuver", randomize ? "1" : "0"},
        {"threads", std::to_string(threads)},
        {"out", dir.string()},
    };
    echo_config(resolved, dir, "montecarlo");

    Scenario base = benchmark_scenario(seed, noise);
    base.t_max = cfg.get_num("t-max", 20.0);
    MonteCarloConfig mc;
    mc.n_runs = runs;
    mc.seed = seed;
    mc.noise_fraction = noise;
    mc.randomize_maneuver = randomize;
    mc.threads = threads;

    ordered_json table = ordered_json::array();
    std::FILE* csv = std::fopen((dir / "montecarlo.csv").string().c_str(), "w");
    if (csv) std::fprintf(csv, "law,np,md_mean,md_std,it_mean,air,runs,failures\n");
    bool reliability_failed = false;

    for (const std::string& law_s : laws) {
        const LawKind law = parse_law(law_s);
        const bool np_dependent = law == LawKind::NmpcUnknown || law == LawKind::NmpcTap;
        const std::vector<int> law_nps = np_dependent ? nps : std::vector<int>{0};
        for (int np : law_nps) {
            LawOptions opts = law_options_from(cfg, np_dependent ? np : 10,
                                               law == LawKind::NmpcTap ? &model : nullptr);
            McResult res = monte_carlo(base, law, opts, mc);
            if (res.summary.failures * 10 > runs) reliability_failed = true;
            ordered_json row;
            row["law"] = law_s;
            if (np_dependent) row["np"] = np;
            row.update(summary_json(res.summary));
            table.push_back(row);
            if (csv) {
                std::fprintf(csv, "%s,%s,%.6f,%.6f,%.6f,%.6f,%d,%d\n", law_s.c_str(),
                             np_dependent ? std::to_string(np).c_str() : "-",
                             res.summary.md_mean, res.summary.md_std, res.summary.it_mean,
                             res.summary.air, res.summary.runs, res.summary.failures);
            }
            std::printf("%-9s np=%-3s md %8.3f +/- %7.3f  it %6.3f  air %5.3f  (%d runs, %d failed)\n",
                        law_s.c_str(), np_dependent ? std::to_string(np).c_str() : "-",
                        res.summary.md_mean, res.summary.md_std, res.summary.it_mean,
                        res.summary.air, res.summary.runs, res.summary.failures);
        }
    }
    if (csv) std::fclose(csv);

    ordered_json j;
    j["format"] = "ilab-montecarlo-v1";
    j["runs"] = runs;
    j["noise"] = noise;
    j["seed"] = seed;
    j["results"] = table;
    write_json(j, dir / "montecarlo.json");
    return reliability_failed ? 1 : 0;
}

}  // namespace ilab::cli
