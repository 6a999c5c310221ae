#pragma once

#include <map>
#include <optional>
#include <string>

namespace ilab::cli {

/// Flat key=value configuration. Commands resolve every parameter against
/// the benchmark defaults and echo the effective values into the output
/// directory; that echo can be fed back through --config to reproduce a run.
struct RunConfig {
    std::map<std::string, std::string> kv;

    void set(const std::string& key, const std::string& value) { kv[key] = value; }
    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_num(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    static RunConfig from_file(const std::string& path);
};

int cmd_gen_data(RunConfig cfg);
int cmd_train(RunConfig cfg);
int cmd_eval_predictor(RunConfig cfg);
int cmd_simulate(RunConfig cfg);
int cmd_montecarlo(RunConfig cfg);

}  // namespace ilab::cli
