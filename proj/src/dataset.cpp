#include "ilab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ilab {

Trajectory make_trajectory(const ManeuverScript& script, double dt) {
    Trajectory traj;
    traj.dt = dt;
    traj.samples = simulate_target(script, dt);
    traj.kinds.reserve(traj.samples.size());
    const double total = script.total_duration();
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const double t = std::min(static_cast<double>(k) * dt, total);
        double start = 0.0;
        ManeuverKind kind = script.segments.empty() ? ManeuverKind::Level
                                                    : script.segments.back().kind;
        for (const auto& seg : script.segments) {
            if (t < start + seg.duration_s) {
                kind = seg.kind;
                break;
            }
            start += seg.duration_s;
        }
        traj.kinds.push_back(kind);
    }
    return traj;
}

namespace {

void feature_row(const TargetSample& s, double* out) {
    out[0] = s.state.x;
    out[1] = s.state.y;
    out[2] = s.state.speed * std::cos(s.state.theta);
    out[3] = s.state.speed * std::sin(s.state.theta);
}

}  // namespace

Dataset build_dataset(const std::vector<Trajectory>& trajectories, const DatasetConfig& cfg,
                      Rng& rng) {
    if (trajectories.empty()) throw std::invalid_argument("build_dataset: no trajectories");
    const double dt = trajectories.front().dt;
    if (static_cast<double>(cfg.n_history) * dt < 2.0 - 1e-9) {
        throw std::invalid_argument("build_dataset: observation history must cover >= 2 s");
    }

    const std::size_t n = cfg.n_history;
    const std::size_t h = cfg.horizon;

    // Raw windows, in trajectory order.
    std::vector<TrajectorySample> all;
    for (const auto& traj : trajectories) {
        const std::size_t len = traj.samples.size();
        if (len < n + h) {
            throw std::invalid_argument("build_dataset: trajectory shorter than history + horizon");
        }
        const std::size_t n_offsets = len - n - h + 2;
        std::vector<std::size_t> offsets(n_offsets);
        std::iota(offsets.begin(), offsets.end(), 0);
        rng.shuffle(offsets);
        const std::size_t take = std::min<std::size_t>(cfg.windows_per_trajectory, n_offsets);
        for (std::size_t w = 0; w < take; ++w) {
            const std::size_t o = offsets[w];
            TrajectorySample sample;
            sample.history.resize(n * kFeatureDim);
            for (std::size_t i = 0; i < n; ++i) {
                feature_row(traj.samples[o + i], &sample.history[i * kFeatureDim]);
            }
            sample.future_accel.resize(h);
            const std::size_t end = o + n - 1;  // index of the last observed sample
            for (std::size_t j = 0; j < h; ++j) {
                sample.future_accel[j] = traj.samples[end + j].lateral_accel;
            }
            sample.maneuver_label = traj.kinds[end];
            all.push_back(std::move(sample));
        }
    }

    rng.shuffle(all);
    const std::size_t total = all.size();
    const std::size_t n_test = total / 5;
    const std::size_t n_val = total / 5;
    const std::size_t n_train = total - n_val - n_test;

    Dataset ds;
    ds.n_history = cfg.n_history;
    ds.horizon = cfg.horizon;
    ds.dt = dt;
    ds.noise_sigma = cfg.noise_sigma;
    ds.a_max = cfg.a_max;
    ds.seed = rng.seed();
    ds.train.assign(std::make_move_iterator(all.begin()),
                    std::make_move_iterator(all.begin() + n_train));
    ds.val.assign(std::make_move_iterator(all.begin() + n_train),
                  std::make_move_iterator(all.begin() + n_train + n_val));
    ds.test.assign(std::make_move_iterator(all.begin() + n_train + n_val),
                   std::make_move_iterator(all.end()));

    // Noise std per feature, relative to the clean training-feature range.
    std::array<double, kFeatureDim> lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& s : ds.train) {
        for (std::size_t i = 0; i < s.history.size(); ++i) {
            const int f = static_cast<int>(i % kFeatureDim);
            lo[f] = std::min(lo[f], s.history[i]);
            hi[f] = std::max(hi[f], s.history[i]);
        }
    }
    std::array<double, kFeatureDim> sigma;
    for (int f = 0; f < kFeatureDim; ++f) sigma[f] = cfg.noise_sigma * (hi[f] - lo[f]);

    auto corrupt = [&](std::vector<TrajectorySample>& part) {
        for (auto& s : part) {
            for (std::size_t i = 0; i < s.history.size(); ++i) {
                const int f = static_cast<int>(i % kFeatureDim);
                if (sigma[f] > 0.0) s.history[i] += rng.normal(0.0, sigma[f]);
            }
        }
    };
    corrupt(ds.train);
    corrupt(ds.val);
    corrupt(ds.test);

    // Min-max scaler from the noisy training features.
    ds.scaler.fmin.fill(std::numeric_limits<double>::infinity());
    ds.scaler.fmax.fill(-std::numeric_limits<double>::infinity());
    for (const auto& s : ds.train) {
        for (std::size_t i = 0; i < s.history.size(); ++i) {
            const int f = static_cast<int>(i % kFeatureDim);
            ds.scaler.fmin[f] = std::min(ds.scaler.fmin[f], s.history[i]);
            ds.scaler.fmax[f] = std::max(ds.scaler.fmax[f], s.history[i]);
        }
    }

    auto scale_part = [&](std::vector<TrajectorySample>& part) {
        for (auto& s : part) {
            for (std::size_t i = 0; i < s.history.size(); ++i) {
                s.history[i] = ds.scaler.scale(s.history[i], static_cast<int>(i % kFeatureDim));
            }
            for (auto& a : s.future_accel) a = scale_accel(a, ds.a_max);
        }
    };
    scale_part(ds.train);
    scale_part(ds.val);
    scale_part(ds.test);
    return ds;
}

namespace {

constexpr char kMagic[4] = {'I', 'L', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void put_samples(std::ofstream& os, const std::vector<TrajectorySample>& part) {
    for (const auto& s : part) {
        os.write(reinterpret_cast<const char*>(s.history.data()),
                 static_cast<std::streamsize>(s.history.size() * sizeof(double)));
        os.write(reinterpret_cast<const char*>(s.future_accel.data()),
                 static_cast<std::streamsize>(s.future_accel.size() * sizeof(double)));
        put(os, static_cast<std::uint8_t>(s.maneuver_label));
    }
}

void get_samples(std::ifstream& is, std::vector<TrajectorySample>& part, std::uint64_t count,
                 std::size_t n_hist, std::size_t horizon) {
    part.resize(count);
    for (auto& s : part) {
        s.history.resize(n_hist * kFeatureDim);
        s.future_accel.resize(horizon);
        is.read(reinterpret_cast<char*>(s.history.data()),
                static_cast<std::streamsize>(s.history.size() * sizeof(double)));
        is.read(reinterpret_cast<char*>(s.future_accel.data()),
                static_cast<std::streamsize>(s.future_accel.size() * sizeof(double)));
        std::uint8_t label = 0;
        get(is, label);
        s.maneuver_label = static_cast<ManeuverKind>(label);
    }
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_dataset: cannot write " + path);
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, ds.n_history);
    put(os, ds.horizon);
    put(os, ds.dt);
    put(os, ds.noise_sigma);
    put(os, ds.a_max);
    put(os, ds.seed);
    for (double v : ds.scaler.fmin) put(os, v);
    for (double v : ds.scaler.fmax) put(os, v);
    put(os, static_cast<std::uint64_t>(ds.train.size()));
    put(os, static_cast<std::uint64_t>(ds.val.size()));
    put(os, static_cast<std::uint64_t>(ds.test.size()));
    put_samples(os, ds.train);
    put_samples(os, ds.val);
    put_samples(os, ds.test);
    if (!os) throw std::runtime_error("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_dataset: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("load_dataset: bad magic in " + path);
    }
    std::uint32_t version = 0;
    get(is, version);
    if (version != kVersion) throw std::runtime_error("load_dataset: unsupported version");
    Dataset ds;
    get(is, ds.n_history);
    get(is, ds.horizon);
    get(is, ds.dt);
    get(is, ds.noise_sigma);
    get(is, ds.a_max);
    get(is, ds.seed);
    for (double& v : ds.scaler.fmin) get(is, v);
    for (double& v : ds.scaler.fmax) get(is, v);
    std::uint64_t n_train = 0, n_val = 0, n_test = 0;
    get(is, n_train);
    get(is, n_val);
    get(is, n_test);
    get_samples(is, ds.train, n_train, ds.n_history, ds.horizon);
    get_samples(is, ds.val, n_val, ds.n_history, ds.horizon);
    get_samples(is, ds.test, n_test, ds.n_history, ds.horizon);
    if (!is) throw std::runtime_error("load_dataset: truncated file " + path);
    return ds;
}

void export_dataset_csv(const Dataset& ds, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("export_dataset_csv: cannot write " + path);
    std::fprintf(f, "partition,maneuver");
    for (std::uint32_t i = 0; i < ds.n_history; ++i) {
        std::fprintf(f, ",x%u,y%u,vx%u,vy%u", i, i, i, i);
    }
    for (std::uint32_t j = 0; j < ds.horizon; ++j) std::fprintf(f, ",a%u", j);
    std::fprintf(f, "\n");
    auto dump = [&](const char* name, const std::vector<TrajectorySample>& part) {
        for (const auto& s : part) {
            std::fprintf(f, "%s,%s", name, maneuver_name(s.maneuver_label));
            for (double v : s.history) std::fprintf(f, ",%.17g", v);
            for (double v : s.future_accel) std::fprintf(f, ",%.17g", v);
            std::fprintf(f, "\n");
        }
    };
    dump("train", ds.train);
    dump("val", ds.val);
    dump("test", ds.test);
    std::fclose(f);
}

}  // namespace ilab
