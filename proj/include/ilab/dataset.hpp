#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ilab/maneuver.hpp"

namespace ilab {

inline constexpr int kFeatureDim = 4;  // [x, y, vx, vy]

/// Per-feature min-max normalization parameters (fit on the training split).
struct ScalerParams {
    std::array<double, kFeatureDim> fmin{};
    std::array<double, kFeatureDim> fmax{};

    double scale(double v, int feature) const {
        const double range = fmax[feature] - fmin[feature];
        return range > 0.0 ? (v - fmin[feature]) / range : 0.0;
    }
    double unscale(double v, int feature) const {
        return fmin[feature] + v * (fmax[feature] - fmin[feature]);
    }
};

/// Acceleration labels map [-a_max, a_max] onto [0, 1].
inline double scale_accel(double a, double a_max) { return (a + a_max) / (2.0 * a_max); }
inline double unscale_accel(double v, double a_max) { return v * 2.0 * a_max - a_max; }

/// One windowed training example: an observation history of scaled
/// [x, y, vx, vy] rows and the scaled future lateral accelerations.
struct TrajectorySample {
    std::vector<double> history;       // n_history * 4, row-major, scaled
    std::vector<double> future_accel;  // horizon, scaled
    ManeuverKind maneuver_label = ManeuverKind::Level;
};

/// A simulated target flight with the active maneuver kind at each sample.
struct Trajectory {
    std::vector<TargetSample> samples;
    std::vector<ManeuverKind> kinds;
    double dt = 0.0;
};

Trajectory make_trajectory(const ManeuverScript& script, double dt);

struct Dataset {
    std::uint32_t n_history = 0;
    std::uint32_t horizon = 0;
    double dt = 0.0;
    double noise_sigma = 0.0;
    double a_max = 8.0 * kGravity;
    std::uint64_t seed = 0;
    ScalerParams scaler;
    std::vector<TrajectorySample> train;
    std::vector<TrajectorySample> val;
    std::vector<TrajectorySample> test;

    std::size_t total() const { return train.size() + val.size() + test.size(); }
};

struct DatasetConfig {
    std::uint32_t n_history = 100;
    std::uint32_t horizon = 10;
    std::uint32_t windows_per_trajectory = 15;
    double noise_sigma = 0.05;
    double a_max = 8.0 * kGravity;
};

/// Window, noise-inject, scale and split the trajectories 60/20/20.
/// Requires n_history*dt >= 2 s of observation history and trajectories of at
/// least n_history + horizon samples; throws std::invalid_argument otherwise.
Dataset build_dataset(const std::vector<Trajectory>& trajectories, const DatasetConfig& cfg,
                      Rng& rng);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

/// Flat CSV of every sample (partition, label, features..., future accels...).
void export_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace ilab
