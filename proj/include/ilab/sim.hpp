#pragma once

#include <string>
#include <vector>

#include "ilab/guidance.hpp"
#include "ilab/maneuver.hpp"

namespace ilab {

/// One engagement setup. The same seed gives every law the identical target
/// trajectory and measurement-noise sequence (paired comparison).
struct Scenario {
    AgentState missile{0.0, 0.0, 0.0, 150.0};
    ManeuverScript target;
    double dt = 0.02;
    double t_max = 20.0;
    double noise_fraction = 0.05;
    double kill_radius = 0.5;
    std::uint64_t seed = 1;
};

/// The benchmark engagement: missile at the origin heading 0 deg at 150 m/s;
/// target at (1000, 1000) heading 190 deg at 100 m/s, flying a 4g left turn
/// through 70 deg, 100 m of level flight, then an 8g weave with 4 s period.
Scenario benchmark_scenario(std::uint64_t seed = 1, double noise_fraction = 0.05);

/// Range-relative Gaussian measurement corruption. The noise scale per
/// feature is fraction times the running range of that feature over the
/// engagement so far; ground truth is never touched.
class MeasurementNoise {
public:
    MeasurementNoise(double fraction, Rng rng);
    FeatureRow apply(const FeatureRow& truth);

private:
    double fraction_;
    Rng rng_;
    FeatureRow lo_{}, hi_{};
    bool first_ = true;
};

struct StepRecord {
    double t = 0.0;
    AgentState missile;
    AgentState target;
    EngagementState eng;  // ground-truth relative state
    double u = 0.0;
    double a_t_true = 0.0;
    PolarTargetAccel w_true;
    PolarTargetAccel w_pred;
    bool warmup = false;
    bool qp_fallback = false;
};

struct EngagementRecord {
    LawKind law = LawKind::Pn;
    std::vector<StepRecord> steps;
    double final_r = 0.0;  // range after the last propagation
    double final_t = 0.0;
    double miss_distance = 0.0;     // refined minimum range
    double interception_time = 0.0; // time of that minimum
    bool intercepted = false;       // terminated before t_max
    bool aborted = false;           // non-finite state
    std::string abort_reason;
    int qp_fallbacks = 0;
};

/// Closed-loop engagement at fixed dt: measure, command, propagate truth.
/// Terminates at r < kill_radius, after the range grows for three
/// consecutive steps past closest approach, or at t_max.
EngagementRecord run_engagement(const Scenario& sc, LawKind law, const LawOptions& opts);

void write_engagement_csv(const EngagementRecord& rec, const std::string& path);

struct McSummary {
    double md_mean = 0.0;
    double md_std = 0.0;
    double it_mean = 0.0;
    double air = 0.0;  // mean per-step |u(k)-u(k-1)|, m/s^2 per step
    int runs = 0;
    int failures = 0;
};

/// Sample statistics over the non-aborted records (std uses n-1).
McSummary metrics(const std::vector<EngagementRecord>& records);

struct MonteCarloConfig {
    int n_runs = 100;
    std::uint64_t seed = 1;
    double noise_fraction = 0.05;
    bool randomize_maneuver = false;  // default: noise varies, maneuver fixed
    ManeuverLimits limits;            // used when randomize_maneuver is set
    int threads = 0;
};

struct McResult {
    McSummary summary;
    std::vector<EngagementRecord> records;
};

/// Paired-seed Monte Carlo: run r of every law sees scenario seed
/// split(seed, r), so all laws face identical trajectories and noise.
McResult monte_carlo(const Scenario& base, LawKind law, const LawOptions& opts,
                     const MonteCarloConfig& mc);

}  // namespace ilab
