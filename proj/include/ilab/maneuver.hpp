#pragma once

#include <cstdint>
#include <vector>

#include "ilab/engagement.hpp"
#include "ilab/rng.hpp"

namespace ilab {

enum class ManeuverKind : std::uint8_t { Level = 0, CoordTurnLeft = 1, CoordTurnRight = 2, Weave = 3 };
inline constexpr int kManeuverKinds = 4;

const char* maneuver_name(ManeuverKind k);

/// One maneuver segment. g_load is the lateral acceleration in multiples of g
/// (0 for Level); weave_period_s applies to Weave only.
struct ManeuverSegment {
    ManeuverKind kind = ManeuverKind::Level;
    double g_load = 0.0;         // in [0, 8]
    double duration_s = 0.0;     // > 0
    double weave_period_s = 0.0; // > 0 for Weave
};

/// Helper for turn segments given as a turn angle: duration = angle * V / a.
ManeuverSegment turn_segment(ManeuverKind kind, double g_load, double turn_angle_rad, double speed);

/// An ordered maneuver plan plus the initial target state.
struct ManeuverScript {
    std::vector<ManeuverSegment> segments;
    AgentState initial;

    double total_duration() const;
};

/// Sampling limits for random script generation.
struct ManeuverLimits {
    double max_g = 8.0;
    double min_duration_s = 2.0;
    double max_duration_s = 8.0;
    double min_weave_period_s = 2.0;
    double max_weave_period_s = 6.0;
};

/// Commanded lateral acceleration (m/s^2) at time t into the script.
/// Level -> 0; CoordTurnLeft -> +g_load*g; CoordTurnRight -> -g_load*g;
/// Weave -> square wave flipping sign every half period, positive first.
/// Throws std::out_of_range for t outside [0, total_duration].
double lateral_accel_at(const ManeuverScript& script, double t);

/// Random script: segments drawn until flight_time_s is filled (last segment
/// trimmed), each kind equally likely, parameters uniform within limits.
/// The initial state of the returned script is left default; callers fill it.
ManeuverScript sample_script(Rng& rng, const ManeuverLimits& limits, double flight_time_s);

/// One sample of a simulated target trajectory.
struct TargetSample {
    AgentState state;
    double lateral_accel = 0.0;  // commanded at this instant
};

/// Roll the target kinematics through the script at step dt.
/// Output holds total_duration/dt + 1 samples (t = 0 .. total inclusive).
std::vector<TargetSample> simulate_target(const ManeuverScript& script, double dt);

}  // namespace ilab
