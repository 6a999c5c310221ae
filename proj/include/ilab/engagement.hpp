#pragma once

#include <cmath>

namespace ilab {

inline constexpr double kGravity = 9.81;  // m/s^2
inline constexpr double kPi = 3.14159265358979323846;

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Polar relative state the guidance laws act on:
/// range r along the line of sight, closing-rate component v_r,
/// LOS angle lambda and transversal relative velocity v_lambda.
struct EngagementState {
    double r = 0.0;         // m, > 0 while the engagement is active
    double v_r = 0.0;       // m/s
    double lambda = 0.0;    // rad, wrapped to (-pi, pi]
    double v_lambda = 0.0;  // m/s
};

/// Cartesian point-mass state of one agent. Speed is constant per agent;
/// only lateral acceleration is commanded.
struct AgentState {
    double x = 0.0;      // m
    double y = 0.0;      // m
    double theta = 0.0;  // flight-path angle, rad, wrapped to (-pi, pi]
    double speed = 0.0;  // m/s, > 0
};

/// Target acceleration resolved into LOS-frame components.
struct PolarTargetAccel {
    double a_tr = 0.0;       // radial component, m/s^2
    double a_tlambda = 0.0;  // transversal component, m/s^2
};

/// Parameters of one discrete propagation step of the polar model.
struct StepConfig {
    double dt = 0.02;      // s, > 0
    double theta_m = 0.0;  // current missile flight-path angle, rad
};

/// Result of one discrete step; terminal means the range closed to <= 0
/// and the polar model is no longer valid.
struct StepResult {
    EngagementState state;
    bool terminal = false;
};

/// Polar relative state from the two Cartesian agent states.
/// Throws std::invalid_argument when the positions coincide.
EngagementState relative_state(const AgentState& missile, const AgentState& target);

/// Resolve a scalar lateral target acceleration into LOS-frame components:
/// a_tr = a_t sin(theta_t - lambda), a_tlambda = a_t cos(theta_t - lambda).
PolarTargetAccel target_accel_polar(double a_t, double theta_t, double lambda);

/// One Euler step of the discrete polar engagement model:
///   r+        = r + dt v_r
///   v_r+      = v_r + dt (v_lambda^2/r + sin(theta_m - lambda) u + a_tr)
///   lambda+   = lambda + dt (v_lambda / r)
///   v_lambda+ = v_lambda + dt (-v_r v_lambda / r - cos(theta_m - lambda) u + a_tlambda)
/// Requires x.r > 0. The result is flagged terminal when r+ <= 0.
StepResult step_discrete(const EngagementState& x, double u, const PolarTargetAccel& w,
                         const StepConfig& cfg);

/// Constant-speed point-mass kinematics: theta integrates lateral_accel/speed,
/// position advances along the pre-step heading.
AgentState propagate_agent(const AgentState& agent, double lateral_accel, double dt);

}  // namespace ilab
