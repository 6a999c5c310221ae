#include "ilab/engagement.hpp"

#include <stdexcept>

namespace ilab {

EngagementState relative_state(const AgentState& missile, const AgentState& target) {
    const double dx = target.x - missile.x;
    const double dy = target.y - missile.y;
    const double r = std::hypot(dx, dy);
    if (r <= 0.0) {
        throw std::invalid_argument("relative_state: coincident missile/target positions");
    }
    const double lambda = std::atan2(dy, dx);
    EngagementState s;
    s.r = r;
    s.lambda = wrap_angle(lambda);
    s.v_r = target.speed * std::cos(target.theta - lambda) -
            missile.speed * std::cos(missile.theta - lambda);
    s.v_lambda = target.speed * std::sin(target.theta - lambda) -
                 missile.speed * std::sin(missile.theta - lambda);
    return s;
}

PolarTargetAccel target_accel_polar(double a_t, double theta_t, double lambda) {
    const double d = wrap_angle(theta_t - lambda);
    PolarTargetAccel w;
    w.a_tr = a_t * std::sin(d);
    w.a_tlambda = a_t * std::cos(d);
    return w;
}

StepResult step_discrete(const EngagementState& x, double u, const PolarTargetAccel& w,
                         const StepConfig& cfg) {
    if (x.r <= 0.0) {
        throw std::invalid_argument("step_discrete: requires r > 0");
    }
    const double dt = cfg.dt;
    const double off = wrap_angle(cfg.theta_m - x.lambda);
    StepResult out;
    // Summation order matches the stacked prediction form (f + g*u + d) so the
    // horizon rollout can reproduce this step bit for bit.
    out.state.r = x.r + dt * x.v_r;
    out.state.v_r = x.v_r + dt * (x.v_lambda * x.v_lambda / x.r) + dt * std::sin(off) * u +
                    dt * w.a_tr;
    out.state.lambda = wrap_angle(x.lambda + dt * (x.v_lambda / x.r));
    out.state.v_lambda = x.v_lambda + dt * (-x.v_r * x.v_lambda / x.r) -
                         dt * std::cos(off) * u + dt * w.a_tlambda;
    out.terminal = out.state.r <= 0.0;
    return out;
}

AgentState propagate_agent(const AgentState& agent, double lateral_accel, double dt) {
    AgentState next = agent;
    next.x = agent.x + dt * agent.speed * std::cos(agent.theta);
    next.y = agent.y + dt * agent.speed * std::sin(agent.theta);
    next.theta = wrap_angle(agent.theta + dt * lateral_accel / agent.speed);
    return next;
}

}  // namespace ilab
