#include "ilab/maneuver.hpp"

#include <cmath>
#include <stdexcept>

namespace ilab {

const char* maneuver_name(ManeuverKind k) {
    switch (k) {
        case ManeuverKind::Level: return "level";
        case ManeuverKind::CoordTurnLeft: return "turn-left";
        case ManeuverKind::CoordTurnRight: return "turn-right";
        case ManeuverKind::Weave: return "weave";
    }
    return "?";
}

ManeuverSegment turn_segment(ManeuverKind kind, double g_load, double turn_angle_rad,
                             double speed) {
    ManeuverSegment s;
    s.kind = kind;
    s.g_load = g_load;
    s.duration_s = std::abs(turn_angle_rad) * speed / (g_load * kGravity);
    return s;
}

double ManeuverScript::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration_s;
    return t;
}

static double segment_accel(const ManeuverSegment& seg, double tau) {
    switch (seg.kind) {
        case ManeuverKind::Level:
            return 0.0;
        case ManeuverKind::CoordTurnLeft:
            return seg.g_load * kGravity;
        case ManeuverKind::CoordTurnRight:
            return -seg.g_load * kGravity;
        case ManeuverKind::Weave: {
            const double phase = std::fmod(tau, seg.weave_period_s);
            const double amp = seg.g_load * kGravity;
            return phase < 0.5 * seg.weave_period_s ? amp : -amp;
        }
    }
    return 0.0;
}

double lateral_accel_at(const ManeuverScript& script, double t) {
    if (t < 0.0) throw std::out_of_range("lateral_accel_at: t < 0");
    double start = 0.0;
    for (const auto& seg : script.segments) {
        const double end = start + seg.duration_s;
        if (t < end) return segment_accel(seg, t - start);
        start = end;
    }
    // Allow exactly t == total_duration (query at the final sample instant).
    if (!script.segments.empty() && t <= start + 1e-12) {
        const auto& seg = script.segments.back();
        return segment_accel(seg, t - (start - seg.duration_s));
    }
    throw std::out_of_range("lateral_accel_at: t beyond script duration");
}

ManeuverScript sample_script(Rng& rng, const ManeuverLimits& limits, double flight_time_s) {
    ManeuverScript script;
    double filled = 0.0;
    while (filled < flight_time_s) {
        ManeuverSegment seg;
        seg.kind = static_cast<ManeuverKind>(rng.uniform_int(kManeuverKinds));
        seg.duration_s = rng.uniform(limits.min_duration_s, limits.max_duration_s);
        if (seg.kind != ManeuverKind::Level) {
            seg.g_load = rng.uniform(0.0, limits.max_g);
        }
        if (seg.kind == ManeuverKind::Weave) {
            seg.weave_period_s = rng.uniform(limits.min_weave_period_s, limits.max_weave_period_s);
        }
        if (filled + seg.duration_s > flight_time_s) {
            seg.duration_s = flight_time_s - filled;  // trim the tail segment
        }
        filled += seg.duration_s;
        script.segments.push_back(seg);
    }
    return script;
}

std::vector<TargetSample> simulate_target(const ManeuverScript& script, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("simulate_target: dt must be > 0");
    const double total = script.total_duration();
    const auto steps = static_cast<std::size_t>(std::llround(total / dt));
    std::vector<TargetSample> out;
    out.reserve(steps + 1);
    AgentState st = script.initial;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double a = lateral_accel_at(script, std::min(t, total));
        out.push_back({st, a});
        if (k < steps) st = propagate_agent(st, a, dt);
    }
    return out;
}

}  // namespace ilab
