#include "ilab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ilab/parallel.hpp"

namespace ilab {

Scenario benchmark_scenario(std::uint64_t seed, double noise_fraction) {
    Scenario sc;
    sc.missile = AgentState{0.0, 0.0, 0.0, 150.0};
    sc.seed = seed;
    sc.noise_fraction = noise_fraction;
    ManeuverScript script;
    script.initial = AgentState{1000.0, 1000.0, deg2rad(190.0), 100.0};
    script.segments.push_back(
        turn_segment(ManeuverKind::CoordTurnLeft, 4.0, deg2rad(70.0), script.initial.speed));
    ManeuverSegment level;
    level.kind = ManeuverKind::Level;
    level.duration_s = 100.0 / script.initial.speed;  // 100 m of straight flight
    script.segments.push_back(level);
    ManeuverSegment weave;
    weave.kind = ManeuverKind::Weave;
    weave.g_load = 8.0;
    weave.weave_period_s = 4.0;
    weave.duration_s = 60.0;  // covers any t_max used here
    script.segments.push_back(weave);
    sc.target = script;
    return sc;
}

MeasurementNoise::MeasurementNoise(double fraction, Rng rng) : fraction_(fraction), rng_(rng) {}

FeatureRow MeasurementNoise::apply(const FeatureRow& truth) {
    if (first_) {
        lo_ = truth;
        hi_ = truth;
        first_ = false;
    }
    FeatureRow out;
    for (std::size_t f = 0; f < truth.size(); ++f) {
        lo_[f] = std::min(lo_[f], truth[f]);
        hi_[f] = std::max(hi_[f], truth[f]);
        const double sigma = fraction_ * (hi_[f] - lo_[f]);
        out[f] = sigma > 0.0 ? truth[f] + rng_.normal(0.0, sigma) : truth[f];
    }
    return out;
}

namespace {

struct RefinedMin {
    double value = 0.0;
    double time = 0.0;
};

/// Quadratic interpolation of the minimum of the sampled range history:
/// fit a parabola through the bracketing samples and take its vertex.
RefinedMin refine_minimum(const std::vector<double>& r, const std::vector<double>& t) {
    std::size_t imin = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i] < r[imin]) imin = i;
    }
    RefinedMin out{r[imin], t[imin]};
    if (imin == 0 || imin + 1 >= r.size()) return out;
    const double rm = r[imin - 1], r0 = r[imin], rp = r[imin + 1];
    const double curv = rp - 2.0 * r0 + rm;
    if (curv <= 0.0) return out;
    const double h = t[imin + 1] - t[imin];
    // r(s) = r0 + s (rp - rm)/2 + s^2 curv/2 in units of the step h.
    const double s = std::clamp(-0.5 * (rp - rm) / curv, -1.0, 1.0);
    out.time = t[imin] + s * h;
    out.value = std::min(r0, r0 + 0.5 * s * (rp - rm) + 0.5 * s * s * curv);
    return out;
}

bool finite(const AgentState& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.theta) &&
           std::isfinite(a.speed);
}

}  // namespace

EngagementRecord run_engagement(const Scenario& sc, LawKind law, const LawOptions& opts) {
    EngagementRecord rec;
    rec.law = law;
    auto guidance = make_law(law, opts);

    Rng noise_rng = Rng(sc.seed).split(0xA0);
    MeasurementNoise noise(sc.noise_fraction, noise_rng);

    AgentState missile = sc.missile;
    AgentState target = sc.target.initial;
    const double script_total = sc.target.total_duration();
    const int n_history = opts.model ? opts.model->n_history : opts.warmup_steps;

    std::vector<FeatureRow> history;
    std::vector<double> r_trace, t_trace;
    EngagementState prev_meas_eng;
    bool have_prev_meas = false;

    int consec_increase = 0;
    double prev_r = -1.0;
    const auto max_steps = static_cast<std::size_t>(std::llround(sc.t_max / sc.dt));
    for (std::size_t k = 0; k <= max_steps; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        const double a_t = t <= script_total ? lateral_accel_at(sc.target, t) : 0.0;
        const EngagementState truth = relative_state(missile, target);

        // Measurement path: target position/velocity are corrupted, the
        // missile knows its own state exactly.
        const FeatureRow truth_row{target.x, target.y, target.speed * std::cos(target.theta),
                                   target.speed * std::sin(target.theta)};
        const FeatureRow meas = noise.apply(truth_row);
        history.push_back(meas);

        GuidanceMeasurement gm;
        gm.theta_m = missile.theta;
        gm.theta_t = std::atan2(meas[3], meas[2]);
        gm.v_t = std::hypot(meas[2], meas[3]);
        gm.history = &history;
        gm.history_ready = static_cast<int>(history.size()) >= std::max(1, n_history);
        AgentState meas_target{meas[0], meas[1], gm.theta_t, gm.v_t};
        const double meas_sep = std::hypot(meas[0] - missile.x, meas[1] - missile.y);
        if (meas_sep > 1e-9) {
            gm.eng = relative_state(missile, meas_target);
            prev_meas_eng = gm.eng;
            have_prev_meas = true;
        } else if (have_prev_meas) {
            gm.eng = prev_meas_eng;  // hold the last usable measurement
        } else {
            gm.eng = truth;
        }
        gm.a_tlambda = target_accel_polar(a_t, gm.theta_t, gm.eng.lambda).a_tlambda;

        const GuidanceCommand cmd = guidance->step(gm);

        StepRecord step;
        step.t = t;
        step.missile = missile;
        step.target = target;
        step.eng = truth;
        step.u = cmd.u;
        step.a_t_true = a_t;
        step.w_true = target_accel_polar(a_t, target.theta, truth.lambda);
        step.w_pred = cmd.w_first;
        step.warmup = cmd.warmup;
        step.qp_fallback = cmd.qp_fallback;
        if (cmd.qp_fallback) ++rec.qp_fallbacks;
        rec.steps.push_back(step);
        r_trace.push_back(truth.r);
        t_trace.push_back(t);

        missile = propagate_agent(missile, cmd.u, sc.dt);
        target = propagate_agent(target, a_t, sc.dt);
        if (!finite(missile) || !finite(target)) {
            rec.aborted = true;
            rec.abort_reason = "non-finite agent state";
            break;
        }
        const double r_new = std::hypot(target.x - missile.x, target.y - missile.y);
        rec.final_r = r_new;
        rec.final_t = t + sc.dt;
        if (r_new < sc.kill_radius) {
            rec.intercepted = true;
            break;
        }
        if (prev_r >= 0.0 && r_new > prev_r) {
            if (++consec_increase >= 3) {
                rec.intercepted = true;  // past closest approach
                break;
            }
        } else {
            consec_increase = 0;
        }
        prev_r = r_new;
    }

    if (!rec.aborted) {
        r_trace.push_back(rec.final_r);
        t_trace.push_back(rec.final_t);
    }
    const RefinedMin rm = refine_minimum(r_trace, t_trace);
    rec.miss_distance = rm.value;
    rec.interception_time = rm.time;
    return rec;
}

void write_engagement_csv(const EngagementRecord& rec, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_engagement_csv: cannot write " + path);
    std::fprintf(f, "t,x_M,y_M,x_T,y_T,r,V_r,lambda,V_lambda,u,a_T_true,a_Tlambda_pred,a_Tr_pred\n");
    for (const auto& s : rec.steps) {
        std::fprintf(f, "%.6f,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                     s.t, s.missile.x, s.missile.y, s.target.x, s.target.y, s.eng.r, s.eng.v_r,
                     s.eng.lambda, s.eng.v_lambda, s.u, s.a_t_true, s.w_pred.a_tlambda,
                     s.w_pred.a_tr);
    }
    std::fclose(f);
}

McSummary metrics(const std::vector<EngagementRecord>& records) {
    if (records.empty()) throw std::invalid_argument("metrics: no records");
    McSummary s;
    double md_sum = 0.0, it_sum = 0.0, air_sum = 0.0;
    std::vector<double> mds;
    for (const auto& rec : records) {
        if (rec.aborted) {
            ++s.failures;
            continue;
        }
        mds.push_back(rec.miss_distance);
        md_sum += rec.miss_distance;
        it_sum += rec.interception_time;
        double rate = 0.0, u_prev = 0.0;
        for (const auto& step : rec.steps) {
            rate += std::abs(step.u - u_prev);
            u_prev = step.u;
        }
        air_sum += rate / static_cast<double>(rec.steps.size());
        ++s.runs;
    }
    if (s.runs == 0) return s;
    const double n = static_cast<double>(s.runs);
    s.md_mean = md_sum / n;
    s.it_mean = it_sum / n;
    s.air = air_sum / n;
    double var = 0.0;
    for (double md : mds) var += (md - s.md_mean) * (md - s.md_mean);
    s.md_std = s.runs > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    return s;
}

McResult monte_carlo(const Scenario& base, LawKind law, const LawOptions& opts,
                     const MonteCarloConfig& mc) {
    if (mc.n_runs < 1) throw std::invalid_argument("monte_carlo: n_runs >= 1 required");
    McResult result;
    result.records.resize(static_cast<std::size_t>(mc.n_runs));
    const Rng master(mc.seed);
    parallel_for(static_cast<std::size_t>(mc.n_runs), mc.threads, [&](std::size_t run) {
        Scenario sc = base;
        sc.noise_fraction = mc.noise_fraction;
        Rng run_rng = master.split(run);
        sc.seed = run_rng.seed();
        if (mc.randomize_maneuver) {
            Rng script_rng = run_rng.split(1);
            sc.target = sample_script(script_rng, mc.limits, std::max(sc.t_max, 30.0));
            sc.target.initial = base.target.initial;
        }
        result.records[run] = run_engagement(sc, law, opts);
    });
    result.summary = metrics(result.records);
    return result;
}

}  // namespace ilab
