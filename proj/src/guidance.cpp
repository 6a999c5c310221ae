#include "ilab/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ilab {

MpcConfig MpcConfig::make(int horizon, double dt) {
    MpcConfig cfg;
    cfg.n_p = horizon;
    cfg.n_c = horizon;
    cfg.dt = dt;
    cfg.d_max = 8.0 * kGravity * dt;
    cfg.d_min = -cfg.d_max;
    return cfg;
}

Eigen::MatrixXd lower_triangular_ones(int n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m.row(i).head(i + 1).setOnes();
    return m;
}

namespace {

struct ModelTerms {
    double f[4];  // free response
    double g[4];  // input direction (dt-scaled)
};

// f_d, g_d of the discrete polar model; component arithmetic mirrors
// step_discrete exactly so the dU = 0 rollout reproduces it bit for bit.
ModelTerms model_terms(const EngagementState& x, double dt, double theta_m) {
    const double off = wrap_angle(theta_m - x.lambda);
    ModelTerms t;
    t.f[0] = x.r + dt * x.v_r;
    t.f[1] = x.v_r + dt * (x.v_lambda * x.v_lambda / x.r);
    t.f[2] = wrap_angle(x.lambda + dt * (x.v_lambda / x.r));
    t.f[3] = x.v_lambda + dt * (-x.v_r * x.v_lambda / x.r);
    t.g[0] = 0.0;
    t.g[1] = dt * std::sin(off);
    t.g[2] = 0.0;
    t.g[3] = -(dt * std::cos(off));
    return t;
}

}  // namespace

PredictionMatrices rollout_nominal(const EngagementState& x, double u_prev,
                                   const Eigen::VectorXd& du_prev,
                                   const std::vector<PolarTargetAccel>& w_seq,
                                   const MpcConfig& cfg, double theta_m) {
    const int n_p = cfg.n_p;
    const int n_c = cfg.n_c;
    if (du_prev.size() != n_c) throw std::invalid_argument("rollout_nominal: du_prev size != n_c");
    if (static_cast<int>(w_seq.size()) != n_p) {
        throw std::invalid_argument("rollout_nominal: w_seq size != n_p");
    }
    if (x.r <= 0.0) throw std::invalid_argument("rollout_nominal: requires r > 0");

    PredictionMatrices pm;
    pm.n_p = n_p;
    pm.n_c = n_c;
    pm.f_stack.resize(4 * n_p);
    pm.g_mat = Eigen::MatrixXd::Zero(4 * n_p, n_c);
    pm.g_prev.resize(4 * n_p);
    pm.d_stack.resize(4 * n_p);
    pm.lambda_nominal.resize(static_cast<std::size_t>(n_p));

    StepConfig scfg{cfg.dt, theta_m};
    EngagementState state = x;
    double u_nominal = u_prev;
    bool frozen = false;
    for (int j = 0; j < n_p; ++j) {
        pm.lambda_nominal[static_cast<std::size_t>(j)] = state.lambda;
        const ModelTerms t = model_terms(state, cfg.dt, theta_m);
        const PolarTargetAccel& w = w_seq[static_cast<std::size_t>(j)];
        const double d[4] = {0.0, cfg.dt * w.a_tr, 0.0, cfg.dt * w.a_tlambda};
        for (int i = 0; i < 4; ++i) {
            pm.f_stack(4 * j + i) = t.f[i];
            pm.g_prev(4 * j + i) = t.g[i] * u_prev;
            pm.d_stack(4 * j + i) = d[i];
        }
        const int cols = std::min(j + 1, n_c);
        for (int col = 0; col < cols; ++col) {
            for (int i = 0; i < 4; ++i) pm.g_mat(4 * j + i, col) = t.g[i];
        }
        if (j + 1 < n_p && !frozen) {
            if (j < n_c) u_nominal += du_prev(j);
            const StepResult next = step_discrete(state, u_nominal, w, scfg);
            if (next.terminal) {
                frozen = true;
                pm.truncated = true;  // keep re-emitting the last valid state
            } else {
                state = next.state;
            }
        }
    }
    return pm;
}

Eigen::VectorXd predicted_states(const PredictionMatrices& pm, const Eigen::VectorXd& du) {
    return pm.f_stack + pm.g_mat * du + pm.g_prev + pm.d_stack;
}

namespace {

Eigen::VectorXd q_diagonal(const MpcConfig& cfg) {
    Eigen::VectorXd qd(4 * cfg.n_p);
    for (int j = 0; j < cfg.n_p; ++j) qd.segment(4 * j, 4) = cfg.q;
    return qd;
}

Eigen::MatrixXd r_matrix(const MpcConfig& cfg) {
    if (cfg.r_weight.size() == 0) return Eigen::MatrixXd::Identity(cfg.n_c, cfg.n_c);
    if (cfg.r_weight.rows() != cfg.n_c || cfg.r_weight.cols() != cfg.n_c) {
        throw std::invalid_argument("MpcConfig: r_weight shape != n_c x n_c");
    }
    return cfg.r_weight;
}

/// Magnitude rows [-I_lt; I_lt] and rate rows [-I; I] with their bounds.
void input_constraints(const MpcConfig& cfg, double u_prev, Eigen::MatrixXd& E,
                       Eigen::VectorXd& b) {
    const int n_c = cfg.n_c;
    const Eigen::MatrixXd ilt = lower_triangular_ones(n_c);
    E.setZero(4 * n_c, n_c);
    E.topRows(n_c) = -ilt;
    E.middleRows(n_c, n_c) = ilt;
    E.middleRows(2 * n_c, n_c) = -Eigen::MatrixXd::Identity(n_c, n_c);
    E.bottomRows(n_c) = Eigen::MatrixXd::Identity(n_c, n_c);
    b.resize(4 * n_c);
    b.head(n_c).setConstant(-cfg.u_min + u_prev);
    b.segment(n_c, n_c).setConstant(cfg.u_max - u_prev);
    b.segment(2 * n_c, n_c).setConstant(-cfg.du_min);
    b.tail(n_c).setConstant(cfg.du_max);
}

}  // namespace

QPProblem build_tap_qp(const PredictionMatrices& pm, const MpcConfig& cfg, double u_prev) {
    const Eigen::VectorXd qd = q_diagonal(cfg);
    const Eigen::MatrixXd qg = qd.asDiagonal() * pm.g_mat;
    Eigen::MatrixXd W = pm.g_mat.transpose() * qg + r_matrix(cfg);
    const Eigen::VectorXd resp = pm.f_stack + pm.g_prev + pm.d_stack;
    Eigen::VectorXd c = 2.0 * (qg.transpose() * resp);
    Eigen::MatrixXd E;
    Eigen::VectorXd b;
    input_constraints(cfg, u_prev, E, b);
    return QPProblem(std::move(W), std::move(c), std::move(E), std::move(b));
}

QPProblem build_unknown_qp(const PredictionMatrices& pm, const MpcConfig& cfg, double u_prev) {
    const int n_c = cfg.n_c;
    const int nd = 4 * cfg.n_p;
    const Eigen::VectorXd qd = q_diagonal(cfg);
    const Eigen::MatrixXd qg = qd.asDiagonal() * pm.g_mat;

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n_c + nd, n_c + nd);
    W.topLeftCorner(n_c, n_c) = pm.g_mat.transpose() * qg + r_matrix(cfg);
    W.topRightCorner(n_c, nd) = qg.transpose();
    W.bottomLeftCorner(nd, n_c) = qg;
    W.bottomRightCorner(nd, nd) = qd.asDiagonal();

    const Eigen::VectorXd resp = pm.f_stack + pm.g_prev;  // assembled with w = 0
    Eigen::VectorXd c(n_c + nd);
    c.head(n_c) = 2.0 * (qg.transpose() * resp);
    c.tail(nd) = 2.0 * qd.cwiseProduct(resp);

    Eigen::MatrixXd Eu;
    Eigen::VectorXd bu;
    input_constraints(cfg, u_prev, Eu, bu);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(4 * n_c + 2 * nd, n_c + nd);
    E.topLeftCorner(4 * n_c, n_c) = Eu;
    E.block(4 * n_c, n_c, nd, nd) = -Eigen::MatrixXd::Identity(nd, nd);
    E.bottomRightCorner(nd, nd) = Eigen::MatrixXd::Identity(nd, nd);
    Eigen::VectorXd b(4 * n_c + 2 * nd);
    b.head(4 * n_c) = bu;
    b.segment(4 * n_c, nd).setConstant(-cfg.d_min);
    b.tail(nd).setConstant(cfg.d_max);
    return QPProblem(std::move(W), std::move(c), std::move(E), std::move(b));
}

double pn_command(const EngagementState& state, double n_prime, double u_max) {
    if (state.r <= 0.0) throw std::invalid_argument("pn_command: requires r > 0");
    const double closing = -state.v_r;
    const double los_rate = state.v_lambda / state.r;
    return std::clamp(n_prime * closing * los_rate, -u_max, u_max);
}

double apn_command(const EngagementState& state, double a_tlambda, double n_prime, double u_max) {
    if (state.r <= 0.0) throw std::invalid_argument("apn_command: requires r > 0");
    const double closing = -state.v_r;
    const double los_rate = state.v_lambda / state.r;
    const double u = n_prime * closing * los_rate + 0.5 * n_prime * a_tlambda;
    return std::clamp(u, -u_max, u_max);
}

const char* law_name(LawKind k) {
    switch (k) {
        case LawKind::Pn: return "pn";
        case LawKind::Apn: return "apn";
        case LawKind::NmpcUnknown: return "nmpc";
        case LawKind::NmpcTap: return "nmpc-tap";
    }
    return "?";
}

LawKind parse_law(const std::string& s) {
    if (s == "pn") return LawKind::Pn;
    if (s == "apn") return LawKind::Apn;
    if (s == "nmpc") return LawKind::NmpcUnknown;
    if (s == "nmpc-tap") return LawKind::NmpcTap;
    throw std::invalid_argument("unknown guidance law: " + s);
}

namespace {

class PnLaw : public GuidanceLaw {
public:
    PnLaw(LawKind kind, const LawOptions& opts) : kind_(kind), opts_(opts) {}

    GuidanceCommand step(const GuidanceMeasurement& m) override {
        GuidanceCommand cmd;
        cmd.u = kind_ == LawKind::Apn
                    ? apn_command(m.eng, m.a_tlambda, opts_.n_prime, opts_.mpc.u_max)
                    : pn_command(m.eng, opts_.n_prime, opts_.mpc.u_max);
        u_prev_ = cmd.u;
        return cmd;
    }
    LawKind kind() const override { return kind_; }
    void reset() override { u_prev_ = 0.0; }

private:
    LawKind kind_;
    LawOptions opts_;
};

class NmpcLaw : public GuidanceLaw {
public:
    NmpcLaw(LawKind kind, const LawOptions& opts) : kind_(kind), opts_(opts) {
        if (kind_ == LawKind::NmpcTap && opts_.model == nullptr) {
            throw std::invalid_argument("nmpc-tap requires a predictor model");
        }
        reset();
    }

    void reset() override {
        u_prev_ = 0.0;
        steps_ = 0;
        du_shifted_ = Eigen::VectorXd::Zero(opts_.mpc.n_c);
        w_forecast_.assign(static_cast<std::size_t>(opts_.mpc.n_p), PolarTargetAccel{});
        warm_.reset();
    }

    GuidanceCommand step(const GuidanceMeasurement& m) override {
        const MpcConfig& cfg = opts_.mpc;
        GuidanceCommand cmd;
        const bool need_history = kind_ == LawKind::NmpcTap;
        const bool warmup = steps_ < opts_.warmup_steps || (need_history && !m.history_ready);
        ++steps_;
        if (warmup) {
            // Rate-limited PN keeps the input history within the NMPC
            // magnitude and rate envelope while the buffers fill.
            double u = pn_command(m.eng, opts_.n_prime, cfg.u_max);
            u = std::clamp(u, u_prev_ + cfg.du_min, u_prev_ + cfg.du_max);
            u = std::clamp(u, cfg.u_min, cfg.u_max);
            cmd.u = u;
            cmd.du = u - u_prev_;
            cmd.warmup = true;
            u_prev_ = u;
            return cmd;
        }

        if (kind_ == LawKind::NmpcTap) {
            // First pass supplies the nominal LOS forecast for the predictor.
            PredictionMatrices pm0 =
                rollout_nominal(m.eng, u_prev_, du_shifted_, w_forecast_, cfg, m.theta_m);
            const std::vector<FeatureRow>& buf = *m.history;
            std::vector<FeatureRow> window(buf.end() - opts_.model->n_history, buf.end());
            const double v_t = std::max(m.v_t, 1.0);
            w_forecast_ = predict_polar(*opts_.model, window, pm0.lambda_nominal, m.theta_t, v_t,
                                        cfg.n_p);
        } else {
            w_forecast_.assign(static_cast<std::size_t>(cfg.n_p), PolarTargetAccel{});
        }

        PredictionMatrices pm =
            rollout_nominal(m.eng, u_prev_, du_shifted_, w_forecast_, cfg, m.theta_m);
        cmd.w_first = w_forecast_.front();
        QPProblem qp = kind_ == LawKind::NmpcTap ? build_tap_qp(pm, cfg, u_prev_)
                                                 : build_unknown_qp(pm, cfg, u_prev_);
        QPSolveOptions sopts;
        if (warm_ && warm_->size() == qp.num_vars()) sopts.warm_start = *warm_;
        QPSolution sol = solve(qp, sopts);
        cmd.qp_status = sol.status;
        cmd.qp_iterations = sol.iterations;

        if (sol.status == QPStatus::Optimal) {
            const double du_raw = sol.z(0);
            cmd.du = std::clamp(du_raw, cfg.du_min, cfg.du_max);
            cmd.u = std::clamp(u_prev_ + cmd.du, cfg.u_min, cfg.u_max);
            cmd.du = cmd.u - u_prev_;
            Eigen::VectorXd du_sol = sol.z.head(cfg.n_c);
            du_shifted_.head(cfg.n_c - 1) = du_sol.tail(cfg.n_c - 1);
            du_shifted_(cfg.n_c - 1) = 0.0;
            // Shift the solution for next step's warm start.
            Eigen::VectorXd next = sol.z;
            next.head(cfg.n_c) = du_shifted_;
            warm_ = next;
            cmd.predicted_x = predicted_states(pm, du_sol);
        } else {
            cmd.qp_fallback = true;  // hold previous input
            cmd.u = u_prev_;
            cmd.du = 0.0;
            du_shifted_.head(cfg.n_c - 1) = du_shifted_.tail(cfg.n_c - 1).eval();
            du_shifted_(cfg.n_c - 1) = 0.0;
            warm_.reset();
        }
        if (kind_ == LawKind::NmpcTap && !w_forecast_.empty()) {
            // Shift the forecast so the next lambda pass starts close.
            w_forecast_.erase(w_forecast_.begin());
            w_forecast_.push_back(w_forecast_.back());
        }
        u_prev_ = cmd.u;
        return cmd;
    }

    LawKind kind() const override { return kind_; }

private:
    LawKind kind_;
    LawOptions opts_;
    int steps_ = 0;
    Eigen::VectorXd du_shifted_;
    std::vector<PolarTargetAccel> w_forecast_;
    std::optional<Eigen::VectorXd> warm_;
};

}  // namespace

std::unique_ptr<GuidanceLaw> make_law(LawKind kind, const LawOptions& opts) {
    switch (kind) {
        case LawKind::Pn:
        case LawKind::Apn:
            return std::make_unique<PnLaw>(kind, opts);
        case LawKind::NmpcUnknown:
        case LawKind::NmpcTap:
            return std::make_unique<NmpcLaw>(kind, opts);
    }
    throw std::invalid_argument("make_law: bad kind");
}

}  // namespace ilab
