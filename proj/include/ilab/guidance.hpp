#pragma once

#include <memory>
#include <vector>

#include "ilab/engagement.hpp"
#include "ilab/predict.hpp"
#include "ilab/qp.hpp"
#include "ilab/rnn.hpp"

namespace ilab {

/// Receding-horizon parameters. Defaults follow the benchmark configuration:
/// dt = 0.02 s, u_max = 25g, du_max = 0.025 u_max, d_max = 8g dt,
/// q = [0,0,0,100] (the cost penalizes the transversal velocity only), R = I.
struct MpcConfig {
    int n_p = 10;  // prediction horizon
    int n_c = 10;  // control horizon (= n_p in the benchmark runs)
    double dt = 0.02;
    Eigen::Vector4d q{0.0, 0.0, 0.0, 100.0};
    Eigen::MatrixXd r_weight;  // n_c x n_c; empty -> identity
    double u_max = 25.0 * kGravity;
    double u_min = -25.0 * kGravity;
    double du_max = 0.025 * 25.0 * kGravity;
    double du_min = -0.025 * 25.0 * kGravity;
    double d_max = 8.0 * kGravity * 0.02;
    double d_min = -8.0 * kGravity * 0.02;

    static MpcConfig make(int horizon, double dt = 0.02);
};

/// Stacked horizon quantities of the linearized prediction
///   X = F + G dU + g + d,
/// built around the nominal trajectory rolled out with the previous step's
/// shifted increment sequence.
struct PredictionMatrices {
    int n_p = 0;
    int n_c = 0;
    Eigen::VectorXd f_stack;  // 4 n_p
    Eigen::MatrixXd g_mat;    // 4 n_p x n_c, repeated feedthrough blocks
    Eigen::VectorXd g_prev;   // 4 n_p, feedthrough of the last applied input
    Eigen::VectorXd d_stack;  // 4 n_p, disturbance contributions
    std::vector<double> lambda_nominal;  // n_p LOS angles of the nominal rollout
    bool truncated = false;   // rollout hit r <= 0; remaining blocks frozen
};

/// Lower-triangular matrix of ones (the increment accumulation map).
Eigen::MatrixXd lower_triangular_ones(int n);

/// Nominal rollout per the receding-horizon recursion: inputs are
/// u_prev plus the cumulative shifted increments, disturbances follow w_seq
/// (length n_p; pass zeros for the unknown-acceleration variant). theta_m is
/// held fixed across the horizon.
PredictionMatrices rollout_nominal(const EngagementState& x, double u_prev,
                                   const Eigen::VectorXd& du_prev,
                                   const std::vector<PolarTargetAccel>& w_seq,
                                   const MpcConfig& cfg, double theta_m);

/// Stacked predicted states for a given increment vector: F + G dU + g + d.
Eigen::VectorXd predicted_states(const PredictionMatrices& pm, const Eigen::VectorXd& du);

/// QP over dU with the predicted-disturbance stack folded into the cost:
///   W = GᵀQG + R, c = 2GᵀQ(F+g+d),
///   E = [-I_lt; I_lt; -I; I], b = [-U_min + u_prev 1; U_max - u_prev 1; -dU_min; dU_max].
QPProblem build_tap_qp(const PredictionMatrices& pm, const MpcConfig& cfg, double u_prev);

/// QP over the stacked decision [dU; d] treating the bounded disturbance
/// stack as a decision variable:
///   W = [[GᵀQG+R, GᵀQ],[QG, Q]], c = [2GᵀQ(F+g); 2Q(F+g)],
/// with identity rows bounding d in [d_min, d_max].
QPProblem build_unknown_qp(const PredictionMatrices& pm, const MpcConfig& cfg, double u_prev);

/// Proportional navigation: u = N' V_c (v_lambda / r) with V_c = -v_r,
/// saturated to [-u_max, u_max].
double pn_command(const EngagementState& state, double n_prime, double u_max);

/// Augmented PN: PN plus (N'/2) times the transversal target acceleration.
double apn_command(const EngagementState& state, double a_tlambda, double n_prime, double u_max);

enum class LawKind { Pn, Apn, NmpcUnknown, NmpcTap };
const char* law_name(LawKind k);
LawKind parse_law(const std::string& s);

struct GuidanceCommand {
    double u = 0.0;
    double du = 0.0;                // applied first increment (NMPC laws)
    QPStatus qp_status = QPStatus::Optimal;
    bool qp_fallback = false;       // held previous input after a failed solve
    int qp_iterations = 0;
    bool warmup = false;            // still in the PN warm-up phase
    PolarTargetAccel w_first;       // disturbance used for the first step (TAP forecast)
    Eigen::VectorXd predicted_x;    // stacked horizon states at the solution
};

/// Everything a law may consume at one control step. All quantities come from
/// the measurement path; ground truth never enters here.
struct GuidanceMeasurement {
    EngagementState eng;
    double theta_m = 0.0;       // own heading, known exactly
    double a_tlambda = 0.0;     // measured transversal target acceleration (APN)
    double theta_t = 0.0;       // target heading from measured velocity
    double v_t = 0.0;           // measured target speed
    const std::vector<FeatureRow>* history = nullptr;  // measurement buffer (TAP)
    bool history_ready = false; // buffer holds >= n_history rows
};

/// A guidance law instance carries per-engagement state (previous input,
/// shifted increments, forecast buffers); use one instance per engagement.
class GuidanceLaw {
public:
    virtual ~GuidanceLaw() = default;
    virtual GuidanceCommand step(const GuidanceMeasurement& m) = 0;
    virtual LawKind kind() const = 0;
    virtual void reset() = 0;
    double last_u() const { return u_prev_; }

protected:
    double u_prev_ = 0.0;
};

struct LawOptions {
    double n_prime = 3.0;
    MpcConfig mpc = MpcConfig::make(10);
    int warmup_steps = 0;  // NMPC laws run rate-limited PN for this many steps
    const EncoderDecoderModel* model = nullptr;  // required for NmpcTap
};

std::unique_ptr<GuidanceLaw> make_law(LawKind kind, const LawOptions& opts);

}  // namespace ilab
