#pragma once

// Test-only reference implementations, written independently of the library
// code paths they check (plain scalar loops, brute-force enumeration).

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

namespace oracles {

/// Brute-force reference for min zWz + cz s.t. Ez <= b: solve the
/// equality-constrained KKT system for every active subset and keep the
/// feasible candidate with the smallest objective.
struct EnumResult {
    Eigen::VectorXd z;
    double objective = 0.0;
};
std::optional<EnumResult> qp_enumerate(const Eigen::MatrixXd& W, const Eigen::VectorXd& c,
                                       const Eigen::MatrixXd& E, const Eigen::VectorXd& b,
                                       double feas_tol = 1e-8);

/// Scalar-loop recurrent cells (no Eigen in the arithmetic).
std::vector<double> scalar_rnn_step(const std::vector<std::vector<double>>& w_x,
                                    const std::vector<std::vector<double>>& w_h,
                                    const std::vector<double>& b, const std::vector<double>& x,
                                    const std::vector<double>& h);

struct ScalarLstmState {
    std::vector<double> h, c;
};
/// Gate packing [input; forget; candidate; output], matching the library.
ScalarLstmState scalar_lstm_step(const std::vector<std::vector<double>>& w_x,
                                 const std::vector<std::vector<double>>& w_h,
                                 const std::vector<double>& b, const std::vector<double>& x,
                                 const ScalarLstmState& state);

/// Spreadsheet-style expansion of the two-step prediction stack and both QP
/// forms for the polar engagement model, n_p = n_c = 2, scalar arithmetic.
struct HandExpansion {
    std::array<double, 8> f;          // stacked free response
    std::array<std::array<double, 2>, 8> g_mat;
    std::array<double, 8> g_prev;
    std::array<double, 8> d;
    // QP over dU (predicted disturbances):
    std::array<std::array<double, 2>, 2> w_tap;
    std::array<double, 2> c_tap;
    // Block QP over [dU; d] (unknown disturbances):
    std::array<std::array<double, 10>, 10> w_unknown;
    std::array<double, 10> c_unknown;
    // Shared input-constraint rows:
    std::array<std::array<double, 2>, 8> e_input;
    std::array<double, 8> b_input;
};
HandExpansion hand_expand_np2(const std::array<double, 4>& x0, double theta_m, double dt,
                              double u_prev, const std::array<double, 2>& du_prev,
                              const std::array<std::array<double, 2>, 2>& w_seq,
                              const std::array<double, 4>& q, double u_max, double du_max);

}  // namespace oracles
