#pragma once

#include <Eigen/Dense>
#include <optional>

namespace ilab {

/// Dense convex QP:  min zᵀWz + cᵀz  s.t.  Ez <= b.
/// Note the cost carries no 1/2 factor, so stationarity reads 2Wz + c + Eᵀμ = 0.
/// Construction symmetrizes W and, when the smallest-eigenvalue estimate is
/// below 1e-9, adds a ridge eps = 1e-8 * trace(W)/n to the diagonal so the
/// factorization in the solver is well defined.
struct QPProblem {
    Eigen::MatrixXd W;  // n x n, symmetric positive definite after construction
    Eigen::VectorXd c;  // n
    Eigen::MatrixXd E;  // m x n
    Eigen::VectorXd b;  // m
    double ridge = 0.0; // ridge actually added (0 when W was already PD)

    QPProblem(Eigen::MatrixXd W_, Eigen::VectorXd c_, Eigen::MatrixXd E_, Eigen::VectorXd b_);

    Eigen::Index num_vars() const { return c.size(); }
    Eigen::Index num_constraints() const { return b.size(); }

    double objective(const Eigen::VectorXd& z) const {
        return z.dot(W * z) + c.dot(z);
    }
};

enum class QPStatus { Optimal, MaxIter, Infeasible };

const char* qp_status_name(QPStatus s);

struct KKTResiduals {
    double stationarity = 0.0;    // ||2Wz + c + Eᵀμ||_inf
    double primal = 0.0;          // max(0, max_i (E_i z - b_i))
    double complementarity = 0.0; // max_i |μ_i (E_i z - b_i)|
};

struct QPSolution {
    Eigen::VectorXd z;
    Eigen::VectorXd duals;  // m, >= 0
    QPStatus status = QPStatus::MaxIter;
    int iterations = 0;
    KKTResiduals residuals;
};

struct QPSolveOptions {
    double tol = 1e-6;
    int max_iter = 4000;
    /// Previous solution (shifted) for receding-horizon reuse: when the KKT
    /// conditions already hold there, the solve returns immediately.
    std::optional<Eigen::VectorXd> warm_start;
};

/// Dual active-set solve. Optimal returns satisfy Ez <= b + tol,
/// |μ_i(E_i z - b_i)| <= tol and ||2Wz + c + Eᵀμ||_inf <= tol.
QPSolution solve(const QPProblem& p, const QPSolveOptions& opts = {});

KKTResiduals kkt_residuals(const QPProblem& p, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& duals);

}  // namespace ilab
