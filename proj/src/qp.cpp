#include "ilab/qp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ilab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

QPProblem::QPProblem(Eigen::MatrixXd W_, Eigen::VectorXd c_, Eigen::MatrixXd E_,
                     Eigen::VectorXd b_)
    : W(std::move(W_)), c(std::move(c_)), E(std::move(E_)), b(std::move(b_)) {
    const Eigen::Index n = c.size();
    if (W.rows() != n || W.cols() != n) throw std::invalid_argument("QPProblem: W shape");
    if (E.size() > 0 && E.cols() != n) throw std::invalid_argument("QPProblem: E shape");
    if (E.rows() != b.size()) throw std::invalid_argument("QPProblem: E/b mismatch");
    if (!b.allFinite() || !c.allFinite() || !W.allFinite()) {
        throw std::invalid_argument("QPProblem: non-finite data");
    }
    if (E.rows() == 0) E.resize(0, n);
    W = 0.5 * (W + W.transpose().eval());
    // LDLT pivots give a cheap smallest-eigenvalue estimate for PSD matrices.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(W);
    const double min_pivot = ldlt.vectorD().minCoeff();
    if (min_pivot < 1e-9) {
        double eps = 1e-8 * W.trace() / static_cast<double>(n);
        if (eps <= 0.0) eps = 1e-12;  // fully zero cost matrix
        W.diagonal().array() += eps;
        ridge = eps;
    }
}

const char* qp_status_name(QPStatus s) {
    switch (s) {
        case QPStatus::Optimal: return "optimal";
        case QPStatus::MaxIter: return "max-iter";
        case QPStatus::Infeasible: return "infeasible";
    }
    return "?";
}

KKTResiduals kkt_residuals(const QPProblem& p, const Eigen::VectorXd& z,
                           const Eigen::VectorXd& duals) {
    KKTResiduals res;
    Eigen::VectorXd grad = 2.0 * (p.W * z) + p.c;
    if (p.E.rows() > 0) grad += p.E.transpose() * duals;
    res.stationarity = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
    if (p.E.rows() > 0) {
        Eigen::VectorXd slack = p.E * z - p.b;
        res.primal = std::max(0.0, slack.maxCoeff());
        res.complementarity = (duals.array() * slack.array()).abs().maxCoeff();
    }
    return res;
}

namespace {

// sqrt(a^2 + b^2) without overflow, as used by the Givens updates.
double dist(double a, double b) {
    const double a1 = std::abs(a), b1 = std::abs(b);
    if (a1 > b1) {
        const double t = b1 / a1;
        return a1 * std::sqrt(1.0 + t * t);
    }
    if (b1 > a1) {
        const double t = a1 / b1;
        return b1 * std::sqrt(1.0 + t * t);
    }
    return a1 * std::sqrt(2.0);
}

/// Dual active-set iteration (Goldfarb-Idnani) on
///   min 1/2 xᵀGx + aᵀx  s.t.  nᵢᵀx >= b0ᵢ,
/// mapped from the QPProblem form by G = 2W, a = c, nᵢ = -Eᵢᵀ, b0ᵢ = -bᵢ.
class DualActiveSet {
public:
    DualActiveSet(const QPProblem& p, double tol, int max_iter)
        : p_(p),
          n_(p.num_vars()),
          m_(p.num_constraints()),
          tol_(tol),
          max_iter_(max_iter) {}

    QPStatus run(Eigen::VectorXd& x_out, Eigen::VectorXd& u_out,
                 std::vector<int>& active_out, int& iters_out) {
        const Eigen::MatrixXd G = 2.0 * p_.W;
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("qp solve: cost matrix not positive definite");
        }
        // J = L^-T; the working basis all updates rotate.
        J_ = llt.matrixL().solve(Eigen::MatrixXd::Identity(n_, n_)).transpose();
        R_.setZero(n_, n_);
        x_ = -llt.solve(p_.c);
        u_.setZero(m_);
        active_.clear();
        iq_ = 0;

        int iters = 0;
        QPStatus status = QPStatus::Optimal;
        while (true) {
            if (iters >= max_iter_) {
                status = QPStatus::MaxIter;
                break;
            }
            // Most violated inactive constraint, lowest index on ties.
            int p_idx = -1;
            double worst = -violation_eps();
            for (int i = 0; i < m_; ++i) {
                if (is_active(i)) continue;
                const double s = slack(i);
                if (s < worst) {
                    worst = s;
                    p_idx = i;
                }
            }
            if (p_idx < 0) break;  // all satisfied

            Eigen::VectorXd np = -p_.E.row(p_idx).transpose();
            double u_plus = 0.0;  // multiplier of the entering constraint
            while (true) {
                if (++iters > max_iter_) {
                    status = QPStatus::MaxIter;
                    break;
                }
                const Eigen::VectorXd d = J_.transpose() * np;
                Eigen::VectorXd z = Eigen::VectorXd::Zero(n_);
                if (iq_ < n_) z = J_.rightCols(n_ - iq_) * d.tail(n_ - iq_);
                Eigen::VectorXd r(iq_);
                for (int i = iq_ - 1; i >= 0; --i) {
                    double sum = d(i);
                    for (int j = i + 1; j < iq_; ++j) sum -= R_(i, j) * r(j);
                    r(i) = sum / R_(i, i);
                }

                // Partial step: first active multiplier driven to zero.
                double t1 = kInf;
                int drop = -1;
                for (int k = 0; k < iq_; ++k) {
                    if (r(k) > 0.0) {
                        const double ratio = u_(active_[static_cast<std::size_t>(k)]) / r(k);
                        if (ratio < t1) {
                            t1 = ratio;
                            drop = k;
                        }
                    }
                }
                // Full step: entering constraint becomes satisfied.
                const double ztnp = z.dot(np);
                const double t2 = (z.norm() > 1e-14 && ztnp > 0.0)
                                      ? -slack(p_idx) / ztnp
                                      : kInf;
                const double t = std::min(t1, t2);
                if (t >= kInf) {
                    status = QPStatus::Infeasible;  // dual unbounded certificate
                    break;
                }

                if (t2 >= kInf) {
                    // Dual-only step.
                    for (int k = 0; k < iq_; ++k) u_(active_[static_cast<std::size_t>(k)]) -= t * r(k);
                    u_plus += t;
                    drop_constraint(drop);
                    continue;
                }

                x_ += t * z;
                for (int k = 0; k < iq_; ++k) u_(active_[static_cast<std::size_t>(k)]) -= t * r(k);
                u_plus += t;

                if (t == t2) {
                    u_(p_idx) = u_plus;
                    if (!add_constraint(d, p_idx)) {
                        status = QPStatus::MaxIter;  // dependent constraint; bail out
                    }
                    break;
                }
                drop_constraint(drop);
            }
            if (status != QPStatus::Optimal) break;
        }

        x_out = x_;
        u_out = u_;
        active_out = active_;
        iters_out = iters;
        return status;
    }

private:
    double violation_eps() const {
        // Small scale-aware threshold; final classification uses opts.tol.
        const double bscale = m_ > 0 ? p_.b.cwiseAbs().maxCoeff() : 0.0;
        return 1e-11 * (1.0 + bscale);
    }

    double slack(int i) const { return p_.b(i) - p_.E.row(i).dot(x_); }  // >= 0 when satisfied

    bool is_active(int i) const {
        for (int a : active_)
            if (a == i) return true;
        return false;
    }

    bool add_constraint(const Eigen::VectorXd& d, int idx) {
        Eigen::VectorXd dd = d;
        // Rotate components iq+1..n-1 of d into component iq, updating J.
        for (int j = n_ - 1; j > iq_; --j) {
            double cc = dd(j - 1), ss = dd(j);
            const double h = dist(cc, ss);
            if (h == 0.0) continue;
            dd(j) = 0.0;
            ss /= h;
            cc /= h;
            if (cc < 0.0) {
                cc = -cc;
                ss = -ss;
                dd(j - 1) = -h;
            } else {
                dd(j - 1) = h;
            }
            const double xny = ss / (1.0 + cc);
            for (int k = 0; k < n_; ++k) {
                const double t1 = J_(k, j - 1), t2 = J_(k, j);
                J_(k, j - 1) = t1 * cc + t2 * ss;
                J_(k, j) = xny * (t1 + J_(k, j - 1)) - t2;
            }
        }
        if (std::abs(dd(iq_)) <= 1e-14 * dd.head(iq_ + 1).norm()) {
            return false;  // linearly dependent with the active set
        }
        active_.push_back(idx);
        ++iq_;
        R_.col(iq_ - 1).head(iq_) = dd.head(iq_);
        return true;
    }

    void drop_constraint(int k) {
        u_(active_[static_cast<std::size_t>(k)]) = 0.0;
        active_.erase(active_.begin() + k);
        // Shift columns of R left and re-triangularize with Givens rotations.
        for (int j = k; j < iq_ - 1; ++j) R_.col(j).head(iq_) = R_.col(j + 1).head(iq_);
        --iq_;
        for (int j = k; j < iq_; ++j) {
            double cc = R_(j, j), ss = R_(j + 1, j);
            const double h = dist(cc, ss);
            if (h == 0.0) continue;
            cc /= h;
            ss /= h;
            R_(j + 1, j) = 0.0;
            if (cc < 0.0) {
                R_(j, j) = -h;
                cc = -cc;
                ss = -ss;
            } else {
                R_(j, j) = h;
            }
            const double xny = ss / (1.0 + cc);
            for (int col = j + 1; col < iq_; ++col) {
                const double t1 = R_(j, col), t2 = R_(j + 1, col);
                R_(j, col) = t1 * cc + t2 * ss;
                R_(j + 1, col) = xny * (t1 + R_(j, col)) - t2;
            }
            for (int row = 0; row < n_; ++row) {
                const double t1 = J_(row, j), t2 = J_(row, j + 1);
                J_(row, j) = t1 * cc + t2 * ss;
                J_(row, j + 1) = xny * (J_(row, j) + t1) - t2;
            }
        }
        R_.col(iq_).setZero();
    }

    const QPProblem& p_;
    int n_;
    int m_;
    double tol_;
    int max_iter_;
    Eigen::MatrixXd J_;
    Eigen::MatrixXd R_;
    Eigen::VectorXd x_;
    Eigen::VectorXd u_;
    std::vector<int> active_;
    int iq_ = 0;
};

/// Re-solve the equality-constrained KKT system on the final active set and
/// apply one step of iterative refinement. Brings the residuals from the
/// rotation-based iterate down to machine level even for ridged problems.
void polish(const QPProblem& p, const std::vector<int>& active, Eigen::VectorXd& z,
            Eigen::VectorXd& duals) {
    const Eigen::Index n = p.num_vars();
    const Eigen::Index na = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd K(n + na, n + na);
    K.setZero();
    K.topLeftCorner(n, n) = 2.0 * p.W;
    for (Eigen::Index k = 0; k < na; ++k) {
        K.block(0, n + k, n, 1) = p.E.row(active[static_cast<std::size_t>(k)]).transpose();
        K.block(n + k, 0, 1, n) = p.E.row(active[static_cast<std::size_t>(k)]);
    }
    Eigen::VectorXd rhs(n + na);
    rhs.head(n) = -p.c;
    for (Eigen::Index k = 0; k < na; ++k) rhs(n + k) = p.b(active[static_cast<std::size_t>(k)]);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    Eigen::VectorXd sol = lu.solve(rhs);
    sol += lu.solve(rhs - K * sol);  // one refinement pass

    Eigen::VectorXd mu = sol.tail(na);
    if ((mu.array() < -1e-7).any()) return;  // keep the active-set iterate instead
    z = sol.head(n);
    duals.setZero(p.num_constraints());
    for (Eigen::Index k = 0; k < na; ++k) {
        duals(active[static_cast<std::size_t>(k)]) = std::max(0.0, mu(k));
    }
}

bool warm_start_optimal(const QPProblem& p, const Eigen::VectorXd& z0, double tol,
                        QPSolution& out) {
    if (z0.size() != p.num_vars()) return false;
    const Eigen::Index m = p.num_constraints();
    Eigen::VectorXd slack = m > 0 ? Eigen::VectorXd(p.E * z0 - p.b) : Eigen::VectorXd();
    if (m > 0 && slack.maxCoeff() > tol) return false;
    std::vector<int> active;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (slack(i) > -tol) active.push_back(static_cast<int>(i));
    }
    // Least-squares dual recovery on the tight constraints.
    Eigen::VectorXd grad = 2.0 * (p.W * z0) + p.c;
    Eigen::VectorXd duals = Eigen::VectorXd::Zero(m);
    if (!active.empty()) {
        Eigen::MatrixXd Ea(active.size(), p.num_vars());
        for (std::size_t k = 0; k < active.size(); ++k) Ea.row(k) = p.E.row(active[k]);
        Eigen::VectorXd mu =
            Ea.transpose().colPivHouseholderQr().solve(-grad);
        if ((mu.array() < -tol).any()) return false;
        for (std::size_t k = 0; k < active.size(); ++k) {
            duals(active[k]) = std::max(0.0, mu(static_cast<Eigen::Index>(k)));
        }
    }
    KKTResiduals res = kkt_residuals(p, z0, duals);
    if (res.stationarity > tol || res.primal > tol || res.complementarity > tol) return false;
    out.z = z0;
    out.duals = duals;
    out.status = QPStatus::Optimal;
    out.iterations = 0;
    out.residuals = res;
    return true;
}

}  // namespace

QPSolution solve(const QPProblem& p, const QPSolveOptions& opts) {
    QPSolution out;
    if (opts.warm_start && warm_start_optimal(p, *opts.warm_start, opts.tol, out)) {
        return out;
    }

    DualActiveSet solver(p, opts.tol, opts.max_iter);
    Eigen::VectorXd x, u;
    std::vector<int> active;
    int iters = 0;
    QPStatus status = solver.run(x, u, active, iters);

    if (status == QPStatus::Optimal) {
        polish(p, active, x, u);
    }
    out.z = x;
    out.duals = u.cwiseMax(0.0);
    out.iterations = iters;
    out.residuals = kkt_residuals(p, out.z, out.duals);
    if (status == QPStatus::Optimal &&
        (out.residuals.stationarity > opts.tol || out.residuals.primal > opts.tol ||
         out.residuals.complementarity > opts.tol)) {
        status = QPStatus::MaxIter;  // converged iterate failed verification
    }
    out.status = status;
    return out;
}

}  // namespace ilab
