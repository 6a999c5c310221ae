#include "oracles.hpp"

#include <cmath>

namespace oracles {

std::optional<EnumResult> qp_enumerate(const Eigen::MatrixXd& W, const Eigen::VectorXd& c,
                                       const Eigen::MatrixXd& E, const Eigen::VectorXd& b,
                                       double feas_tol) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(b.size());
    std::optional<EnumResult> best;

    auto consider = [&](const Eigen::VectorXd& z) {
        if (m > 0 && ((E * z - b).array() > feas_tol).any()) return;
        const double obj = z.dot(W * z) + c.dot(z);
        if (!best || obj < best->objective - 1e-15) {
            best = EnumResult{z, obj};
        }
    };

    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> active;
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i)) active.push_back(i);
        }
        if (static_cast<int>(active.size()) > n) continue;
        const int na = static_cast<int>(active.size());
        Eigen::MatrixXd K(n + na, n + na);
        K.setZero();
        K.topLeftCorner(n, n) = 2.0 * W;
        for (int k = 0; k < na; ++k) {
            K.block(0, n + k, n, 1) = E.row(active[static_cast<std::size_t>(k)]).transpose();
            K.block(n + k, 0, 1, n) = E.row(active[static_cast<std::size_t>(k)]);
        }
        Eigen::VectorXd rhs(n + na);
        rhs.head(n) = -c;
        for (int k = 0; k < na; ++k) rhs(n + k) = b(active[static_cast<std::size_t>(k)]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd sol = lu.solve(rhs);
        consider(sol.head(n));
    }
    return best;
}

namespace {

double dotrow(const std::vector<std::vector<double>>& w, std::size_t row,
              const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += w[row][j] * v[j];
    return s;
}

double sigmoid1(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double wrap_pi(double a) {
    while (a > 3.14159265358979323846) a -= 2.0 * 3.14159265358979323846;
    while (a <= -3.14159265358979323846) a += 2.0 * 3.14159265358979323846;
    return a;
}

}  // namespace

std::vector<double> scalar_rnn_step(const std::vector<std::vector<double>>& w_x,
                                    const std::vector<std::vector<double>>& w_h,
                                    const std::vector<double>& b, const std::vector<double>& x,
                                    const std::vector<double>& h) {
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        out[i] = std::tanh(dotrow(w_x, i, x) + dotrow(w_h, i, h) + b[i]);
    }
    return out;
}

ScalarLstmState scalar_lstm_step(const std::vector<std::vector<double>>& w_x,
                                 const std::vector<std::vector<double>>& w_h,
                                 const std::vector<double>& b, const std::vector<double>& x,
                                 const ScalarLstmState& state) {
    const std::size_t H = state.h.size();
    ScalarLstmState out;
    out.h.resize(H);
    out.c.resize(H);
    for (std::size_t k = 0; k < H; ++k) {
        const double zi = dotrow(w_x, k, x) + dotrow(w_h, k, state.h) + b[k];
        const double zf = dotrow(w_x, H + k, x) + dotrow(w_h, H + k, state.h) + b[H + k];
        const double zg = dotrow(w_x, 2 * H + k, x) + dotrow(w_h, 2 * H + k, state.h) + b[2 * H + k];
        const double zo = dotrow(w_x, 3 * H + k, x) + dotrow(w_h, 3 * H + k, state.h) + b[3 * H + k];
        const double i = sigmoid1(zi);
        const double f = sigmoid1(zf);
        const double g = std::tanh(zg);
        const double o = sigmoid1(zo);
        out.c[k] = f * state.c[k] + i * g;
        out.h[k] = o * std::tanh(out.c[k]);
    }
    return out;
}

HandExpansion hand_expand_np2(const std::array<double, 4>& x0, double theta_m, double dt,
                              double u_prev, const std::array<double, 2>& du_prev,
                              const std::array<std::array<double, 2>, 2>& w_seq,
                              const std::array<double, 4>& q, double u_max, double du_max) {
    auto f_of = [&](const std::array<double, 4>& x) {
        std::array<double, 4> f;
        f[0] = x[0] + dt * x[1];
        f[1] = x[1] + dt * (x[3] * x[3] / x[0]);
        f[2] = wrap_pi(x[2] + dt * (x[3] / x[0]));
        f[3] = x[3] + dt * (-x[1] * x[3] / x[0]);
        return f;
    };
    auto g_of = [&](const std::array<double, 4>& x) {
        std::array<double, 4> g;
        const double off = wrap_pi(theta_m - x[2]);
        g[0] = 0.0;
        g[1] = dt * std::sin(off);
        g[2] = 0.0;
        g[3] = -(dt * std::cos(off));
        return g;
    };
    auto d_of = [&](const std::array<double, 2>& w) {
        return std::array<double, 4>{0.0, dt * w[0], 0.0, dt * w[1]};
    };

    const std::array<double, 4> f0 = f_of(x0);
    const std::array<double, 4> g0 = g_of(x0);
    const std::array<double, 4> d0 = d_of(w_seq[0]);

    // Nominal second state uses the shifted previous increment sequence.
    const double u0 = u_prev + du_prev[0];
    std::array<double, 4> x1;
    for (int i = 0; i < 4; ++i) x1[static_cast<std::size_t>(i)] = f0[static_cast<std::size_t>(i)] +
                                                                  g0[static_cast<std::size_t>(i)] * u0 +
                                                                  d0[static_cast<std::size_t>(i)];
    x1[2] = wrap_pi(x1[2]);
    const std::array<double, 4> f1 = f_of(x1);
    const std::array<double, 4> g1 = g_of(x1);
    const std::array<double, 4> d1 = d_of(w_seq[1]);

    HandExpansion he{};
    for (int i = 0; i < 4; ++i) {
        he.f[static_cast<std::size_t>(i)] = f0[static_cast<std::size_t>(i)];
        he.f[static_cast<std::size_t>(4 + i)] = f1[static_cast<std::size_t>(i)];
        he.g_mat[static_cast<std::size_t>(i)] = {g0[static_cast<std::size_t>(i)], 0.0};
        he.g_mat[static_cast<std::size_t>(4 + i)] = {g1[static_cast<std::size_t>(i)],
                                                     g1[static_cast<std::size_t>(i)]};
        he.g_prev[static_cast<std::size_t>(i)] = g0[static_cast<std::size_t>(i)] * u_prev;
        he.g_prev[static_cast<std::size_t>(4 + i)] = g1[static_cast<std::size_t>(i)] * u_prev;
        he.d[static_cast<std::size_t>(i)] = d0[static_cast<std::size_t>(i)];
        he.d[static_cast<std::size_t>(4 + i)] = d1[static_cast<std::size_t>(i)];
    }

    auto qw = [&](int i) { return q[static_cast<std::size_t>(i % 4)]; };

    for (int a = 0; a < 2; ++a) {
        for (int bcol = 0; bcol < 2; ++bcol) {
            double s = 0.0;
            for (int i = 0; i < 8; ++i) {
                s += he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] * qw(i) *
                     he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(bcol)];
            }
            he.w_tap[static_cast<std::size_t>(a)][static_cast<std::size_t>(bcol)] =
                s + (a == bcol ? 1.0 : 0.0);
        }
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
            s += he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] * qw(i) *
                 (he.f[static_cast<std::size_t>(i)] + he.g_prev[static_cast<std::size_t>(i)] +
                  he.d[static_cast<std::size_t>(i)]);
        }
        he.c_tap[static_cast<std::size_t>(a)] = 2.0 * s;
    }

    // Block form over [dU; d]; the response here carries no disturbance term.
    for (auto& row : he.w_unknown) row.fill(0.0);
    for (int a = 0; a < 2; ++a) {
        for (int bcol = 0; bcol < 2; ++bcol) {
            double s = 0.0;
            for (int i = 0; i < 8; ++i) {
                s += he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] * qw(i) *
                     he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(bcol)];
            }
            he.w_unknown[static_cast<std::size_t>(a)][static_cast<std::size_t>(bcol)] =
                s + (a == bcol ? 1.0 : 0.0);
        }
        for (int i = 0; i < 8; ++i) {
            he.w_unknown[static_cast<std::size_t>(a)][static_cast<std::size_t>(2 + i)] =
                he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] * qw(i);
            he.w_unknown[static_cast<std::size_t>(2 + i)][static_cast<std::size_t>(a)] =
                qw(i) * he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
        }
    }
    for (int i = 0; i < 8; ++i) {
        he.w_unknown[static_cast<std::size_t>(2 + i)][static_cast<std::size_t>(2 + i)] = qw(i);
    }
    for (int a = 0; a < 2; ++a) {
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
            s += he.g_mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] * qw(i) *
                 (he.f[static_cast<std::size_t>(i)] + he.g_prev[static_cast<std::size_t>(i)]);
        }
        he.c_unknown[static_cast<std::size_t>(a)] = 2.0 * s;
    }
    for (int i = 0; i < 8; ++i) {
        he.c_unknown[static_cast<std::size_t>(2 + i)] =
            2.0 * qw(i) *
            (he.f[static_cast<std::size_t>(i)] + he.g_prev[static_cast<std::size_t>(i)]);
    }

    // [-I_lt; I_lt; -I; I] with I_lt = [[1,0],[1,1]].
    he.e_input = {{{-1.0, 0.0},
                   {-1.0, -1.0},
                   {1.0, 0.0},
                   {1.0, 1.0},
                   {-1.0, 0.0},
                   {0.0, -1.0},
                   {1.0, 0.0},
                   {0.0, 1.0}}};
    he.b_input = {u_max + u_prev, u_max + u_prev, u_max - u_prev, u_max - u_prev,
                  du_max,         du_max,         du_max,         du_max};
    return he;
}

}  // namespace oracles
