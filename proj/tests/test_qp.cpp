#include <doctest.h>

#include <Eigen/Dense>

#include "ilab/qp.hpp"
#include "ilab/rng.hpp"
#include "oracles.hpp"

using namespace ilab;

namespace {

QPProblem random_problem(Rng& rng, int n, int m) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Eigen::MatrixXd W = A.transpose() * A + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = 3.0 * rng.normal();
    Eigen::MatrixXd E(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) E(i, j) = rng.normal();
    // Anchor feasibility at a random point so most problems are solvable.
    Eigen::VectorXd z0(n);
    for (int i = 0; i < n; ++i) z0(i) = 0.5 * rng.normal();
    Eigen::VectorXd b = E * z0;
    for (int i = 0; i < m; ++i) b(i) += rng.uniform(0.0, 1.5);
    return QPProblem(std::move(W), std::move(c), std::move(E), std::move(b));
}

}  // namespace

TEST_CASE("unconstrained stationarity") {
    Eigen::MatrixXd W = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd c(2);
    c << -2.0, 0.0;
    QPProblem p(W, c, Eigen::MatrixXd(0, 2), Eigen::VectorXd(0));
    const QPSolution sol = solve(p);
    REQUIRE(sol.status == QPStatus::Optimal);
    CHECK(sol.z(0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.z(1) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("single active bound with known multiplier") {
    Eigen::MatrixXd W(1, 1);
    W << 1.0;
    Eigen::VectorXd c(1);
    c << -2.0;
    Eigen::MatrixXd E(1, 1);
    E << 1.0;
    Eigen::VectorXd b(1);
    b << 0.3;
    QPProblem p(W, c, E, b);
    const QPSolution sol = solve(p);
    REQUIRE(sol.status == QPStatus::Optimal);
    CHECK(sol.z(0) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(sol.duals(0) == doctest::Approx(1.4).epsilon(1e-10));
}

TEST_CASE("200 random problems match the enumeration oracle") {
    Rng rng(2024);
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(5));   // 2..6
        const int m = 1 + static_cast<int>(rng.uniform_int(12));  // 1..12
        const QPProblem p = random_problem(rng, n, m);
        const auto ref = oracles::qp_enumerate(p.W, p.c, p.E, p.b);
        REQUIRE(ref.has_value());
        const QPSolution sol = solve(p);
        REQUIRE(sol.status == QPStatus::Optimal);
        CHECK(p.objective(sol.z) == doctest::Approx(ref->objective).epsilon(1e-6));
        CHECK((sol.z - ref->z).norm() < 1e-5);
        CHECK(sol.residuals.stationarity < 1e-6);
        CHECK(sol.residuals.primal < 1e-6);
        CHECK(sol.residuals.complementarity < 1e-6);
        ++solved;
    }
    CHECK(solved == 200);
}

TEST_CASE("kkt_residuals") {
    Eigen::MatrixXd W(2, 2);
    W << 2.0, 0.5, 0.5, 1.0;
    Eigen::VectorXd c(2);
    c << 1.0, -3.0;
    Eigen::MatrixXd E(2, 2);
    E << 1.0, 0.0, 0.0, 1.0;
    Eigen::VectorXd b(2);
    b << 10.0, 10.0;
    QPProblem p(W, c, E, b);
    const QPSolution sol = solve(p);
    REQUIRE(sol.status == QPStatus::Optimal);
    SUBCASE("optimal pair has tiny residuals") {
        const auto res = kkt_residuals(p, sol.z, sol.duals);
        CHECK(res.stationarity < 1e-10);
        CHECK(res.primal < 1e-10);
        CHECK(res.complementarity < 1e-10);
    }
    SUBCASE("perturbing z shows up in stationarity") {
        Eigen::VectorXd z = sol.z;
        z(0) += 0.1;
        const auto res = kkt_residuals(p, z, sol.duals);
        CHECK(res.stationarity > 0.01);
    }
    SUBCASE("hand-expanded 2x2 residuals") {
        Eigen::VectorXd z(2), mu(2);
        z << 1.0, 2.0;
        mu << 0.5, 0.0;
        const auto res = kkt_residuals(p, z, mu);
        // grad = 2Wz + c + E^T mu, expanded by hand:
        // [2*(2*1+0.5*2)+1+0.5, 2*(0.5*1+1*2)-3+0] = [7.5, 2.0]
        CHECK(res.stationarity == doctest::Approx(7.5).epsilon(1e-12));
        CHECK(res.primal == 0.0);  // z well inside the box
        // complementarity: |mu_0 (z_0 - 10)| = 0.5 * 9 = 4.5
        CHECK(res.complementarity == doctest::Approx(4.5).epsilon(1e-12));
    }
}

TEST_CASE("infeasible problem is reported") {
    Eigen::MatrixXd W = Eigen::MatrixXd::Identity(1, 1);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(1);
    Eigen::MatrixXd E(2, 1);
    E << 1.0, -1.0;
    Eigen::VectorXd b(2);
    b << -1.0, -1.0;  // z <= -1 and z >= 1
    QPProblem p(W, c, E, b);
    const QPSolution sol = solve(p);
    CHECK(sol.status == QPStatus::Infeasible);
}

TEST_CASE("scaling (W, c) jointly leaves the argmin unchanged") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const QPProblem p = random_problem(rng, 4, 8);
        const double alpha = rng.uniform(0.1, 10.0);
        QPProblem scaled(alpha * p.W, alpha * p.c, p.E, p.b);
        const QPSolution s1 = solve(p);
        const QPSolution s2 = solve(scaled);
        REQUIRE(s1.status == QPStatus::Optimal);
        REQUIRE(s2.status == QPStatus::Optimal);
        CHECK((s1.z - s2.z).norm() < 1e-6 * (1.0 + s1.z.norm()));
    }
}

TEST_CASE("ridge regularization handles singular cost") {
    // Diagonal cost with zero entries, as in the block QP with q = [0,0,0,100].
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(3, 3);
    W(2, 2) = 100.0;
    Eigen::VectorXd c(3);
    c << 0.0, 0.0, -200.0;
    Eigen::MatrixXd E(3, 3);
    E << Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(3, 0.5);
    QPProblem p(W, c, E, b);
    CHECK(p.ridge > 0.0);
    const QPSolution sol = solve(p);
    REQUIRE(sol.status == QPStatus::Optimal);
    CHECK(sol.z(2) == doctest::Approx(0.5).epsilon(1e-6));  // pushed to its bound
    CHECK(std::abs(sol.z(0)) < 1e-6);  // ridge pins the free directions
    CHECK(std::abs(sol.z(1)) < 1e-6);
}

TEST_CASE("warm start returns immediately when already optimal") {
    Rng rng(7);
    const QPProblem p = random_problem(rng, 4, 6);
    const QPSolution first = solve(p);
    REQUIRE(first.status == QPStatus::Optimal);
    QPSolveOptions opts;
    opts.warm_start = first.z;
    const QPSolution second = solve(p, opts);
    REQUIRE(second.status == QPStatus::Optimal);
    CHECK(second.iterations == 0);
    CHECK((second.z - first.z).norm() < 1e-9);
}

TEST_CASE("max_iter returns the best iterate with MaxIter status") {
    Rng rng(55);
    const QPProblem p = random_problem(rng, 6, 12);
    QPSolveOptions opts;
    opts.max_iter = 1;
    const QPSolution sol = solve(p, opts);
    CHECK(sol.status == QPStatus::MaxIter);
    CHECK(sol.z.size() == 6);
}

TEST_CASE("optimal objective is never above any oracle candidate") {
    Rng rng(4242);
    for (int trial = 0; trial < 30; ++trial) {
        const QPProblem p = random_problem(rng, 3, 6);
        const auto ref = oracles::qp_enumerate(p.W, p.c, p.E, p.b);
        REQUIRE(ref.has_value());
        const QPSolution sol = solve(p);
        REQUIRE(sol.status == QPStatus::Optimal);
        CHECK(p.objective(sol.z) <= ref->objective + 1e-8);
    }
}
