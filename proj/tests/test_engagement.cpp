#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ilab/engagement.hpp"

using namespace ilab;

TEST_CASE("relative_state on the benchmark geometry") {
    const AgentState missile{0.0, 0.0, 0.0, 150.0};
    const AgentState target{1000.0, 1000.0, deg2rad(190.0), 100.0};
    const EngagementState s = relative_state(missile, target);
    CHECK(s.r == doctest::Approx(1414.2135623730951).epsilon(1e-12));
    CHECK(s.lambda == doctest::Approx(deg2rad(45.0)).epsilon(1e-12));
    // Frozen from a scalar evaluation of the LOS-frame velocity formulas and
    // cross-checked against the Cartesian relative velocity projected onto
    // the LOS/transversal directions.
    CHECK(s.v_r == doctest::Approx(-187.98122160688132).epsilon(1e-12));
    CHECK(s.v_lambda == doctest::Approx(163.4236608130867).epsilon(1e-12));
}

TEST_CASE("relative_state agrees with Cartesian projection for random geometry") {
    for (int trial = 0; trial < 50; ++trial) {
        const double a = 0.13 * trial, b = -0.21 * trial;
        const AgentState m{50.0 * trial, -30.0 * trial + 10.0, wrap_angle(a), 150.0};
        const AgentState t{40.0 * trial + 500.0, 25.0 * trial + 200.0, wrap_angle(b), 100.0};
        const EngagementState s = relative_state(m, t);
        const double lam = std::atan2(t.y - m.y, t.x - m.x);
        const double rvx = t.speed * std::cos(t.theta) - m.speed * std::cos(m.theta);
        const double rvy = t.speed * std::sin(t.theta) - m.speed * std::sin(m.theta);
        CHECK(s.v_r == doctest::Approx(rvx * std::cos(lam) + rvy * std::sin(lam)).epsilon(1e-10));
        CHECK(s.v_lambda ==
              doctest::Approx(-rvx * std::sin(lam) + rvy * std::cos(lam)).epsilon(1e-10));
    }
}

TEST_CASE("relative_state collinear case") {
    const AgentState m{0.0, 0.0, 0.0, 150.0};
    const AgentState t{500.0, 0.0, 0.0, 100.0};
    const EngagementState s = relative_state(m, t);
    CHECK(s.v_lambda == doctest::Approx(0.0));
    CHECK(s.v_r == doctest::Approx(100.0 - 150.0));
}

TEST_CASE("relative_state rejects coincident positions") {
    const AgentState m{1.0, 2.0, 0.0, 150.0};
    const AgentState t{1.0, 2.0, 1.0, 100.0};
    CHECK_THROWS_AS(relative_state(m, t), std::invalid_argument);
}

TEST_CASE("target_accel_polar") {
    SUBCASE("aligned") {
        const auto w = target_accel_polar(78.48, 0.3, 0.3);
        CHECK(w.a_tr == doctest::Approx(0.0));
        CHECK(w.a_tlambda == doctest::Approx(78.48));
    }
    SUBCASE("quadrature") {
        const auto w = target_accel_polar(78.48, deg2rad(90.0), 0.0);
        CHECK(w.a_tr == doctest::Approx(78.48).epsilon(1e-12));
        CHECK(w.a_tlambda == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("oblique, frozen from scalar trig evaluation") {
        const auto w = target_accel_polar(39.24, deg2rad(145.0), 0.0);
        CHECK(w.a_tr == doctest::Approx(22.507139362415042).epsilon(1e-12));
        CHECK(w.a_tlambda == doctest::Approx(-32.143526217900046).epsilon(1e-12));
    }
    SUBCASE("magnitude preserved") {
        for (int i = 0; i < 100; ++i) {
            const double a = 3.0 + i, th = 0.13 * i, lam = -0.07 * i;
            const auto w = target_accel_polar(a, th, lam);
            CHECK(std::hypot(w.a_tr, w.a_tlambda) == doctest::Approx(a).epsilon(1e-12));
        }
    }
}

TEST_CASE("step_discrete") {
    SUBCASE("pure radial closure") {
        const EngagementState x{1000.0, -100.0, 0.0, 0.0};
        const auto res = step_discrete(x, 0.0, {}, {0.02, 0.0});
        CHECK(res.state.r == doctest::Approx(998.0));
        CHECK(res.state.v_r == doctest::Approx(-100.0));
        CHECK(res.state.lambda == doctest::Approx(0.0));
        CHECK(res.state.v_lambda == doctest::Approx(0.0));
        CHECK_FALSE(res.terminal);
    }
    SUBCASE("transversal coupling") {
        const EngagementState x{1000.0, 0.0, 0.0, 100.0};
        const auto res = step_discrete(x, 0.0, {}, {0.02, 0.0});
        CHECK(res.state.r == doctest::Approx(1000.0));
        CHECK(res.state.v_r == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(res.state.lambda == doctest::Approx(0.002).epsilon(1e-14));
        // v_lambda carries through: v_r = 0 makes the coupling term vanish.
        CHECK(res.state.v_lambda == doctest::Approx(100.0));
    }
    SUBCASE("zero step is the identity") {
        const EngagementState x{123.0, -5.0, 0.4, 7.0};
        const auto res = step_discrete(x, 0.0, {}, {0.0, 0.2});
        CHECK(res.state.r == x.r);
        CHECK(res.state.v_r == x.v_r);
        CHECK(res.state.lambda == x.lambda);
        CHECK(res.state.v_lambda == x.v_lambda);
    }
    SUBCASE("range collapse is flagged terminal") {
        const EngagementState x{1.0, -100.0, 0.0, 0.0};
        const auto res = step_discrete(x, 0.0, {}, {0.02, 0.0});
        CHECK(res.terminal);
    }
    SUBCASE("requires positive range") {
        const EngagementState x{-1.0, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(step_discrete(x, 0.0, {}, {0.02, 0.0}), std::invalid_argument);
    }
}

TEST_CASE("propagate_agent") {
    SUBCASE("straight flight") {
        const AgentState a{0.0, 0.0, 0.0, 150.0};
        const AgentState b = propagate_agent(a, 0.0, 1.0);
        CHECK(b.x == doctest::Approx(150.0));
        CHECK(b.y == doctest::Approx(0.0));
        CHECK(b.theta == doctest::Approx(0.0));
        CHECK(b.speed == 150.0);
    }
    SUBCASE("euler turn update") {
        const AgentState a{0.0, 0.0, 0.0, 100.0};
        const AgentState b = propagate_agent(a, 100.0, 0.02);
        CHECK(b.theta == doctest::Approx(0.02));
        CHECK(b.x == doctest::Approx(2.0));  // along the pre-step heading
        CHECK(b.y == doctest::Approx(0.0));
    }
    SUBCASE("full circle returns near the start") {
        // 4g at 100 m/s: radius 254.841997961264 m, period 2*pi*R/V.
        const double accel = 4.0 * kGravity, speed = 100.0;
        const double radius = speed * speed / accel;
        const double period = 2.0 * kPi * radius / speed;
        const double dt = 1e-4;
        AgentState s{0.0, 0.0, 0.0, speed};
        const auto steps = static_cast<long>(std::llround(period / dt));
        for (long i = 0; i < steps; ++i) s = propagate_agent(s, accel, dt);
        CHECK(std::hypot(s.x, s.y) < speed * dt * 40.0);  // O(dt) closure error
        CHECK(radius == doctest::Approx(254.841997961264).epsilon(1e-12));
    }
}

TEST_CASE("euler consistency: halving dt roughly halves the error") {
    const EngagementState x0{1500.0, -120.0, 0.3, 80.0};
    const StepConfig fine{0.0005, 0.1};
    auto rollout = [&](double dt, int steps) {
        EngagementState s = x0;
        for (int i = 0; i < steps; ++i) {
            s = step_discrete(s, 0.0, {}, {dt, 0.1}).state;
        }
        return s;
    };
    const EngagementState ref = rollout(fine.dt, 4000);
    const EngagementState coarse = rollout(0.02, 100);
    const EngagementState half = rollout(0.01, 200);
    const double err_coarse = std::abs(coarse.v_r - ref.v_r) + std::abs(coarse.v_lambda - ref.v_lambda);
    const double err_half = std::abs(half.v_r - ref.v_r) + std::abs(half.v_lambda - ref.v_lambda);
    CHECK(err_half < 0.65 * err_coarse);
}

TEST_CASE("polar model matches Cartesian propagation to O(dt^2) per step") {
    // The radial projection of the target acceleration is implemented with
    // the printed sign convention, which matches the Cartesian ground truth
    // only in the transversal row; v_r is checked under a_t = 0.
    SUBCASE("maneuvering target: r, lambda, v_lambda rows") {
        AgentState missile{0.0, 0.0, 0.2, 150.0};
        AgentState target{1200.0, 900.0, deg2rad(170.0), 100.0};
        const double dt = 0.002;
        const double u = 30.0, a_t = 20.0;
        for (int k = 0; k < 200; ++k) {
            const EngagementState before = relative_state(missile, target);
            const auto w = target_accel_polar(a_t, target.theta, before.lambda);
            const EngagementState predicted =
                step_discrete(before, u, w, {dt, missile.theta}).state;
            missile = propagate_agent(missile, u, dt);
            target = propagate_agent(target, a_t, dt);
            const EngagementState after = relative_state(missile, target);
            CHECK(std::abs(predicted.r - after.r) < 100.0 * dt * dt);
            CHECK(std::abs(predicted.lambda - after.lambda) < 100.0 * dt * dt);
            CHECK(std::abs(predicted.v_lambda - after.v_lambda) < 2000.0 * dt * dt);
        }
    }
    SUBCASE("non-maneuvering target: all rows") {
        AgentState missile{0.0, 0.0, 0.2, 150.0};
        AgentState target{1200.0, 900.0, deg2rad(170.0), 100.0};
        const double dt = 0.002;
        const double u = 30.0;
        for (int k = 0; k < 200; ++k) {
            const EngagementState before = relative_state(missile, target);
            const EngagementState predicted =
                step_discrete(before, u, {}, {dt, missile.theta}).state;
            missile = propagate_agent(missile, u, dt);
            target = propagate_agent(target, 0.0, dt);
            const EngagementState after = relative_state(missile, target);
            CHECK(std::abs(predicted.r - after.r) < 100.0 * dt * dt);
            CHECK(std::abs(predicted.v_r - after.v_r) < 2000.0 * dt * dt);
            CHECK(std::abs(predicted.lambda - after.lambda) < 100.0 * dt * dt);
            CHECK(std::abs(predicted.v_lambda - after.v_lambda) < 2000.0 * dt * dt);
        }
    }
}

TEST_CASE("angles stay wrapped") {
    AgentState agent{0.0, 0.0, 3.0, 50.0};
    for (int i = 0; i < 2000; ++i) {
        agent = propagate_agent(agent, 60.0, 0.05);
        CHECK(agent.theta <= kPi);
        CHECK(agent.theta > -kPi);
    }
}
