#include <catch2/catch.hpp>

#include <cmath>

#include "alpsim/regulation.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace alpsim;

TEST_CASE("arousal at the set-point with no stress is a fixed point") {
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.arousal = 0.65;
    state.recovery_tau = 2.0;
    const auto next = step_autonomic(state, space.hypotheses[1], 0.0, 0.05);
    CHECK(next.arousal == 0.65);
}

TEST_CASE("free decay follows the exponential within Euler error") {
    // tau = 2 s, from 1.0 toward 0.0: after 2 s, a ≈ e^-1 = 0.3679 ± 0.01
    auto space = fixtures::two_hypothesis_space();
    space.hypotheses[0].autonomic_setpoint = 0.0;
    AutonomicState state;
    state.arousal = 1.0;
    state.recovery_tau = 2.0;

    const double dt = 0.05;
    for (int i = 0; i < 40; ++i)
        state = step_autonomic(state, space.hypotheses[0], 0.0, dt);
    CHECK(state.arousal == Approx(std::exp(-1.0)).margin(0.01));
    CHECK(state.arousal ==
          Approx(oracle::exponential_approach(1.0, 0.0, 2.0, 2.0)).margin(0.01));
}

TEST_CASE("positive stress at the set-point strictly raises arousal") {
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.arousal = space.hypotheses[1].autonomic_setpoint;
    state.recovery_tau = 2.0;
    const auto next = step_autonomic(state, space.hypotheses[1], 0.4, 0.05);
    CHECK(next.arousal > state.arousal);
}

TEST_CASE("the Euler stability guard rejects bad step sizes") {
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.recovery_tau = 2.0;
    CHECK_THROWS_AS(step_autonomic(state, space.hypotheses[0], 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(step_autonomic(state, space.hypotheses[0], 0.0, -0.1), DomainError);
    CHECK_THROWS_AS(step_autonomic(state, space.hypotheses[0], 0.0, 0.3), DomainError);
    CHECK_NOTHROW(step_autonomic(state, space.hypotheses[0], 0.0, 0.2));
}

TEST_CASE("arousal and capacity never leave [0, 1]") {
    auto space = fixtures::two_hypothesis_space();
    space.hypotheses[0].autonomic_setpoint = 0.0;
    AutonomicState state;
    state.arousal = 0.05;
    state.recovery_tau = 2.0;
    ControlParams params;
    for (int i = 0; i < 2000; ++i) {
        state = step_autonomic(state, space.hypotheses[0],
                               (i % 3 == 0) ? 5.0 : -5.0, 0.05);
        state = compensatory_control(0, 1, state, space, 0.05, params);
        REQUIRE(state.arousal >= 0.0);
        REQUIRE(state.arousal <= 1.0);
        REQUIRE(state.control_capacity >= 0.0);
        REQUIRE(state.control_capacity <= 1.0);
    }
}

TEST_CASE("set-point tracking obeys the exponential envelope") {
    // |a(t) - sp| <= |a(0) - sp| e^{-t/tau} + 2 dt / tau
    const auto space = fixtures::two_hypothesis_space();
    const auto& governing = space.hypotheses[1];  // set-point 0.65
    AutonomicState state;
    state.arousal = 0.1;
    state.recovery_tau = 2.0;
    const double dt = 0.05;
    const double initial_gap = std::abs(state.arousal - 0.65);

    for (int i = 1; i <= 400; ++i) {
        state = step_autonomic(state, governing, 0.0, dt);
        const double t = i * dt;
        const double bound = initial_gap * std::exp(-t / 2.0) + 2.0 * dt / 2.0;
        REQUIRE(std::abs(state.arousal - 0.65) <= bound);
    }
}

TEST_CASE("alignment zeroes effort and lets capacity recover") {
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.arousal = 0.9;
    state.control_capacity = 0.5;
    state.control_effort = 0.7;  // stale value; must be cleared
    ControlParams params;

    auto next = compensatory_control(1, 1, state, space, 0.05, params);
    CHECK(next.control_effort == 0.0);
    CHECK(next.control_capacity == Approx(0.5 + 0.01 * 0.05));

    next.control_capacity = 1.0;
    next = compensatory_control(1, 1, next, space, 0.05, params);
    CHECK(next.control_capacity == 1.0);  // capped
}

TEST_CASE("misaligned effort is proportional to the arousal gap") {
    // arousal 0.8, endorsed set-point 0.2, k = 1, capacity 1 -> effort 0.6
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.arousal = 0.8;
    state.control_capacity = 1.0;
    ControlParams params;  // strength 1

    const auto next = compensatory_control(0, 1, state, space, 0.05, params);
    CHECK(next.control_effort == Approx(0.6).epsilon(1e-12));
    CHECK(next.arousal == Approx(0.8 - 0.6 * 0.05).epsilon(1e-12));
    CHECK(next.control_capacity == Approx(1.0 - 0.05 * 0.6 * 0.05).epsilon(1e-12));
    CHECK_FALSE(next.relapse_flag);
}

TEST_CASE("effort is zero when arousal is already below the endorsed set-point") {
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.arousal = 0.1;  // below h_safe's 0.2
    state.control_capacity = 1.0;
    const auto next = compensatory_control(0, 1, state, space, 0.05, ControlParams{});
    CHECK(next.control_effort == 0.0);
    CHECK(next.arousal == 0.1);
}

TEST_CASE("capacity exhaustion collapses effort and latches the relapse flag") {
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.arousal = 0.8;
    state.control_capacity = 1.0;
    state.recovery_tau = 2.0;
    ControlParams params;
    params.depletion_rate = 2.0;  // deplete quickly for the test

    bool saw_depletion = false;
    for (int i = 0; i < 2000; ++i) {
        state.arousal = 0.8;  // hold the gap constant
        state = compensatory_control(0, 1, state, space, 0.05, params);
        if (state.control_capacity == 0.0) {
            saw_depletion = true;
            break;
        }
    }
    REQUIRE(saw_depletion);
    CHECK(state.relapse_flag);

    state.arousal = 0.8;
    state = compensatory_control(0, 1, state, space, 0.05, params);
    CHECK(state.control_effort == 0.0);
    CHECK(state.relapse_flag);

    // With effort collapsed, arousal drifts back toward the governing set-point.
    auto drifting = state;
    drifting.arousal = 0.3;
    for (int i = 0; i < 200; ++i) {
        drifting = step_autonomic(drifting, space.hypotheses[1], 0.0, 0.05);
        drifting = compensatory_control(0, 1, drifting, space, 0.05, params);
    }
    CHECK(drifting.arousal == Approx(0.65).margin(0.01));
}

TEST_CASE("capacity is non-increasing and empties in bounded time under constant load") {
    const auto space = fixtures::two_hypothesis_space();
    AutonomicState state;
    state.control_capacity = 1.0;
    ControlParams params;
    const double dt = 0.05;
    const double gap = 0.6;  // 0.8 - 0.2, held constant below

    // Depletion bound: capacity / (rho * k * gap) seconds.
    const double bound = 1.0 / (params.depletion_rate * params.strength * gap) + dt;
    double t = 0.0;
    double last = state.control_capacity;
    while (state.control_capacity > 0.0) {
        state.arousal = 0.8;
        state = compensatory_control(0, 1, state, space, dt, params);
        REQUIRE(state.control_capacity <= last);
        last = state.control_capacity;
        t += dt;
        REQUIRE(t <= bound + dt);
    }
    CHECK(t <= bound);
}

TEST_CASE("unit gain leaves the effective precision table untouched") {
    const auto space = fixtures::two_hypothesis_space();
    PrecisionState prec{{1.5, 3.0}, 0.0, 8.0};
    GovernanceState gov{{1}, {}};
    const auto table = apply_neuromodulation(NeuromodulationState{1.0}, prec, gov, space);
    CHECK(table == prec.precision);
}

TEST_CASE("gain amplifies authorized precision and widens the dominance margin") {
    const auto space = fixtures::two_hypothesis_space();
    PrecisionState prec{{2.0, 1.5}, 0.0, 8.0};
    GovernanceState gov{{0, 1}, {}};
    BeliefState beliefs = initial_beliefs(space, {0.3, 0.7});

    // Dominance scores with gain 1 vs gain 3; h_threat (id 1) leads either way,
    // but under a shared gain its margin over the co-authorized h_safe grows.
    const auto base = apply_neuromodulation(NeuromodulationState{1.0}, prec, gov, space);
    const auto boosted = apply_neuromodulation(NeuromodulationState{3.0}, prec, gov, space);
    CHECK(boosted[0] == Approx(6.0));
    CHECK(boosted[1] == Approx(4.5));

    const double margin_base = base[1] * 0.7 - base[0] * 0.3;
    const double margin_boosted = boosted[1] * 0.7 - boosted[0] * 0.3;
    CHECK(margin_base > 0.0);
    CHECK(margin_boosted > margin_base);
    CHECK(governing_hypothesis(gov, space, beliefs, boosted) ==
          governing_hypothesis(gov, space, beliefs, base));

    // Stored precision is never modified.
    CHECK(prec.precision[0] == 2.0);
    CHECK(prec.precision[1] == 1.5);
}

TEST_CASE("gain never hands control to an unauthorized hypothesis") {
    const auto space = fixtures::two_hypothesis_space();
    PrecisionState prec{{8.0, 0.5}, 0.0, 8.0};  // unauthorized h_safe at the max
    GovernanceState gov{{1}, {}};
    BeliefState beliefs = initial_beliefs(space, {0.9, 0.1});

    const auto table = apply_neuromodulation(NeuromodulationState{3.0}, prec, gov, space);
    CHECK(table[0] == 8.0);  // untouched: not authorized
    CHECK(table[1] == 1.5);
    CHECK(governing_hypothesis(gov, space, beliefs, table) == 1);
}

TEST_CASE("gain below one is rejected") {
    const auto space = fixtures::two_hypothesis_space();
    PrecisionState prec{{1.0, 1.0}, 0.0, 8.0};
    GovernanceState gov{{1}, {}};
    CHECK_THROWS_AS(apply_neuromodulation(NeuromodulationState{0.5}, prec, gov, space),
                    DomainError);
}
