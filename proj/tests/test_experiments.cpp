#include <catch2/catch.hpp>

#include <cmath>

#include "alpsim/falsification.hpp"
#include "alpsim/metrics.hpp"
#include "alpsim/scenario.hpp"
#include "alpsim/scenario_io.hpp"
#include "alpsim/sweep.hpp"
#include "alpsim/templates.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace alpsim;

namespace {

// Minimal aligned scenario: endorsed == governing, arousal at the set-point.
Scenario aligned_scenario() {
    Scenario s;
    s.id = "aligned";
    s.seed = 1;
    s.horizon = 10.0;
    s.space = templates::canonical_space();
    s.policies = templates::canonical_policies();
    s.endorsed = templates::kThreatId;
    s.initial_authorized = {templates::kThreatId};
    s.initial_arousal = 0.65;
    s.initial_hypothesis_posterior = {0.5, 0.5};
    s.initial_precision = {1.0, 1.0};
    return s;
}

RunTrace synthetic_decay_trace(double baseline, double amplitude, double tau,
                               double onset, double duration, double horizon,
                               double dt) {
    RunTrace trace;
    trace.scenario_id = "synthetic";
    trace.dt = dt;
    const int steps = static_cast<int>(std::llround(horizon / dt));
    const double offset = onset + duration;
    for (int i = 0; i < steps; ++i) {
        StepRecord r;
        r.step = i;
        r.time = i * dt;
        r.arousal = r.time < offset
                        ? (r.time < onset ? baseline : baseline + amplitude)
                        : baseline + amplitude * std::exp(-(r.time - offset) / tau);
        trace.steps.push_back(r);
    }
    return trace;
}

}  // namespace

TEST_CASE("an aligned scenario at the set-point yields a flat trace") {
    const auto trace = run_scenario(aligned_scenario());
    REQUIRE(trace.steps.size() == 200);
    for (const auto& s : trace.steps) {
        CHECK(s.arousal == 0.65);
        CHECK(s.effort == 0.0);
        CHECK_FALSE(s.relapse);
        CHECK(s.governing == templates::kThreatId);
        CHECK(s.hypothesis_posterior == std::vector<double>{0.5, 0.5});
    }
}

TEST_CASE("the same seed reproduces a bit-identical trace") {
    const auto scenario = templates::precision_intervention_scenario(11);
    const auto a = run_scenario(scenario);
    const auto b = run_scenario(scenario);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].arousal == b.steps[i].arousal);
        CHECK(a.steps[i].effort == b.steps[i].effort);
        CHECK(a.steps[i].hypothesis_posterior == b.steps[i].hypothesis_posterior);
        CHECK(a.steps[i].precision == b.steps[i].precision);
        CHECK(a.steps[i].selected_policy == b.steps[i].selected_policy);
        CHECK(a.steps[i].governing == b.steps[i].governing);
    }
}

TEST_CASE("a governance shift lands exactly on its step") {
    auto s = aligned_scenario();
    s.endorsed = templates::kSafeId;
    TimelineEvent auth;
    auth.time = 4.0;
    auth.kind = EventKind::authorize;
    auth.hypothesis = templates::kSafeId;
    TimelineEvent deauth = auth;
    deauth.kind = EventKind::deauthorize;
    deauth.hypothesis = templates::kThreatId;
    s.timeline = {auth, deauth};

    const auto trace = run_scenario(s);
    const int shift_step = static_cast<int>(std::llround(4.0 / s.params.dt));
    for (const auto& r : trace.steps) {
        if (r.step < shift_step)
            CHECK(r.governing == templates::kThreatId);
        else
            CHECK(r.governing == templates::kSafeId);
    }
    REQUIRE(trace.final_governance.shift_log.size() == 2);
    CHECK(trace.final_governance.shift_log[0].time == 4.0);
}

TEST_CASE("beliefs and precisions pass through a shift step untouched") {
    const auto scenario = templates::governance_intervention_scenario();
    const auto trace = run_scenario(scenario);
    const int shift_step =
        static_cast<int>(std::llround(templates::kShiftTime / scenario.params.dt));
    REQUIRE(shift_step > 0);
    const auto& before = trace.steps[static_cast<std::size_t>(shift_step - 1)];
    const auto& at = trace.steps[static_cast<std::size_t>(shift_step)];
    CHECK(before.precision == at.precision);
    CHECK(before.hypothesis_posterior == at.hypothesis_posterior);
    CHECK(before.governing == templates::kThreatId);
    CHECK(at.governing == templates::kSafeId);
}

TEST_CASE("after a shift, arousal relaxes exponentially toward the new set-point") {
    const auto scenario = templates::governance_intervention_scenario();
    const auto trace = run_scenario(scenario);
    const double dt = scenario.params.dt;
    const int shift_step =
        static_cast<int>(std::llround(templates::kShiftTime / dt));
    const double start =
        trace.steps[static_cast<std::size_t>(shift_step)].arousal;

    // Compare against the closed form until the first stressor at t = 20.
    const int first_stress = static_cast<int>(std::llround(20.0 / dt));
    for (int i = shift_step + 1; i < first_stress; ++i) {
        const double t = (i - shift_step) * dt;
        const double expected = oracle::exponential_approach(start, 0.2, 2.0, t);
        REQUIRE(std::abs(trace.steps[static_cast<std::size_t>(i)].arousal -
                         expected) <= 0.45 * 2.0 * dt / 2.0 + 1e-9);
        REQUIRE(trace.steps[static_cast<std::size_t>(i)].effort == 0.0);
    }
}

TEST_CASE("recovery fit recovers the constant of a closed-form decay") {
    const auto trace = synthetic_decay_trace(0.2, 0.6, 3.0, 3.0, 1.0, 30.0, 0.05);
    const double tau =
        fit_recovery_time_constant(trace, StressEvent{3.0, 1.0, 1.0, 0, true});
    CHECK(tau == Approx(3.0).epsilon(0.01));
}

TEST_CASE("recovery fit rejects a constant trace") {
    const auto trace = synthetic_decay_trace(0.4, 0.0, 3.0, 3.0, 1.0, 30.0, 0.05);
    CHECK_THROWS_AS(
        fit_recovery_time_constant(trace, StressEvent{3.0, 1.0, 1.0, 0, true}),
        FitError);
}

TEST_CASE("recovery fit needs at least 20 decay samples") {
    // Steep decay: excursion falls below threshold after ~9 samples at dt=0.5.
    const auto trace = synthetic_decay_trace(0.2, 0.6, 1.0, 3.0, 1.0, 30.0, 0.5);
    CHECK_THROWS_WITH(
        fit_recovery_time_constant(trace, StressEvent{3.0, 1.0, 1.0, 0, true}),
        Catch::Contains("insufficient decay samples"));
}

TEST_CASE("recovery fit tracks an Euler-simulated decay within 5%") {
    auto s = aligned_scenario();
    s.endorsed = templates::kSafeId;
    s.initial_authorized = {templates::kSafeId};  // set-point 0.2
    s.initial_arousal = 0.2;
    s.horizon = 30.0;
    TimelineEvent stress;
    stress.time = 2.0;
    stress.kind = EventKind::stress;
    stress.magnitude = 0.3;
    stress.duration = 2.0;
    stress.identity_relevant = false;
    s.timeline = {stress};

    const auto trace = run_scenario(s);
    const double tau =
        fit_recovery_time_constant(trace, StressEvent{2.0, 0.3, 2.0, 0, false});
    CHECK(tau > 1.9);
    CHECK(tau < 2.1);
}

TEST_CASE("metrics capture effort, relapse and settled contexts") {
    const auto scenario = templates::baseline_scenario();
    const auto trace = run_scenario(scenario);
    const auto metrics = compute_metrics(trace, scenario);

    CHECK(metrics.effort_integral > 1.0);
    CHECK(metrics.relapse);  // the sustained stressor depletes the reservoir
    CHECK(metrics.peak_reactivity > 0.3);
    CHECK(metrics.performance_proxy == 1.0);
    CHECK(metrics.battery.size() == 6);
    CHECK(metrics.contexts == std::set<int>{0, 1});

    const auto aligned = run_scenario(aligned_scenario());
    const auto aligned_metrics = compute_metrics(aligned, aligned_scenario());
    CHECK(aligned_metrics.effort_integral == 0.0);
    CHECK_FALSE(aligned_metrics.relapse);
}

TEST_CASE("precision intervention leaves regulation bit-identical to baseline") {
    const auto baseline = templates::baseline_scenario();
    const auto precision = templates::precision_intervention_scenario();
    const auto a = run_scenario(baseline);
    const auto b = run_scenario(precision);

    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        REQUIRE(a.steps[i].arousal == b.steps[i].arousal);
        REQUIRE(a.steps[i].effort == b.steps[i].effort);
        REQUIRE(a.steps[i].capacity == b.steps[i].capacity);
        REQUIRE(a.steps[i].relapse == b.steps[i].relapse);
        REQUIRE(a.steps[i].governing == b.steps[i].governing);
        REQUIRE(a.steps[i].stress_input == b.steps[i].stress_input);
    }
    // The intervention did move beliefs and precision: the safe hypothesis
    // ends with top posterior and maximal precision.
    const auto& last = b.steps.back();
    CHECK(last.hypothesis_posterior[0] > 0.9);
    CHECK(last.precision[0] == 8.0);
}

TEST_CASE("covariance signature dissociates the two interventions") {
    const auto baseline = templates::baseline_scenario();
    const auto governance = templates::governance_intervention_scenario();
    const auto precision = templates::precision_intervention_scenario();

    const auto pre = compute_metrics(run_scenario(baseline), baseline);
    const auto post_gov = compute_metrics(run_scenario(governance), governance);
    const auto post_prec = compute_metrics(run_scenario(precision), precision);

    const auto sig_gov = covariance_signature(pre, post_gov);
    CHECK(sig_gov.reduced_reactivity);
    CHECK(sig_gov.reduced_control);
    CHECK(sig_gov.cross_context_stable);
    CHECK(sig_gov.reinstatement_resilient);
    CHECK(sig_gov.joint);

    const auto sig_prec = covariance_signature(pre, post_prec);
    CHECK_FALSE(sig_prec.reduced_reactivity);
    CHECK_FALSE(sig_prec.reduced_control);
    CHECK_FALSE(sig_prec.reinstatement_resilient);
    CHECK_FALSE(sig_prec.joint);

    // Battery-level fits on the aligned (effort-free) run track the
    // configured recovery constant.
    CHECK(std::abs(post_gov.recovery_tau - 2.0) / 2.0 <= 0.05);
}

TEST_CASE("identical pre and post batteries produce no strict improvements") {
    const auto scenario = templates::baseline_scenario();
    const auto m = compute_metrics(run_scenario(scenario), scenario);
    const auto sig = covariance_signature(m, m);
    CHECK_FALSE(sig.reduced_reactivity);
    CHECK_FALSE(sig.reduced_control);
    CHECK_FALSE(sig.cross_context_stable);  // no novel contexts
    CHECK_FALSE(sig.joint);
}

TEST_CASE("mismatched batteries are rejected") {
    const auto baseline = templates::baseline_scenario();
    auto other = baseline;
    for (auto& e : other.timeline)
        if (e.kind == EventKind::stress) e.magnitude *= 2.0;

    const auto a = compute_metrics(run_scenario(baseline), baseline);
    const auto b = compute_metrics(run_scenario(other), other);
    CHECK_THROWS_AS(covariance_signature(a, b), ScenarioError);
}

TEST_CASE("falsification suite holds under defaults and is deterministic") {
    const auto a = falsification_suite();
    const auto b = falsification_suite();
    REQUIRE(a.checks.size() == 4);
    CHECK(a.all_hold);
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        CHECK(a.checks[i].prediction_holds);
        CHECK(a.checks[i].prediction_holds == b.checks[i].prediction_holds);
        CHECK(a.checks[i].detail == b.checks[i].detail);
    }
}

TEST_CASE("the raw-precision ablation violates the reassignment prediction") {
    FalsificationConfig config;
    config.rule = GoverningRule::raw_precision;
    const auto report = falsification_suite(config);
    CHECK_FALSE(report.all_hold);
    CHECK_FALSE(report.checks[0].prediction_holds);
}

TEST_CASE("a one-point sweep equals a direct run") {
    const auto scenario = templates::baseline_scenario();
    const Json doc = Json::parse(scenario_to_string(scenario));
    std::vector<GridAxis> axes{{"/initial/gain", {Json(1.0)}}};

    const auto result = sweep(doc, axes, 42, 1);
    REQUIRE(result.rows.size() == 1);
    REQUIRE(result.rows[0].error.empty());

    auto direct = scenario;
    direct.seed = derive_seed(42, 0);
    direct.initial_gain = 1.0;
    const auto direct_metrics = compute_metrics(run_scenario(direct), direct);
    CHECK(result.rows[0].metrics->effort_integral ==
          Approx(direct_metrics.effort_integral).margin(1e-12));
    CHECK(result.rows[0].metrics->peak_reactivity ==
          Approx(direct_metrics.peak_reactivity).margin(1e-12));
}

TEST_CASE("effort rises strictly with neuromodulation gain under misalignment") {
    auto s = aligned_scenario();
    s.endorsed = templates::kSafeId;  // misaligned: h_threat governs
    s.horizon = 30.0;
    TimelineEvent stress;
    stress.time = 5.0;
    stress.kind = EventKind::stress;
    stress.magnitude = 0.1;
    stress.duration = 5.0;
    stress.identity_relevant = true;
    s.timeline = {stress};

    const Json doc = Json::parse(scenario_to_string(s));
    std::vector<GridAxis> axes{{"/initial/gain", {Json(1.0), Json(2.0), Json(3.0)}}};
    const auto result = sweep(doc, axes, 7, 1);
    REQUIRE(result.rows.size() == 3);
    for (const auto& row : result.rows) REQUIRE(row.error.empty());
    const double e1 = result.rows[0].metrics->effort_integral;
    const double e2 = result.rows[1].metrics->effort_integral;
    const double e3 = result.rows[2].metrics->effort_integral;
    CHECK(e1 < e2);
    CHECK(e2 < e3);
}

TEST_CASE("a failing grid row is isolated from the others") {
    const auto scenario = templates::baseline_scenario();
    const Json doc = Json::parse(scenario_to_string(scenario));
    std::vector<GridAxis> axes{
        {"/initial/gain", {Json(1.0), Json(0.25), Json(2.0)}}};  // 0.25 invalid

    const auto result = sweep(doc, axes, 42, 1);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].error.empty());
    CHECK_FALSE(result.rows[1].error.empty());
    CHECK_FALSE(result.rows[1].metrics.has_value());
    CHECK(result.rows[2].error.empty());
}

TEST_CASE("parallel sweeps match single-threaded results") {
    auto s = aligned_scenario();
    s.endorsed = templates::kSafeId;
    s.horizon = 20.0;
    const Json doc = Json::parse(scenario_to_string(s));
    std::vector<GridAxis> axes{
        {"/params/recovery_tau", {Json(1.0), Json(2.0)}},
        {"/initial/gain", {Json(1.0), Json(2.0), Json(3.0)}}};

    const auto serial = sweep(doc, axes, 9, 1);
    const auto parallel = sweep(doc, axes, 9, 2);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    CHECK(sweep_to_csv(serial, axes, s.id, 9, parameter_hash(s)) ==
          sweep_to_csv(parallel, axes, s.id, 9, parameter_hash(s)));
}

TEST_CASE("an event just inside the horizon still fires") {
    auto s = aligned_scenario();  // horizon 10, dt 0.05, last step 199
    TimelineEvent e;
    e.time = 9.999;  // rounds to step 200; must clamp onto step 199
    e.kind = EventKind::context_switch;
    e.context = 5;
    s.timeline = {e};
    const auto trace = run_scenario(s);
    CHECK(trace.steps.back().context == 5);
    CHECK(trace.steps[198].context == 0);
}

TEST_CASE("run errors carry the failing step index") {
    auto s = aligned_scenario();
    // Two authorized hypotheses; deauthorizing both at t=1 empties the set.
    s.initial_authorized = {0, 1};
    TimelineEvent d1;
    d1.time = 1.0;
    d1.kind = EventKind::deauthorize;
    d1.hypothesis = 0;
    TimelineEvent d2 = d1;
    d2.hypothesis = 1;
    s.timeline = {d1, d2};
    CHECK_THROWS_WITH(run_scenario(s), Catch::Contains("step 20"));
}
