#pragma once

#include <cstdint>

#include "alpsim/scenario.hpp"

namespace alpsim {

// Canonical two-hypothesis scenarios: an agent endorsing a low-arousal "safe"
// self-hypothesis while a high-arousal "threat" hypothesis holds regulatory
// authority. The baseline run applies a stress battery with no intervention;
// the two intervention templates apply the identical battery (matched load,
// matched seed) after either a governance shift or a precision-raising
// intervention, with the late battery moved into novel contexts.

namespace templates {

inline constexpr int kSafeId = 0;
inline constexpr int kThreatId = 1;
inline constexpr double kShiftTime = 5.0;          // governance template
inline constexpr double kReinstatementTime = 113.0;
inline constexpr double kSustainedOnset = 78.0;

inline HypothesisSpace canonical_space() {
    HypothesisSpace space;
    space.num_states = 2;
    space.num_observations = 2;
    space.num_actions = 2;

    Hypothesis safe;
    safe.id = kSafeId;
    safe.label = "h_safe";
    safe.likelihood = {{0.85, 0.15}, {0.6, 0.4}};
    safe.transition = {{{0.9, 0.1}, {0.7, 0.3}}, {{0.6, 0.4}, {0.3, 0.7}}};
    safe.preferences = {2.0, 0.0};
    safe.state_prior = {0.7, 0.3};
    safe.autonomic_setpoint = 0.2;
    safe.policy_repertoire = {0, 1};

    Hypothesis threat;
    threat.id = kThreatId;
    threat.label = "h_threat";
    threat.likelihood = {{0.5, 0.5}, {0.2, 0.8}};
    threat.transition = {{{0.8, 0.2}, {0.5, 0.5}}, {{0.4, 0.6}, {0.1, 0.9}}};
    threat.preferences = {0.0, 1.0};
    threat.state_prior = {0.3, 0.7};
    threat.autonomic_setpoint = 0.65;
    threat.policy_repertoire = {2, 3};

    space.hypotheses = {safe, threat};
    return space;
}

inline std::vector<Policy> canonical_policies() {
    return {
        {0, {0}, kSafeId},
        {1, {1, 0}, kSafeId},
        {2, {1}, kThreatId},
        {3, {0, 1}, kThreatId},
    };
}

namespace detail {

inline TimelineEvent observe_at(double t, int observation) {
    TimelineEvent e;
    e.time = t;
    e.kind = EventKind::observe;
    e.observation = observation;
    e.identity_relevant = true;
    return e;
}

inline TimelineEvent stress_at(double t, double magnitude, double duration) {
    TimelineEvent e;
    e.time = t;
    e.kind = EventKind::stress;
    e.magnitude = magnitude;
    e.duration = duration;
    e.identity_relevant = true;
    return e;
}

inline TimelineEvent context_at(double t, int context) {
    TimelineEvent e;
    e.time = t;
    e.kind = EventKind::context_switch;
    e.context = context;
    return e;
}

inline TimelineEvent gain_at(double t, double value) {
    TimelineEvent e;
    e.time = t;
    e.kind = EventKind::set_gain;
    e.value = value;
    return e;
}

inline TimelineEvent shift_at(double t, EventKind kind, int hypothesis) {
    TimelineEvent e;
    e.time = t;
    e.kind = kind;
    e.hypothesis = hypothesis;
    return e;
}

inline TimelineEvent precision_at(double t, int hypothesis, double value) {
    TimelineEvent e;
    e.time = t;
    e.kind = EventKind::set_precision;
    e.hypothesis = hypothesis;
    e.value = value;
    return e;
}

// The shared load: an ambient threat-cue stream, three identity-relevant
// stressors across the trained contexts, a stress-amplified (gain 2)
// sustained stressor, a follow-up stressor, and a mild reinstatement
// stressor at the end. `novel_contexts` moves the late battery into contexts
// 2 and 3; the baseline keeps everything in the trained contexts {0, 1}.
inline std::vector<TimelineEvent> shared_timeline(bool novel_contexts) {
    std::vector<TimelineEvent> t;
    t.push_back(observe_at(2.0, 1));
    t.push_back(stress_at(20.0, 0.2, 3.0));
    t.push_back(context_at(40.0, 1));
    t.push_back(stress_at(45.0, 0.2, 3.0));
    t.push_back(context_at(65.0, 0));
    t.push_back(stress_at(66.0, 0.2, 3.0));
    t.push_back(gain_at(76.0, 2.0));
    if (novel_contexts) t.push_back(context_at(77.0, 2));
    t.push_back(stress_at(kSustainedOnset, 0.4, 20.0));
    if (novel_contexts) t.push_back(context_at(106.0, 3));
    t.push_back(stress_at(107.0, 0.2, 3.0));
    t.push_back(stress_at(kReinstatementTime, 0.1, 3.0));
    return t;
}

inline Scenario base_scenario(std::uint64_t seed) {
    Scenario s;
    s.seed = seed;
    s.horizon = 120.0;
    s.params.dt = 0.05;
    s.params.recovery_tau = 2.0;
    s.params.control = ControlParams{1.0, 0.045, 0.01};
    s.params.precision_rate = 0.5;
    s.space = canonical_space();
    s.policies = canonical_policies();
    s.endorsed = kSafeId;
    s.initial_context = 0;
    s.initial_hypothesis_posterior = {0.5, 0.5};
    s.initial_precision = {1.0, 1.0};
    s.initial_authorized = {kThreatId};
    s.initial_arousal = 0.65;
    s.initial_capacity = 1.0;
    s.initial_gain = 1.0;
    return s;
}

inline void sort_timeline(Scenario& s) {
    std::stable_sort(s.timeline.begin(), s.timeline.end(),
                     [](const TimelineEvent& a, const TimelineEvent& b) {
                         return a.time < b.time;
                     });
}

}  // namespace detail

// Baseline: untreated misalignment under the full battery. Capacity depletes
// during the sustained stressor and the run relapses.
inline Scenario baseline_scenario(std::uint64_t seed = 42) {
    Scenario s = detail::base_scenario(seed);
    s.id = "baseline";
    s.timeline = detail::shared_timeline(/*novel_contexts=*/false);
    detail::sort_timeline(s);
    return s;
}

// Governance intervention: authorize h_safe and deauthorize h_threat at t=5.
// Beliefs and precisions are untouched by the shift; regulation realigns.
inline Scenario governance_intervention_scenario(std::uint64_t seed = 42) {
    Scenario s = detail::base_scenario(seed);
    s.id = "governance-intervention";
    s.timeline = detail::shared_timeline(/*novel_contexts=*/true);
    s.timeline.push_back(
        detail::shift_at(kShiftTime, EventKind::authorize, kSafeId));
    s.timeline.push_back(
        detail::shift_at(kShiftTime, EventKind::deauthorize, kThreatId));
    detail::sort_timeline(s);
    return s;
}

// Precision intervention: a stream of confirming observations plus an
// explicit escalation of h_safe's precision to the maximum. Nothing about
// governance changes, so regulation is predicted to be bit-identical to the
// baseline and to relapse under the reinstatement stressor.
inline Scenario precision_intervention_scenario(std::uint64_t seed = 42) {
    Scenario s = detail::base_scenario(seed);
    s.id = "precision-intervention";
    s.timeline = detail::shared_timeline(/*novel_contexts=*/true);
    for (double t : {20.5, 24.0, 28.0, 34.0, 38.0, 42.0})
        s.timeline.push_back(detail::observe_at(t, 0));
    s.timeline.push_back(detail::precision_at(65.0, kSafeId, 8.0));
    detail::sort_timeline(s);
    return s;
}

// The reinstatement stressor shared by every template, as a regulation-layer
// event value (used by metrics consumers).
inline StressEvent reinstatement_event() {
    return StressEvent{kReinstatementTime, 0.1, 3.0, 3, true};
}

}  // namespace templates
}  // namespace alpsim
