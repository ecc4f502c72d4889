#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "alpsim/errors.hpp"
#include "alpsim/governance.hpp"
#include "alpsim/inference.hpp"
#include "alpsim/model.hpp"
#include "alpsim/policy.hpp"
#include "alpsim/regulation.hpp"
#include "alpsim/rng.hpp"

namespace alpsim {

enum class EventKind {
    observe,         // deliver an observation index
    stress,          // arousal forcing over [time, time + duration)
    authorize,       // governance shift: add hypothesis to the authorized set
    deauthorize,     // governance shift: remove hypothesis
    set_precision,   // precision intervention: pin one hypothesis's precision
    set_gain,        // neuromodulation gain change
    context_switch,  // ambient context change
};

// One timed directive. Which payload fields are meaningful depends on `kind`;
// the scenario parser only accepts the matching keys.
struct TimelineEvent {
    double time = 0.0;
    EventKind kind = EventKind::observe;
    int observation = 0;            // observe
    bool identity_relevant = false; // observe, stress
    double magnitude = 0.0;         // stress
    double duration = 0.0;          // stress
    int hypothesis = 0;             // authorize, deauthorize, set_precision
    double value = 0.0;             // set_precision, set_gain
    int context = 0;                // context_switch
};

struct ScenarioParams {
    double dt = 0.05;           // seconds per step
    double recovery_tau = 2.0;  // autonomic recovery constant, seconds
    ControlParams control{};
    double precision_rate = 0.5;  // evidence-driven precision dynamics; 0 = off
};

// Regulation routing rule. `authority_gated` is the real mechanism;
// `raw_precision` is the ablation used by the falsification suite: dominance
// by raw precision argmax over the whole space and unconstrained policy
// selection, ignoring the authorized set entirely.
enum class GoverningRule { authority_gated, raw_precision };

struct Scenario {
    std::string id = "scenario";
    std::uint64_t seed = 0;
    double horizon = 60.0;  // seconds
    ScenarioParams params;

    HypothesisSpace space;
    std::vector<Policy> policies;

    int endorsed = 0;  // hypothesis id the agent consciously endorses
    int initial_context = 0;
    Categorical initial_hypothesis_posterior;  // empty = uniform
    std::vector<double> initial_precision;     // empty = all ones
    double min_precision = 0.0;
    double max_precision = 8.0;
    std::set<int> initial_authorized;
    double initial_arousal = 0.5;
    double initial_capacity = 1.0;
    double initial_gain = 1.0;

    SelectionMode selection_mode = SelectionMode::argmin;
    double selection_gamma = 16.0;
    GoverningRule governing_rule = GoverningRule::authority_gated;
    DominanceRule dominance_rule = DominanceRule::precision_weighted;

    std::vector<TimelineEvent> timeline;  // time-ordered

    int step_count() const {
        return static_cast<int>(std::llround(horizon / params.dt));
    }
};

// Scenario-level validation on top of validate_model: initial conditions,
// policy cross-references, event ordering and payload ranges.
inline ValidationReport validate_scenario(const Scenario& s) {
    ValidationReport report = validate_model(s.space);
    auto fail = [&report](const std::string& code, const std::string& message) {
        report.violations.push_back({code, -1, message});
    };

    if (!(s.horizon > 0.0) || !std::isfinite(s.horizon))
        fail("horizon", "horizon must be finite and > 0");
    else if (s.params.dt > 0.0 && std::isfinite(s.params.dt) && s.step_count() < 1)
        fail("horizon", "horizon shorter than one step");
    if (!(s.params.dt > 0.0) || !std::isfinite(s.params.dt))
        fail("dt", "dt must be finite and > 0");
    if (!(s.params.recovery_tau > 0.0) || !std::isfinite(s.params.recovery_tau))
        fail("recovery_tau", "recovery tau must be finite and > 0");
    if (s.params.dt > s.params.recovery_tau / 10.0)
        fail("dt", "dt must be <= tau/10 for Euler stability");
    if (!(s.params.precision_rate >= 0.0) ||
        !std::isfinite(s.params.precision_rate))
        fail("precision_rate", "must be finite and >= 0");
    if (!(s.params.control.strength >= 0.0) ||
        !std::isfinite(s.params.control.strength) ||
        !(s.params.control.depletion_rate >= 0.0) ||
        !std::isfinite(s.params.control.depletion_rate) ||
        !(s.params.control.recovery_rate >= 0.0) ||
        !std::isfinite(s.params.control.recovery_rate))
        fail("control_params", "control parameters must be finite and >= 0");
    if (!(s.min_precision >= 0.0) || !(s.max_precision >= s.min_precision))
        fail("precision_bounds", "need 0 <= min <= max");
    if (!(s.initial_gain >= 1.0)) fail("gain", "initial gain must be >= 1");
    if (!(s.initial_arousal >= 0.0 && s.initial_arousal <= 1.0))
        fail("arousal", "initial arousal outside [0, 1]");
    if (!(s.initial_capacity >= 0.0 && s.initial_capacity <= 1.0))
        fail("capacity", "initial control capacity outside [0, 1]");

    if (!s.space.contains(s.endorsed))
        fail("endorsed", "endorsed hypothesis id " + std::to_string(s.endorsed) +
                             " is not in the space");
    if (s.initial_authorized.empty())
        fail("authorized", "initial authorized set is empty");
    for (int id : s.initial_authorized)
        if (!s.space.contains(id))
            fail("authorized", "authorized id " + std::to_string(id) +
                                   " is not in the space");

    if (!s.initial_hypothesis_posterior.empty()) {
        if (static_cast<int>(s.initial_hypothesis_posterior.size()) != s.space.size())
            fail("hypothesis_posterior", "initial posterior has wrong length");
        else if (!is_distribution(s.initial_hypothesis_posterior))
            fail("hypothesis_posterior", "initial posterior is not a distribution");
    }
    if (!s.initial_precision.empty()) {
        if (static_cast<int>(s.initial_precision.size()) != s.space.size())
            fail("precision", "initial precision table has wrong length");
        else
            for (double p : s.initial_precision)
                if (!(p >= s.min_precision && p <= s.max_precision))
                    fail("precision", "initial precision outside bounds");
    }

    // Policies: unique ids, valid actions, and a bijective repertoire link;
    // a policy belongs to exactly the repertoire of its generating hypothesis.
    std::set<int> policy_ids;
    for (const auto& p : s.policies) {
        if (!policy_ids.insert(p.id).second)
            fail("policy_id", "duplicate policy id " + std::to_string(p.id));
        if (p.actions.empty())
            fail("policy_actions", "policy " + std::to_string(p.id) + " has no actions");
        for (int a : p.actions)
            if (a < 0 || a >= s.space.num_actions)
                fail("policy_actions", "policy " + std::to_string(p.id) +
                                           " uses unknown action " + std::to_string(a));
        if (!s.space.contains(p.generated_by)) {
            fail("policy_origin", "policy " + std::to_string(p.id) +
                                      " generated by unknown hypothesis");
            continue;
        }
        for (const auto& h : s.space.hypotheses) {
            const bool listed =
                std::find(h.policy_repertoire.begin(), h.policy_repertoire.end(),
                          p.id) != h.policy_repertoire.end();
            if (listed && h.id != p.generated_by)
                fail("repertoire", "policy " + std::to_string(p.id) +
                                       " listed by non-generating hypothesis " +
                                       std::to_string(h.id));
            if (!listed && h.id == p.generated_by)
                fail("repertoire", "policy " + std::to_string(p.id) +
                                       " missing from its generating hypothesis's "
                                       "repertoire");
        }
    }
    for (const auto& h : s.space.hypotheses)
        for (int pid : h.policy_repertoire)
            if (!policy_ids.count(pid))
                fail("repertoire", "hypothesis " + std::to_string(h.id) +
                                       " lists unknown policy " + std::to_string(pid));

    double last_time = 0.0;
    for (std::size_t i = 0; i < s.timeline.size(); ++i) {
        const auto& e = s.timeline[i];
        const std::string tag = "event " + std::to_string(i);
        if (e.time < last_time) fail("event_order", tag + " is out of time order");
        last_time = std::max(last_time, e.time);
        // The simulated window is [0, horizon); an event at the horizon would
        // silently never fire.
        if (!(e.time >= 0.0) || e.time >= s.horizon)
            fail("event_time", tag + " lies outside the simulated window");
        switch (e.kind) {
            case EventKind::observe:
                if (e.observation < 0 || e.observation >= s.space.num_observations)
                    fail("event_observation", tag + " observation index out of range");
                break;
            case EventKind::stress:
                if (e.magnitude < 0.0) fail("event_stress", tag + " negative magnitude");
                if (e.duration < 0.0) fail("event_stress", tag + " negative duration");
                if (e.time + e.duration > s.horizon)
                    fail("event_stress", tag + " runs past the horizon");
                break;
            case EventKind::authorize:
            case EventKind::deauthorize:
                if (!s.space.contains(e.hypothesis))
                    fail("event_hypothesis", tag + " names unknown hypothesis");
                break;
            case EventKind::set_precision:
                if (!s.space.contains(e.hypothesis))
                    fail("event_hypothesis", tag + " names unknown hypothesis");
                if (!(e.value >= s.min_precision && e.value <= s.max_precision))
                    fail("event_precision", tag + " precision outside bounds");
                break;
            case EventKind::set_gain:
                if (!(e.value >= 1.0)) fail("event_gain", tag + " gain below 1");
                break;
            case EventKind::context_switch:
                break;
        }
    }
    return report;
}

// One row of the run trace: the full regulation interface plus posteriors,
// precisions and the per-policy evaluation table for the step.
struct StepRecord {
    int step = 0;
    double time = 0.0;
    int context = 0;
    int observation = -1;  // -1 when no observation was delivered this step
    int governing = -1;
    int endorsed = 0;
    int selected_policy = -1;
    double arousal = 0.0;
    double effort = 0.0;
    double capacity = 0.0;
    bool relapse = false;
    double gain = 1.0;
    double stress_input = 0.0;
    std::vector<double> hypothesis_posterior;
    std::vector<double> precision;
    std::vector<PolicyEvaluation> policy_table;
};

struct RunTrace {
    std::string scenario_id;
    std::uint64_t seed = 0;
    double dt = 0.0;
    std::vector<StepRecord> steps;
    GovernanceState final_governance;  // shift log is exported verbatim
};

namespace detail {

inline int event_step(double time, double dt) {
    return static_cast<int>(std::llround(time / dt));
}

// Raw-precision ablation of dominance: argmax of effective precision over the
// whole space, lowest id on ties. Lives here, not in governance: it is the
// thing the falsification suite exists to reject.
inline int raw_precision_argmax(const HypothesisSpace& space,
                                std::span<const double> effective) {
    int best = space.hypotheses[0].id;
    double best_score = effective[0];
    for (std::size_t i = 1; i < space.hypotheses.size(); ++i) {
        if (effective[i] > best_score) {
            best_score = effective[i];
            best = space.hypotheses[i].id;
        }
    }
    return best;
}

}  // namespace detail

// Drives one simulation. Per tick: deliver observations -> update beliefs and
// precisions -> apply precision interventions -> apply governance shifts ->
// resolve the governing hypothesis (neuromodulated) -> select a policy ->
// step the autonomic state and compensatory control -> record.
// Deterministic given the scenario seed.
inline RunTrace run_scenario(const Scenario& scenario) {
    {
        const auto report = validate_scenario(scenario);
        if (!report.valid())
            throw ScenarioError("invalid scenario: " + report.violations[0].message);
    }
    const double dt = scenario.params.dt;
    const int steps = scenario.step_count();

    BeliefState beliefs = initial_beliefs(
        scenario.space,
        scenario.initial_hypothesis_posterior.empty()
            ? Categorical(static_cast<std::size_t>(scenario.space.size()),
                          1.0 / scenario.space.size())
            : scenario.initial_hypothesis_posterior);
    PrecisionState precisions;
    precisions.precision =
        scenario.initial_precision.empty()
            ? std::vector<double>(static_cast<std::size_t>(scenario.space.size()), 1.0)
            : scenario.initial_precision;
    precisions.min_precision = scenario.min_precision;
    precisions.max_precision = scenario.max_precision;

    GovernanceState gov;
    gov.authorized = scenario.initial_authorized;

    AutonomicState autonomic;
    autonomic.arousal = scenario.initial_arousal;
    autonomic.recovery_tau = scenario.params.recovery_tau;
    autonomic.control_capacity = scenario.initial_capacity;

    NeuromodulationState neuro{scenario.initial_gain};
    int context = scenario.initial_context;
    Rng rng(scenario.seed);

    // Timeline indices per step, in file order; stress events expanded to
    // step windows once.
    std::map<int, std::vector<std::size_t>> due;
    struct StressWindow {
        int first_step, last_step;  // [first, last)
        double magnitude;
        bool identity_relevant;
    };
    std::vector<StressWindow> stress_windows;
    for (std::size_t i = 0; i < scenario.timeline.size(); ++i) {
        const auto& e = scenario.timeline[i];
        // Times in [0, horizon) may still round up to the step past the last
        // one; clamp so the event fires on the final step instead of never.
        const int first = std::min(detail::event_step(e.time, dt), steps - 1);
        if (e.kind == EventKind::stress) {
            stress_windows.push_back(
                {first, first + detail::event_step(e.duration, dt), e.magnitude,
                 e.identity_relevant});
        } else {
            due[first].push_back(i);
        }
    }

    RunTrace trace;
    trace.scenario_id = scenario.id;
    trace.seed = scenario.seed;
    trace.dt = dt;
    trace.steps.reserve(static_cast<std::size_t>(steps));

    SelectionOptions selection;
    selection.mode = scenario.selection_mode;
    selection.gamma = scenario.selection_gamma;
    selection.rng = &rng;

    for (int step = 0; step < steps; ++step) {
        const double now = step * dt;
        try {
            int delivered = -1;
            const auto it = due.find(step);
            if (it != due.end()) {
                // Phase 1: observations drive inference and precision dynamics.
                for (std::size_t idx : it->second) {
                    const auto& e = scenario.timeline[idx];
                    if (e.kind != EventKind::observe) continue;
                    const Observation obs{e.observation, context, e.identity_relevant};
                    std::vector<double> fits;
                    if (scenario.params.precision_rate > 0.0) {
                        for (std::size_t i = 0; i < scenario.space.hypotheses.size(); ++i)
                            fits.push_back(evidence_fit(
                                obs, scenario.space.hypotheses[i],
                                precisions.precision[i], beliefs.state_posteriors[i]));
                    }
                    beliefs = update_hypothesis_posterior(beliefs, obs,
                                                          scenario.space, precisions);
                    for (std::size_t i = 0; i < fits.size(); ++i)
                        precisions = update_precision(
                            precisions, scenario.space,
                            scenario.space.hypotheses[i].id, fits[i],
                            scenario.params.precision_rate);
                    delivered = e.observation;
                }
                // Phase 2: precision interventions.
                for (std::size_t idx : it->second) {
                    const auto& e = scenario.timeline[idx];
                    if (e.kind != EventKind::set_precision) continue;
                    precisions.precision[static_cast<std::size_t>(
                        scenario.space.index_of(e.hypothesis))] =
                        precisions.clamp(e.value);
                }
                // Phase 3: governance shifts, in file order.
                for (std::size_t idx : it->second) {
                    const auto& e = scenario.timeline[idx];
                    if (e.kind == EventKind::authorize)
                        gov = authorize(gov, scenario.space, e.hypothesis, e.time);
                    else if (e.kind == EventKind::deauthorize)
                        gov = deauthorize(gov, scenario.space, e.hypothesis, e.time,
                                          /*regulation_active=*/true);
                }
                // Phase 4: gain and context.
                for (std::size_t idx : it->second) {
                    const auto& e = scenario.timeline[idx];
                    if (e.kind == EventKind::set_gain) {
                        if (!(e.value >= 1.0))
                            throw DomainError("set_gain below 1");
                        neuro.gain = e.value;
                    } else if (e.kind == EventKind::context_switch) {
                        context = e.context;
                    }
                }
            }

            const auto effective =
                apply_neuromodulation(neuro, precisions, gov, scenario.space);
            const int governing =
                scenario.governing_rule == GoverningRule::authority_gated
                    ? governing_hypothesis(gov, scenario.space, beliefs, effective,
                                           scenario.dominance_rule)
                    : detail::raw_precision_argmax(scenario.space, effective);

            SelectionResult selected;
            if (scenario.governing_rule == GoverningRule::authority_gated)
                selected = select_policy_alp(scenario.policies, gov, scenario.space,
                                             beliefs, selection);
            else
                selected = select_policy_standard(scenario.policies, scenario.space,
                                                  beliefs, selection);

            const Hypothesis& governing_h = scenario.space.hypothesis(governing);
            double stress_input = 0.0;
            for (const auto& w : stress_windows) {
                if (step >= w.first_step && step < w.last_step) {
                    stress_input += w.magnitude *
                                    (w.identity_relevant
                                         ? governing_h.autonomic_setpoint
                                         : 1.0);
                }
            }
            stress_input *= neuro.gain;

            autonomic = step_autonomic(autonomic, governing_h, stress_input, dt);
            autonomic = compensatory_control(scenario.endorsed, governing, autonomic,
                                             scenario.space, dt,
                                             scenario.params.control);

            StepRecord record;
            record.step = step;
            record.time = now;
            record.context = context;
            record.observation = delivered;
            record.governing = governing;
            record.endorsed = scenario.endorsed;
            record.selected_policy = selected.policy_id;
            record.arousal = autonomic.arousal;
            record.effort = autonomic.control_effort;
            record.capacity = autonomic.control_capacity;
            record.relapse = autonomic.relapse_flag;
            record.gain = neuro.gain;
            record.stress_input = stress_input;
            record.hypothesis_posterior = beliefs.hypothesis_posterior;
            record.precision = precisions.precision;
            record.policy_table = std::move(selected.table);
            trace.steps.push_back(std::move(record));
        } catch (const Error& e) {
            throw RunError(step, e.what());
        }
    }
    trace.final_governance = gov;
    return trace;
}

}  // namespace alpsim
