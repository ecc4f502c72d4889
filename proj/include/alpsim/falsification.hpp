#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alpsim/metrics.hpp"
#include "alpsim/scenario.hpp"
#include "alpsim/scenario_io.hpp"
#include "alpsim/templates.hpp"

namespace alpsim {

struct FalsificationCheck {
    int number = 0;
    std::string name;
    bool prediction_holds = false;
    std::string detail;
};

struct FalsificationReport {
    std::vector<FalsificationCheck> checks;
    bool all_hold = false;
    std::uint64_t seed = 0;
    GoverningRule rule = GoverningRule::authority_gated;
    // (scenario id, parameter hash) for each template the suite ran.
    std::vector<std::pair<std::string, std::string>> scenario_hashes;
};

struct FalsificationConfig {
    std::uint64_t seed = 42;
    GoverningRule rule = GoverningRule::authority_gated;
};

namespace detail {

inline int first_governing_divergence(const RunTrace& a, const RunTrace& b) {
    const std::size_t n = std::min(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.steps[i].governing != b.steps[i].governing)
            return static_cast<int>(i);
    return a.steps.size() == b.steps.size() ? -1 : static_cast<int>(n);
}

}  // namespace detail

// Executes the four predefined scenario comparisons and reports, per check,
// whether the simulated behaviour matches the authority-gating prediction.
// Running with the raw-precision rule is the built-in ablation: check 1 is
// expected to flip to "prediction violated".
inline FalsificationReport falsification_suite(const FalsificationConfig& config = {}) {
    FalsificationReport report;
    report.seed = config.seed;
    report.rule = config.rule;

    auto with_rule = [&config](Scenario s) {
        s.governing_rule = config.rule;
        return s;
    };

    const Scenario baseline = with_rule(templates::baseline_scenario(config.seed));
    const Scenario governance =
        with_rule(templates::governance_intervention_scenario(config.seed));
    const Scenario precision =
        with_rule(templates::precision_intervention_scenario(config.seed));
    for (const Scenario* s : {&baseline, &governance, &precision})
        report.scenario_hashes.emplace_back(s->id, parameter_hash(*s));

    const RunTrace baseline_trace = run_scenario(baseline);
    const RunTrace governance_trace = run_scenario(governance);
    const RunTrace precision_trace = run_scenario(precision);

    const Metrics baseline_metrics = compute_metrics(baseline_trace, baseline);
    const Metrics governance_metrics = compute_metrics(governance_trace, governance);
    const Metrics precision_metrics = compute_metrics(precision_trace, precision);

    // Check 1: raising precision/posterior of an unauthorized hypothesis never
    // reassigns regulation: the governing column must match the run without
    // the escalation, step for step.
    {
        FalsificationCheck check;
        check.number = 1;
        check.name = "precision_escalation_never_reassigns";
        const int divergence =
            detail::first_governing_divergence(baseline_trace, precision_trace);
        check.prediction_holds = divergence < 0;
        check.detail =
            divergence < 0
                ? "governing hypothesis identical with and without escalation"
                : "governing hypothesis diverges at step " + std::to_string(divergence);
        report.checks.push_back(check);
    }

    // Check 2: the four covariance markers co-occur under a governance shift.
    {
        FalsificationCheck check;
        check.number = 2;
        check.name = "covariance_markers_co_occur";
        const auto sig = covariance_signature(baseline_metrics, governance_metrics);
        check.prediction_holds = sig.joint;
        check.detail = std::string("reduced_reactivity=") +
                       (sig.reduced_reactivity ? "true" : "false") +
                       " reduced_control=" + (sig.reduced_control ? "true" : "false") +
                       " cross_context_stable=" +
                       (sig.cross_context_stable ? "true" : "false") +
                       " reinstatement_resilient=" +
                       (sig.reinstatement_resilient ? "true" : "false");
        report.checks.push_back(check);
    }

    // Check 3: governance-aligned stability needs no compensatory control:
    // zero integrated effort after the shift while arousal sits at the new
    // set-point.
    {
        FalsificationCheck check;
        check.number = 3;
        check.name = "aligned_stability_without_control";
        const int shift_step =
            static_cast<int>(std::llround(templates::kShiftTime / governance.params.dt));
        double post_shift_effort = 0.0;
        for (const auto& s : governance_trace.steps)
            if (s.step >= shift_step) post_shift_effort += s.effort * governance.params.dt;
        const double setpoint =
            governance.space.hypothesis(templates::kSafeId).autonomic_setpoint;
        const double final_gap =
            std::abs(governance_trace.steps.back().arousal - setpoint);
        check.prediction_holds = post_shift_effort <= 1e-12 && final_gap <= 0.02;
        check.detail = "post-shift effort integral " +
                       std::to_string(post_shift_effort) + ", final set-point gap " +
                       std::to_string(final_gap);
        report.checks.push_back(check);
    }

    // Check 4: governance-shift and precision-only interventions must produce
    // measurably different outcomes under matched load.
    {
        FalsificationCheck check;
        check.number = 4;
        check.name = "interventions_dissociate";
        const bool relapse_differs =
            governance_metrics.relapse != precision_metrics.relapse;
        const double effort_delta = std::abs(governance_metrics.effort_integral -
                                             precision_metrics.effort_integral);
        const double peak_delta = std::abs(governance_metrics.peak_reactivity -
                                           precision_metrics.peak_reactivity);
        check.prediction_holds =
            relapse_differs || effort_delta > 0.1 || peak_delta > 0.02;
        check.detail = "relapse " + std::string(governance_metrics.relapse ? "true" : "false") +
                       " vs " + (precision_metrics.relapse ? "true" : "false") +
                       ", effort delta " + std::to_string(effort_delta) +
                       ", peak delta " + std::to_string(peak_delta);
        report.checks.push_back(check);
    }

    report.all_hold = true;
    for (const auto& c : report.checks) report.all_hold = report.all_hold && c.prediction_holds;
    return report;
}

}  // namespace alpsim
