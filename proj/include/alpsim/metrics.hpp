#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "alpsim/errors.hpp"
#include "alpsim/regulation.hpp"
#include "alpsim/scenario.hpp"

namespace alpsim {

// Post-stress window the fitter and metrics agree on: arousal must exceed the
// pre-onset baseline by at least this much to count as decaying excursion.
inline constexpr double kExcursionThreshold = 0.01;
// Baseline = mean arousal over this many seconds before stress onset.
inline constexpr double kBaselineWindowSeconds = 2.0;
// Settled readings average the trailing stress-free second of a context segment.
inline constexpr double kSettleWindowSeconds = 1.0;

namespace detail {

inline double baseline_before(const RunTrace& trace, int onset_step) {
    const int window = static_cast<int>(
        std::llround(kBaselineWindowSeconds / trace.dt));
    const int first = std::max(0, onset_step - window);
    if (first >= onset_step)
        return trace.steps.empty() ? 0.0 : trace.steps.front().arousal;
    double total = 0.0;
    for (int i = first; i < onset_step; ++i)
        total += trace.steps[static_cast<std::size_t>(i)].arousal;
    return total / (onset_step - first);
}

}  // namespace detail

// Log-linear least-squares estimate of the recovery time constant after a
// stress event: fit ln(arousal - baseline) against time over the post-offset
// decay window and return -1/slope. The window runs from stress offset while
// the excursion stays above threshold and arousal keeps decaying (a later
// stressor's rise terminates it). The deep tail, where any baseline error
// dominates the log, is excluded: the window ends once the excursion falls
// below 15% of its starting value.
inline double fit_recovery_time_constant(const RunTrace& trace,
                                         const StressEvent& event) {
    if (trace.steps.empty()) throw FitError("empty trace");
    const int onset = static_cast<int>(std::llround(event.time / trace.dt));
    const int offset =
        onset + static_cast<int>(std::llround(event.duration / trace.dt));
    if (offset < 0 || offset >= static_cast<int>(trace.steps.size()))
        throw FitError("stress offset outside the trace");

    const double baseline = detail::baseline_before(trace, onset);
    const double initial_excursion =
        trace.steps[static_cast<std::size_t>(offset)].arousal - baseline;
    const double floor =
        std::max(kExcursionThreshold, 0.15 * initial_excursion);

    std::vector<double> times, logs;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = offset; i < static_cast<int>(trace.steps.size()); ++i) {
        const auto& s = trace.steps[static_cast<std::size_t>(i)];
        const double excursion = s.arousal - baseline;
        if (excursion <= floor) break;
        if (s.arousal > prev) break;  // a new stressor is driving arousal up
        prev = s.arousal;
        times.push_back(s.time);
        logs.push_back(std::log(excursion));
    }
    if (times.empty()) throw FitError("no positive excursion after stress offset");
    if (times.size() < 20)
        throw FitError("insufficient decay samples: " + std::to_string(times.size()));

    double mean_t = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        mean_t += times[i];
        mean_y += logs[i];
    }
    mean_t /= static_cast<double>(times.size());
    mean_y /= static_cast<double>(times.size());
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        cov += (times[i] - mean_t) * (logs[i] - mean_y);
        var += (times[i] - mean_t) * (times[i] - mean_t);
    }
    const double slope = cov / var;
    if (!(slope < 0.0)) throw FitError("excursion is not decaying");
    return -1.0 / slope;
}

// Per-event summary retained inside Metrics so signature comparisons can
// match batteries and look up individual responses.
struct StressSummary {
    double onset = 0.0;
    double magnitude = 0.0;
    double duration = 0.0;
    bool identity_relevant = false;
    int context = 0;
    double baseline = 0.0;
    double peak_excursion = 0.0;
    double fitted_tau = 0.0;
    bool tau_valid = false;
};

struct Metrics {
    double peak_reactivity = 0.0;  // max excursion over the battery
    double recovery_tau = 0.0;     // mean of the valid per-event fits
    double effort_integral = 0.0;
    bool relapse = false;
    double cross_context_spread = 0.0;  // max settled deviation across contexts
    double performance_proxy = 1.0;

    std::vector<StressSummary> battery;
    std::map<int, double> context_settled_deviation;
    std::set<int> contexts;
};

struct CovarianceSignature {
    bool reduced_reactivity = false;
    bool reduced_control = false;
    bool cross_context_stable = false;
    bool reinstatement_resilient = false;
    bool joint = false;
};

inline Metrics compute_metrics(const RunTrace& trace, const Scenario& scenario) {
    Metrics m;
    const double dt = trace.dt;
    const int n = static_cast<int>(trace.steps.size());

    for (const auto& s : trace.steps) {
        m.effort_integral += s.effort * dt;
        m.relapse = m.relapse || s.relapse;
        m.contexts.insert(s.context);
    }

    // Performance proxy: how often the recorded selection is the admissible
    // G-argmin of its own evaluation table (always, under argmin selection;
    // possibly less under softmax).
    int decided = 0, optimal = 0;
    for (const auto& s : trace.steps) {
        if (s.policy_table.empty()) continue;
        ++decided;
        int best = -1;
        double best_g = 0.0;
        for (const auto& row : s.policy_table) {
            if (!row.admissible) continue;
            if (best < 0 || row.expected_free_energy < best_g ||
                (row.expected_free_energy == best_g && row.policy_id < best)) {
                best = row.policy_id;
                best_g = row.expected_free_energy;
            }
        }
        if (best == s.selected_policy) ++optimal;
    }
    m.performance_proxy = decided == 0 ? 1.0 : static_cast<double>(optimal) / decided;

    // Stress battery: peak excursion above the pre-onset baseline, and a
    // recovery-constant fit per event where one is possible.
    std::vector<const TimelineEvent*> stressors;
    for (const auto& e : scenario.timeline)
        if (e.kind == EventKind::stress) stressors.push_back(&e);

    for (std::size_t k = 0; k < stressors.size(); ++k) {
        const auto& e = *stressors[k];
        const int onset = static_cast<int>(std::llround(e.time / dt));
        if (onset >= n) continue;
        const int window_end =
            k + 1 < stressors.size()
                ? std::min(n, static_cast<int>(std::llround(stressors[k + 1]->time / dt)))
                : n;

        StressSummary summary;
        summary.onset = e.time;
        summary.magnitude = e.magnitude;
        summary.duration = e.duration;
        summary.identity_relevant = e.identity_relevant;
        summary.context = trace.steps[static_cast<std::size_t>(onset)].context;
        summary.baseline = detail::baseline_before(trace, onset);
        for (int i = onset; i < window_end; ++i) {
            summary.peak_excursion = std::max(
                summary.peak_excursion,
                trace.steps[static_cast<std::size_t>(i)].arousal - summary.baseline);
        }
        try {
            summary.fitted_tau = fit_recovery_time_constant(
                trace, StressEvent{e.time, e.magnitude, e.duration, summary.context,
                                   e.identity_relevant});
            summary.tau_valid = true;
        } catch (const FitError&) {
            summary.tau_valid = false;
        }
        m.peak_reactivity = std::max(m.peak_reactivity, summary.peak_excursion);
        m.battery.push_back(summary);
    }
    int valid = 0;
    for (const auto& s : m.battery) {
        if (s.tau_valid) {
            m.recovery_tau += s.fitted_tau;
            ++valid;
        }
    }
    m.recovery_tau = valid ? m.recovery_tau / valid : 0.0;

    // Settled arousal per context: the trailing stress-free second of the
    // most recent segment of each context, measured against the governing
    // set-point at that moment.
    const int settle_steps =
        std::max(1, static_cast<int>(std::llround(kSettleWindowSeconds / dt)));
    int segment_start = 0;
    for (int i = 0; i <= n; ++i) {
        const bool boundary =
            i == n || (i > 0 && trace.steps[static_cast<std::size_t>(i)].context !=
                                    trace.steps[static_cast<std::size_t>(i - 1)].context);
        if (!boundary) continue;
        const int segment_end = i;  // [segment_start, segment_end)
        int quiet_end = segment_end;
        while (quiet_end > segment_start &&
               trace.steps[static_cast<std::size_t>(quiet_end - 1)].stress_input > 0.0)
            --quiet_end;
        if (quiet_end > segment_start) {
            const int first = std::max(segment_start, quiet_end - settle_steps);
            double settled = 0.0;
            for (int j = first; j < quiet_end; ++j)
                settled += trace.steps[static_cast<std::size_t>(j)].arousal;
            settled /= (quiet_end - first);
            const auto& last = trace.steps[static_cast<std::size_t>(quiet_end - 1)];
            const double setpoint =
                scenario.space.hypothesis(last.governing).autonomic_setpoint;
            m.context_settled_deviation[last.context] =
                std::abs(settled - setpoint);
        }
        segment_start = i;
    }
    for (const auto& [ctx, dev] : m.context_settled_deviation)
        m.cross_context_spread = std::max(m.cross_context_spread, dev);

    return m;
}

// The four-marker covariance signature comparing a post-intervention battery
// against its matched pre-intervention battery. Throws when the batteries do
// not share the same load sequence.
inline CovarianceSignature covariance_signature(const Metrics& pre,
                                                const Metrics& post,
                                                double epsilon_context = 0.02) {
    if (post.battery.size() < pre.battery.size())
        throw ScenarioError("mismatched stressor batteries: post is shorter");
    for (std::size_t i = 0; i < pre.battery.size(); ++i) {
        const auto& a = pre.battery[i];
        const auto& b = post.battery[i];
        if (a.magnitude != b.magnitude || a.duration != b.duration ||
            a.identity_relevant != b.identity_relevant)
            throw ScenarioError("mismatched stressor batteries at event " +
                                std::to_string(i));
    }

    CovarianceSignature sig;
    sig.reduced_reactivity = post.peak_reactivity < pre.peak_reactivity;
    sig.reduced_control = post.effort_integral < pre.effort_integral &&
                          post.performance_proxy >= pre.performance_proxy;

    // Cross-context stability is judged on contexts absent from the pre run.
    bool any_novel_reading = false;
    bool all_novel_stable = true;
    for (const auto& [ctx, dev] : post.context_settled_deviation) {
        if (pre.contexts.count(ctx)) continue;
        any_novel_reading = true;
        all_novel_stable = all_novel_stable && dev <= epsilon_context;
    }
    sig.cross_context_stable = any_novel_reading && all_novel_stable;

    sig.reinstatement_resilient = !post.relapse;
    sig.joint = sig.reduced_reactivity && sig.reduced_control &&
                sig.cross_context_stable && sig.reinstatement_resilient;
    return sig;
}

}  // namespace alpsim
