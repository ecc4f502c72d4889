#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "alpsim/falsification.hpp"
#include "alpsim/metrics.hpp"
#include "alpsim/scenario.hpp"
#include "alpsim/scenario_io.hpp"

namespace alpsim {

// Fixed decimal formatting with 12 significant digits; locale-independent,
// so identical runs produce byte-identical files.
inline std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

// Writes the whole payload to a temporary sibling and renames into place, so
// no consumer ever observes a partial file.
inline void atomic_write(const std::string& path, const std::string& payload) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path temp = target.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + temp.string() + " for writing");
        out << payload;
        if (!out) throw Error("write failed: " + temp.string());
    }
    fs::rename(temp, target);
}

// CSV export of a run trace: provenance comment lines, then one fixed header
// row, then one row per step. Posterior/precision columns are keyed by
// hypothesis id and policy columns by policy id, so the header is fixed for a
// given scenario.
inline std::string trace_to_csv(const RunTrace& trace, const Scenario& scenario) {
    std::ostringstream out;
    out << "# scenario: " << trace.scenario_id << "\n";
    out << "# seed: " << trace.seed << "\n";
    out << "# parameter_hash: " << parameter_hash(scenario) << "\n";

    out << "step,time,context,observation,governing,endorsed,selected_policy,"
           "arousal,effort,capacity,relapse,gain,stress_input";
    for (const auto& h : scenario.space.hypotheses) out << ",posterior_" << h.id;
    for (const auto& h : scenario.space.hypotheses) out << ",precision_" << h.id;
    for (const auto& p : scenario.policies)
        out << ",policy_" << p.id << "_efe,policy_" << p.id << "_risk,policy_"
            << p.id << "_ambiguity,policy_" << p.id << "_admissible";
    out << "\n";

    for (const auto& s : trace.steps) {
        out << s.step << ',' << format_number(s.time) << ',' << s.context << ','
            << s.observation << ',' << s.governing << ',' << s.endorsed << ','
            << s.selected_policy << ',' << format_number(s.arousal) << ','
            << format_number(s.effort) << ',' << format_number(s.capacity) << ','
            << (s.relapse ? 1 : 0) << ',' << format_number(s.gain) << ','
            << format_number(s.stress_input);
        for (double v : s.hypothesis_posterior) out << ',' << format_number(v);
        for (double v : s.precision) out << ',' << format_number(v);
        for (const auto& row : s.policy_table)
            out << ',' << format_number(row.expected_free_energy) << ','
                << format_number(row.risk) << ',' << format_number(row.ambiguity)
                << ',' << (row.admissible ? 1 : 0);
        out << "\n";
    }
    return out.str();
}

// Structured key-value report for one run: provenance, metrics, per-context
// settled deviations, per-event battery summaries, and the governance shift
// log verbatim.
inline std::string run_report(const RunTrace& trace, const Scenario& scenario,
                              const Metrics& metrics) {
    std::ostringstream out;
    out << "scenario: " << trace.scenario_id << "\n";
    out << "seed: " << trace.seed << "\n";
    out << "parameter_hash: " << parameter_hash(scenario) << "\n";
    out << "steps: " << trace.steps.size() << "\n";
    out << "dt: " << format_number(trace.dt) << "\n";
    out << "horizon: " << format_number(scenario.horizon) << "\n";
    out << "peak_reactivity: " << format_number(metrics.peak_reactivity) << "\n";
    out << "recovery_tau: " << format_number(metrics.recovery_tau) << "\n";
    out << "effort_integral: " << format_number(metrics.effort_integral) << "\n";
    out << "relapse: " << (metrics.relapse ? "true" : "false") << "\n";
    out << "cross_context_spread: " << format_number(metrics.cross_context_spread)
        << "\n";
    out << "performance_proxy: " << format_number(metrics.performance_proxy) << "\n";
    for (const auto& [ctx, dev] : metrics.context_settled_deviation)
        out << "context_settled_deviation_" << ctx << ": " << format_number(dev)
            << "\n";
    for (std::size_t i = 0; i < metrics.battery.size(); ++i) {
        const auto& b = metrics.battery[i];
        out << "stress_" << i << ": onset=" << format_number(b.onset)
            << " magnitude=" << format_number(b.magnitude)
            << " duration=" << format_number(b.duration)
            << " context=" << b.context
            << " baseline=" << format_number(b.baseline)
            << " peak_excursion=" << format_number(b.peak_excursion);
        if (b.tau_valid) out << " recovery_tau=" << format_number(b.fitted_tau);
        out << "\n";
    }
    for (const auto& shift : trace.final_governance.shift_log)
        out << "shift: t=" << format_number(shift.time)
            << " hypothesis=" << shift.hypothesis_id
            << " action=" << (shift.authorized ? "authorize" : "deauthorize")
            << "\n";
    return out.str();
}

inline std::string falsification_report_text(const FalsificationReport& report) {
    std::ostringstream out;
    out << "falsification_suite: 4 checks\n";
    out << "seed: " << report.seed << "\n";
    out << "selector: "
        << (report.rule == GoverningRule::authority_gated ? "authority_gated"
                                                          : "raw_precision")
        << "\n";
    for (const auto& [id, hash] : report.scenario_hashes)
        out << "scenario_hash_" << id << ": " << hash << "\n";
    for (const auto& c : report.checks) {
        out << "check_" << c.number << "_" << c.name << ": "
            << (c.prediction_holds ? "prediction holds" : "prediction violated")
            << "\n";
        out << "check_" << c.number << "_detail: " << c.detail << "\n";
    }
    out << "overall: "
        << (report.all_hold ? "all predictions hold" : "predictions violated")
        << "\n";
    return out.str();
}

}  // namespace alpsim
