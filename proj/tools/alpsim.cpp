// Command-line front end: scenario validation, single runs with CSV trace and
// report export, parameter sweeps, and the falsification suite.
//
// Exit codes: 0 success, 1 scenario error, 2 runtime error,
//             3 falsification-suite prediction violation.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alpsim/falsification.hpp"
#include "alpsim/metrics.hpp"
#include "alpsim/scenario.hpp"
#include "alpsim/scenario_io.hpp"
#include "alpsim/sweep.hpp"
#include "alpsim/templates.hpp"
#include "alpsim/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitPredictionViolated = 3;

// Relative output paths resolve against ALPSIM_OUT_DIR when it is set.
std::string resolve_output(const std::string& path) {
    if (path.empty()) return path;
    const char* base = std::getenv("ALPSIM_OUT_DIR");
    if (base == nullptr || *base == '\0') return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base) / p).string();
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

const char* kScenarioFormatHelp = R"(Scenario file format (version 1, JSON):
  version            format version, must be 1
  id                 scenario name recorded in outputs
  seed               unsigned integer; --seed overrides it
  horizon            simulated seconds
  endorsed           hypothesis id the agent consciously endorses
  params             dt, recovery_tau, control_strength,
                     control_depletion_rate, control_recovery_rate,
                     precision_rate (0 disables precision dynamics)
  space              states, observations, actions, hypotheses[]
  space.hypotheses[] id, label, likelihood [state][obs],
                     transition [action][state][state], preferences [obs],
                     state_prior [state], autonomic_setpoint in [0,1],
                     policy_repertoire [policy ids]
  policies[]         id, actions [action indices], generated_by hypothesis id
  initial            context, hypothesis_posterior (optional),
                     precision (optional), precision_bounds [min,max],
                     authorized [hypothesis ids], arousal, control_capacity,
                     gain (>= 1)
  selection          mode: "argmin" | "softmax", gamma (softmax temperature)
  governing_rule     "authority_gated" (default) | "raw_precision" (ablation)
  dominance_rule     "precision_weighted" (default) | "posterior_only"
  timeline[]         time-ordered events, each {t, event, ...}:
                       observe: observation, identity_relevant
                       stress: magnitude, duration, identity_relevant
                       authorize / deauthorize: hypothesis
                       set_precision: hypothesis, value
                       set_gain: value (>= 1)
                       context: context
Unknown keys are rejected (strict) or warned about (--lenient).)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete active-inference agent simulator with an "
                 "authority-gated regulation layer"};
    app.require_subcommand(1);
    app.footer(kScenarioFormatHelp);

    std::string scenario_path, trace_path, report_path, grid_path, params_path;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    bool lenient = false;
    int jobs = 1;

    auto* validate_cmd =
        app.add_subcommand("validate", "Parse a scenario file and report every "
                                       "violated invariant");
    validate_cmd->add_option("file", scenario_path, "scenario file")->required();
    validate_cmd->add_flag("--lenient", lenient,
                           "warn about unknown keys instead of rejecting them");

    auto* run_cmd = app.add_subcommand(
        "run", "Run one scenario; write the step trace and the metrics report");
    run_cmd->add_option("file", scenario_path, "scenario file")->required();
    run_cmd->add_option("--trace", trace_path, "trace CSV output path");
    run_cmd->add_option("--report", report_path, "metrics report output path");
    run_cmd->add_option("--seed", seed_override, "override the file seed")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_flag("--lenient", lenient,
                      "warn about unknown keys instead of rejecting them");

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Run a scenario once per grid point and tabulate metrics");
    sweep_cmd->add_option("file", scenario_path, "scenario file")->required();
    sweep_cmd->add_option("--grid", grid_path, "grid file")->required();
    sweep_cmd->add_option("--out", trace_path, "sweep table CSV output path");
    sweep_cmd->add_option("--seed", seed_override, "override the file seed");
    sweep_cmd->add_option("--jobs", jobs, "parallel grid workers")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--lenient", lenient,
                        "warn about unknown keys instead of rejecting them");

    auto* falsify_cmd = app.add_subcommand(
        "falsify", "Run the four-check falsification suite on the canonical "
                   "templates");
    falsify_cmd->add_option("--params", params_path,
                            "parameter file: {\"seed\": N, \"selector\": "
                            "\"authority_gated\"|\"raw_precision\"}");
    falsify_cmd->add_option("--report", report_path, "report output path");
    falsify_cmd->add_option("--seed", seed_override, "override the suite seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    seed_given = run_cmd->count("--seed") > 0 || sweep_cmd->count("--seed") > 0 ||
                 falsify_cmd->count("--seed") > 0;

    try {
        if (validate_cmd->parsed()) {
            std::vector<std::string> warnings;
            alpsim::Json doc;
            alpsim::Scenario scenario;
            try {
                doc = alpsim::load_json_file(scenario_path);
                scenario =
                    alpsim::parse_scenario_document(doc, !lenient, &warnings);
            } catch (const alpsim::ScenarioError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitScenarioError;
            }
            print_warnings(warnings);
            const auto report = alpsim::validate_scenario(scenario);
            if (!report.valid()) {
                for (const auto& v : report.violations)
                    std::cerr << "violation [" << v.code << "]: " << v.message
                              << "\n";
                return kExitScenarioError;
            }
            std::cout << "ok: " << scenario.id << " ("
                      << scenario.space.hypotheses.size() << " hypotheses, "
                      << scenario.policies.size() << " policies, "
                      << scenario.timeline.size() << " events, horizon "
                      << alpsim::format_number(scenario.horizon) << " s)\n";
            std::cout << "parameter_hash: " << alpsim::parameter_hash(scenario)
                      << "\n";
            return kExitOk;
        }

        if (run_cmd->parsed()) {
            std::vector<std::string> warnings;
            alpsim::Scenario scenario;
            try {
                scenario = alpsim::parse_scenario_file(scenario_path, !lenient,
                                                       &warnings);
            } catch (const alpsim::ScenarioError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitScenarioError;
            }
            print_warnings(warnings);
            if (seed_given) scenario.seed = seed_override;

            const alpsim::RunTrace trace = alpsim::run_scenario(scenario);
            const alpsim::Metrics metrics = alpsim::compute_metrics(trace, scenario);

            if (!trace_path.empty())
                alpsim::atomic_write(resolve_output(trace_path),
                                     alpsim::trace_to_csv(trace, scenario));
            if (!report_path.empty())
                alpsim::atomic_write(resolve_output(report_path),
                                     alpsim::run_report(trace, scenario, metrics));
            std::cout << alpsim::run_report(trace, scenario, metrics);
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            std::vector<std::string> warnings;
            alpsim::Json scenario_doc;
            std::vector<alpsim::GridAxis> axes;
            std::uint64_t base_seed = 0;
            std::string scenario_id, base_hash;
            try {
                scenario_doc = alpsim::load_json_file(scenario_path);
                // Parse once up front so bad scenarios fail before any run.
                const auto scenario =
                    alpsim::parse_scenario(scenario_doc, !lenient, &warnings);
                base_seed = seed_given ? seed_override : scenario.seed;
                scenario_id = scenario.id;
                base_hash = alpsim::parameter_hash(scenario);
                axes = alpsim::parse_grid_file(alpsim::load_json_file(grid_path));
            } catch (const alpsim::ScenarioError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitScenarioError;
            }
            print_warnings(warnings);

            const auto result = alpsim::sweep(scenario_doc, axes, base_seed, jobs);
            const std::string csv =
                alpsim::sweep_to_csv(result, axes, scenario_id, base_seed, base_hash);
            if (!trace_path.empty())
                alpsim::atomic_write(resolve_output(trace_path), csv);
            std::cout << csv;
            return kExitOk;
        }

        if (falsify_cmd->parsed()) {
            alpsim::FalsificationConfig config;
            if (!params_path.empty()) {
                const alpsim::Json doc = alpsim::load_json_file(params_path);
                alpsim::io_detail::check_keys(doc, "", {"seed", "selector"}, true,
                                              nullptr);
                if (doc.contains("seed"))
                    config.seed = doc["seed"].get<std::uint64_t>();
                if (doc.contains("selector")) {
                    const std::string selector = doc["selector"].get<std::string>();
                    if (selector == "authority_gated")
                        config.rule = alpsim::GoverningRule::authority_gated;
                    else if (selector == "raw_precision")
                        config.rule = alpsim::GoverningRule::raw_precision;
                    else
                        throw alpsim::ScenarioError(
                            "selector must be authority_gated or raw_precision",
                            "/selector");
                }
            }
            if (seed_given) config.seed = seed_override;

            const auto report = alpsim::falsification_suite(config);
            const std::string text = alpsim::falsification_report_text(report);
            if (!report_path.empty())
                alpsim::atomic_write(resolve_output(report_path), text);
            std::cout << text;
            return report.all_hold ? kExitOk : kExitPredictionViolated;
        }
    } catch (const alpsim::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitScenarioError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
