#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "alpsim/metrics.hpp"
#include "alpsim/scenario.hpp"
#include "alpsim/scenario_io.hpp"
#include "alpsim/trace_io.hpp"

namespace alpsim {

// One sweep axis: a JSON pointer into the scenario document and the values to
// substitute there. The grid is the cartesian product of all axes, enumerated
// row-major in file order.
struct GridAxis {
    std::string pointer;
    std::vector<Json> values;
};

struct SweepRow {
    int index = 0;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::uint64_t seed = 0;
    std::optional<Metrics> metrics;
    std::string error;  // empty on success
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

inline std::vector<GridAxis> parse_grid_file(const Json& doc) {
    if (!doc.is_object()) throw ScenarioError("grid document must be an object");
    io_detail::check_keys(doc, "", {"version", "axes"}, /*strict=*/true, nullptr);
    const int version = io_detail::integer(io_detail::require(doc, "", "version"),
                                           "/version");
    if (version != 1)
        throw ScenarioError("unsupported grid format version", "/version");
    const Json& axes = io_detail::require(doc, "", "axes");
    if (!axes.is_array() || axes.empty())
        throw ScenarioError("grid needs a non-empty axes array", "/axes");

    std::vector<GridAxis> out;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string ptr = "/axes/" + std::to_string(i);
        io_detail::check_keys(axes[i], ptr, {"pointer", "values"}, true, nullptr);
        GridAxis axis;
        axis.pointer = io_detail::text(io_detail::require(axes[i], ptr, "pointer"),
                                       ptr + "/pointer");
        try {
            Json::json_pointer probe(axis.pointer);
        } catch (const Json::exception&) {
            throw ScenarioError("invalid JSON pointer \"" + axis.pointer + "\"",
                                ptr + "/pointer");
        }
        const Json& values = io_detail::require(axes[i], ptr, "values");
        if (!values.is_array() || values.empty())
            throw ScenarioError("axis needs a non-empty values array",
                                ptr + "/values");
        for (const auto& v : values) axis.values.push_back(v);
        out.push_back(std::move(axis));
    }
    return out;
}

// Runs one scenario variant per grid point. Seeds are derived from the base
// seed plus the grid index; a failing row records its error and the sweep
// continues. `jobs` > 1 distributes rows over threads; results are merged by
// index, so ordering is independent of scheduling.
inline SweepResult sweep(const Json& scenario_doc, const std::vector<GridAxis>& axes,
                         std::uint64_t base_seed, int jobs = 1) {
    if (axes.empty()) throw ScenarioError("empty parameter grid");

    int total = 1;
    for (const auto& a : axes) total *= static_cast<int>(a.values.size());

    SweepResult result;
    result.rows.resize(static_cast<std::size_t>(total));

    auto run_row = [&](int index) {
        SweepRow& row = result.rows[static_cast<std::size_t>(index)];
        row.index = index;
        row.seed = derive_seed(base_seed, static_cast<std::uint64_t>(index));
        Json doc = scenario_doc;
        try {
            int remainder = index;
            for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
                const int n = static_cast<int>(it->values.size());
                const Json& value = it->values[static_cast<std::size_t>(remainder % n)];
                remainder /= n;
                doc[Json::json_pointer(it->pointer)] = value;
                row.parameters.emplace_back(it->pointer, value.dump());
            }
            std::reverse(row.parameters.begin(), row.parameters.end());
            doc["seed"] = row.seed;
            const Scenario scenario = parse_scenario(doc, /*strict=*/true);
            const RunTrace trace = run_scenario(scenario);
            row.metrics = compute_metrics(trace, scenario);
        } catch (const std::exception& e) {
            row.metrics.reset();
            row.error = e.what();
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int i = 0; i < total; ++i) run_row(i);
    } else {
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                    run_row(i);
            });
        }
        for (auto& t : workers) t.join();
    }
    return result;
}

// CSV table of metrics keyed by the grid parameters, ordered by grid index.
// Provenance comment lines identify the base scenario the grid was applied to.
inline std::string sweep_to_csv(const SweepResult& result,
                                const std::vector<GridAxis>& axes,
                                const std::string& scenario_id,
                                std::uint64_t base_seed,
                                const std::string& base_parameter_hash) {
    std::ostringstream out;
    out << "# scenario: " << scenario_id << "\n";
    out << "# base_seed: " << base_seed << "\n";
    out << "# parameter_hash: " << base_parameter_hash << "\n";
    out << "index,seed";
    for (const auto& a : axes) out << ',' << a.pointer;
    out << ",peak_reactivity,recovery_tau,effort_integral,relapse,"
           "cross_context_spread,performance_proxy,error\n";
    for (const auto& row : result.rows) {
        out << row.index << ',' << row.seed;
        for (const auto& [pointer, value] : row.parameters) {
            (void)pointer;
            out << ',' << value;
        }
        if (row.metrics) {
            const auto& m = *row.metrics;
            out << ',' << format_number(m.peak_reactivity) << ','
                << format_number(m.recovery_tau) << ','
                << format_number(m.effort_integral) << ',' << (m.relapse ? 1 : 0)
                << ',' << format_number(m.cross_context_spread) << ','
                << format_number(m.performance_proxy) << ',';
        } else {
            out << ",,,,,,";
        }
        // Quote the error so commas inside messages cannot break the row.
        if (!row.error.empty()) {
            std::string quoted = row.error;
            for (auto& c : quoted)
                if (c == '"' || c == '\n') c = ' ';
            out << '"' << quoted << '"';
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace alpsim
