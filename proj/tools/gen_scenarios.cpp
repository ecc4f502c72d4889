// Regenerates the shipped scenario template files under scenarios/ from the
// canonical builders. Run from the repository root after changing templates.

#include <iostream>
#include <string>

#include "alpsim/scenario_io.hpp"
#include "alpsim/templates.hpp"
#include "alpsim/trace_io.hpp"

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "scenarios";
    using namespace alpsim;
    const std::pair<std::string, Scenario> files[] = {
        {dir + "/baseline.json", templates::baseline_scenario()},
        {dir + "/governance_intervention.json",
         templates::governance_intervention_scenario()},
        {dir + "/precision_intervention.json",
         templates::precision_intervention_scenario()},
    };
    for (const auto& [path, scenario] : files) {
        atomic_write(path, scenario_to_string(scenario));
        std::cout << path << "\n";
    }
    return 0;
}
