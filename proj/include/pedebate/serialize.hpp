#pragma once

#include <string>

#include "json.hpp"
#include "pedebate/equilibrium.hpp"
#include "pedebate/indistinguishability.hpp"
#include "pedebate/protocol.hpp"
#include "pedebate/stability.hpp"

namespace pedebate {

using json = nlohmann::json;

// Probabilities travel as decimal strings so files are platform-stable.
json world_to_json(const ProblemWorld& world);
ProblemWorld world_from_json(const json& j);

json decomposition_to_json(const Decomposition& dec);
// Rebuilds the registered kinds (and_tree, interval) against their world.
Decomposition decomposition_from_json(const json& j, const ProblemWorld& world);

json debate_run_to_json(const DebateRun& run);
std::string debate_run_csv_header();
std::string debate_run_csv_row(const DebateRun& run);

json circuit_to_json(const LayeredCircuit& circuit);
json stability_report_to_json(const StabilityReport& report);
std::string stability_report_csv_header();
std::string stability_report_csv_row(const StabilityReport& report);

json outcome_model_to_json(const OutcomeModel& model);
std::string trace_csv(const OgdResult& result, const std::vector<TestFunction>& family);

json payoff_matrix_to_json(const PayoffMatrix& matrix);
std::string payoff_matrix_csv(const PayoffMatrix& matrix);
json equilibria_to_json(const PayoffMatrix& matrix, const std::vector<StackelbergResult>& results);
std::string equilibria_csv(const PayoffMatrix& matrix,
                           const std::vector<StackelbergResult>& results);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace pedebate
