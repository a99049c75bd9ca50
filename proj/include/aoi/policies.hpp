#pragma once

#include "aoi/scenario.hpp"
#include "aoi/solver.hpp"
#include "aoi/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace aoi {

/// A total, stationary, deterministic mapping from states to actions.
/// Rules promise to return a feasible action for every in-range state.
struct DecisionRule {
    std::string name;
    std::function<Action(const State&)> act;
};

/// Query the most expensive source the current battery affords; idle only
/// when nothing is affordable. Costs must be strictly increasing.
Action aggressive_action(const State& s, const std::vector<int>& costs);

DecisionRule aggressive_rule(const ScenarioConfig& config);
DecisionRule always_idle_rule();

/// Query the given source whenever affordable, otherwise idle.
DecisionRule fixed_source_rule(const ScenarioConfig& config, int source);

/// Table lookup over a solved policy; feasibility is re-checked on every
/// call and a stored infeasible action raises an error.
DecisionRule tabular_rule(std::string name, std::vector<Action> policy,
                          const ScenarioConfig& config);
DecisionRule optimal_rule(const PolicySolution& solution, const ScenarioConfig& config);

/// Expands a rule into an explicit per-state action table.
std::vector<Action> materialize(const DecisionRule& rule, const ScenarioConfig& config);

}  // namespace aoi
