#include "aoi/policies.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

namespace aoi {

Action aggressive_action(const State& s, const std::vector<int>& costs) {
    Action choice = Action::idle();
    for (int i = 0; i < static_cast<int>(costs.size()); ++i)
        if (costs[i] <= s.battery) choice = Action::query(i + 1);
    return choice;
}

DecisionRule aggressive_rule(const ScenarioConfig& config) {
    return {"aggressive", [costs = config.costs()](const State& s) {
                return aggressive_action(s, costs);
            }};
}

DecisionRule always_idle_rule() {
    return {"idle", [](const State&) { return Action::idle(); }};
}

DecisionRule fixed_source_rule(const ScenarioConfig& config, int source) {
    if (source < 1 || source > static_cast<int>(config.sources.size()))
        throw std::invalid_argument("fixed_source_rule: no such source");
    const int cost = config.sources[source - 1].cost;
    return {"source" + std::to_string(source), [source, cost](const State& s) {
                return s.battery >= cost ? Action::query(source) : Action::idle();
            }};
}

DecisionRule tabular_rule(std::string name, std::vector<Action> policy,
                          const ScenarioConfig& config) {
    if (static_cast<int>(policy.size()) !=
        state_count(config.battery_capacity, config.aoi_cap))
        throw std::invalid_argument("tabular_rule: policy size mismatch");
    auto table = std::make_shared<const std::vector<Action>>(std::move(policy));
    const int cap = config.aoi_cap;
    auto costs = config.costs();
    return {std::move(name), [table, costs, cap](const State& s) {
                const Action a = (*table)[state_index(s, cap)];
                if (!a.is_idle() && costs[a.source() - 1] > s.battery)
                    throw std::logic_error("tabular policy stores an unaffordable "
                                           "query for battery " +
                                           std::to_string(s.battery));
                return a;
            }};
}

DecisionRule optimal_rule(const PolicySolution& solution, const ScenarioConfig& config) {
    return tabular_rule("optimal", solution.policy, config);
}

std::vector<Action> materialize(const DecisionRule& rule, const ScenarioConfig& config) {
    std::vector<Action> table;
    table.reserve(state_count(config.battery_capacity, config.aoi_cap));
    for (int b = 0; b <= config.battery_capacity; ++b)
        for (int aoi = 1; aoi <= config.aoi_cap; ++aoi)
            table.push_back(rule.act(State{b, aoi}));
    return table;
}

}  // namespace aoi
