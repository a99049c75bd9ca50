#pragma once

#include "aoi/scenario.hpp"
#include "aoi/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace aoi {

/// Age update: min{aoi+1, received update age, aoi_cap}. An absent update
/// age encodes idle (it acts as aoi_cap); stale updates never raise the age.
int next_aoi(int aoi, std::optional<int> update_age, int aoi_cap);

/// Idle plus every affordable query, cheapest first.
std::vector<Action> feasible_actions(const State& s, const ScenarioConfig& config);

/// One (state, action) row: expected one-step reward E[next aoi] and a range
/// into the model's flat (next_state, prob) arrays.
struct ActionRow {
    Action action;
    double expected_reward = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t count = 0;
};

/// The finite MDP in sparse row form; immutable once built.
struct TransitionModel {
    ScenarioConfig scenario;
    int state_count = 0;
    std::vector<std::vector<ActionRow>> rows;  // per state, action order fixed
    std::vector<int> next_state;               // flat transition targets
    std::vector<double> prob;                  // flat transition masses

    std::span<const int> targets(const ActionRow& row) const {
        return {next_state.data() + row.begin, row.count};
    }
    std::span<const double> masses(const ActionRow& row) const {
        return {prob.data() + row.begin, row.count};
    }
    /// Row for the given action; throws if the action is not present
    /// (infeasible under masking, or out of range).
    const ActionRow& row_for(int state, Action action) const;
};

/// Materializes every (state, action) row from the scenario. Query rows mix
/// the two harvest outcomes over the source's age pmf; duplicate next states
/// are merged. Infeasible queries are omitted under masking, or kept as a
/// certain fall to (0, aoi_cap) in penalty mode.
TransitionModel build_transition_model(const ScenarioConfig& config);

/// Audit dump, one line per transition: b,aoi,action,next_b,next_aoi,prob.
void dump_model_csv(const TransitionModel& model, std::ostream& out);

}  // namespace aoi
