#include "aoi/mdp.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>

namespace aoi {

int next_aoi(int aoi, std::optional<int> update_age, int aoi_cap) {
    if (aoi < 1 || aoi > aoi_cap)
        throw std::invalid_argument("next_aoi: aoi out of range");
    int received = update_age.value_or(aoi_cap);
    if (received < 1 || received > aoi_cap)
        throw std::invalid_argument("next_aoi: update age out of range");
    return std::min({aoi + 1, received, aoi_cap});
}

std::vector<Action> feasible_actions(const State& s, const ScenarioConfig& config) {
    std::vector<Action> actions;
    actions.reserve(config.sources.size() + 1);
    actions.push_back(Action::idle());
    for (const auto& src : config.sources)
        if (src.cost <= s.battery) actions.push_back(Action::query(src.index));
    return actions;
}

const ActionRow& TransitionModel::row_for(int state, Action action) const {
    for (const auto& row : rows.at(state))
        if (row.action == action) return row;
    throw std::invalid_argument("action " + std::to_string(action.id()) +
                                " not available in state " + std::to_string(state));
}

TransitionModel build_transition_model(const ScenarioConfig& config) {
    if (!config.resolved())
        throw ConfigError("build_transition_model: scenario not resolved");

    TransitionModel model;
    model.scenario = config;
    model.state_count = state_count(config.battery_capacity, config.aoi_cap);
    model.rows.resize(model.state_count);

    const int cap = config.aoi_cap;
    const int B = config.battery_capacity;
    const double lambda = config.harvest_prob;
    const int gain = config.harvest_amount;

    // Ordered map keeps entries sorted by next-state index, which makes the
    // flat arrays (and the CSV dump) deterministic.
    std::map<int, double> merged;
    const auto flush_row = [&](int state, Action action) {
        ActionRow row;
        row.action = action;
        row.begin = static_cast<std::uint32_t>(model.next_state.size());
        double reward = 0.0;
        for (const auto& [next, mass] : merged) {
            model.next_state.push_back(next);
            model.prob.push_back(mass);
            reward += mass * state_at(next, cap).aoi;
        }
        row.count = static_cast<std::uint32_t>(merged.size());
        row.expected_reward = reward;
        model.rows[state].push_back(row);
        merged.clear();
    };

    for (int b = 0; b <= B; ++b) {
        for (int aoi = 1; aoi <= cap; ++aoi) {
            const int s = state_index(State{b, aoi}, cap);
            const int aged = next_aoi(aoi, std::nullopt, cap);

            if (b == B) {
                merged[state_index(State{B, aged}, cap)] = 1.0;
            } else {
                if (lambda < 1.0)
                    merged[state_index(State{b, aged}, cap)] += 1.0 - lambda;
                if (lambda > 0.0)
                    merged[state_index(State{std::min(b + gain, B), aged}, cap)] += lambda;
            }
            flush_row(s, Action::idle());

            for (const auto& src : config.sources) {
                if (src.cost > b) {
                    if (config.infeasible_query == InfeasibleQueryMode::penalty) {
                        merged[state_index(State{0, cap}, cap)] = 1.0;
                        flush_row(s, Action::query(src.index));
                    }
                    continue;
                }
                const int b_spent = b - src.cost;
                const int b_harvest = std::min(b_spent + gain, B);
                for (int j = 1; j <= config.age_max; ++j) {
                    const double gamma = src.age_pmf[j - 1];
                    if (gamma <= 0.0) continue;
                    const int next_age = next_aoi(aoi, j, cap);
                    if (lambda > 0.0)
                        merged[state_index(State{b_harvest, next_age}, cap)] += lambda * gamma;
                    if (lambda < 1.0)
                        merged[state_index(State{b_spent, next_age}, cap)] += (1.0 - lambda) * gamma;
                }
                flush_row(s, Action::query(src.index));
            }
        }
    }
    return model;
}

void dump_model_csv(const TransitionModel& model, std::ostream& out) {
    out << "battery,aoi,action,next_battery,next_aoi,prob\n";
    const int cap = model.scenario.aoi_cap;
    for (int s = 0; s < model.state_count; ++s) {
        const State from = state_at(s, cap);
        for (const auto& row : model.rows[s]) {
            const auto targets = model.targets(row);
            const auto masses = model.masses(row);
            for (std::size_t k = 0; k < targets.size(); ++k) {
                const State to = state_at(targets[k], cap);
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.17g", masses[k]);
                out << from.battery << ',' << from.aoi << ',' << row.action.id()
                    << ',' << to.battery << ',' << to.aoi << ',' << buf << '\n';
            }
        }
    }
}

}  // namespace aoi
