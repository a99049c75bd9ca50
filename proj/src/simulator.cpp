#include "aoi/simulator.hpp"

#include "aoi/io.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace aoi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

int sample_update_age(const Vector& pmf, double u) {
    double cum = 0.0;
    const int n = static_cast<int>(pmf.size());
    for (int j = 0; j < n; ++j) {
        cum += pmf[j];
        if (u < cum) return j + 1;
    }
    return n;  // guard against cumulative round-off
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t replication,
                                 std::uint64_t stream) {
    std::uint64_t z = splitmix64(base ^ (0x9E3779B97F4A7C15ULL * (replication + 1)));
    return splitmix64(z ^ (0xBF58476D1CE4E5B9ULL * (stream + 1)));
}

State simulation_step(const State& s, Action action, bool harvest_draw,
                      double age_draw, const ScenarioConfig& config) {
    const int harvested = harvest_draw ? config.harvest_amount : 0;
    if (action.is_idle()) {
        const int battery = std::min(s.battery + harvested, config.battery_capacity);
        return State{battery, next_aoi(s.aoi, std::nullopt, config.aoi_cap)};
    }
    const auto& src = config.sources.at(action.source() - 1);
    if (src.cost > s.battery)
        throw std::invalid_argument("simulation_step: query of source " +
                                    std::to_string(action.source()) +
                                    " is not affordable at battery " +
                                    std::to_string(s.battery));
    const int battery =
        std::min(s.battery - src.cost + harvested, config.battery_capacity);
    const int update_age = sample_update_age(src.age_pmf, age_draw);
    return State{battery, next_aoi(s.aoi, update_age, config.aoi_cap)};
}

SimulationMetrics simulate(const DecisionRule& rule, const ScenarioConfig& config,
                           long horizon, int replications, std::uint64_t seed,
                           const SimulateOptions& options) {
    if (!config.resolved()) throw ConfigError("simulate: scenario not resolved");
    if (horizon < 1 || replications < 1)
        throw std::invalid_argument("simulate: horizon and replications must be >= 1");

    SimulationMetrics metrics;
    metrics.horizon = horizon;
    metrics.replications = replications;
    metrics.seed = seed;
    metrics.policy_name = rule.name;
    metrics.source_usage.assign(config.sources.size() + 1, 0);

    std::uint64_t stream_base = seed;
    if (options.independent_streams) stream_base ^= fnv1a64(rule.name);

    const double lambda = config.harvest_prob;
    const int B = config.battery_capacity;
    std::vector<double> rep_mean(replications);

    std::uint64_t total_aoi = 0;
    for (int m = 0; m < replications; ++m) {
        std::mt19937_64 harvest_rng(derive_stream_seed(stream_base, m, 0));
        std::mt19937_64 age_rng(derive_stream_seed(stream_base, m, 1));

        State state{0, config.aoi_cap};
        std::uint64_t rep_aoi = 0;
        std::uint64_t rep_harvested = 0, rep_spent = 0, rep_clamp_loss = 0;

        for (long t = 0; t < horizon; ++t) {
            const Action action = rule.act(state);
            const bool harvest = uniform01(harvest_rng) < lambda;
            const double age_draw = action.is_idle() ? 0.0 : uniform01(age_rng);

            const int spend = action.is_idle() ? 0 : config.sources[action.source() - 1].cost;
            const int unclamped = state.battery - spend +
                                  (harvest ? config.harvest_amount : 0);

            state = simulation_step(state, action, harvest, age_draw, config);
            assert(state.battery >= 0 && state.battery <= B);
            assert(state.aoi >= 1 && state.aoi <= config.aoi_cap);

            rep_aoi += static_cast<std::uint64_t>(state.aoi);
            rep_spent += static_cast<std::uint64_t>(spend);
            if (harvest) rep_harvested += static_cast<std::uint64_t>(config.harvest_amount);
            if (unclamped > B) rep_clamp_loss += static_cast<std::uint64_t>(unclamped - B);
            metrics.source_usage[action.id()] += 1;
        }

        // Per-replication conservation: harvested = spent + clamped + stored.
        assert(rep_harvested ==
               rep_spent + rep_clamp_loss + static_cast<std::uint64_t>(state.battery));

        total_aoi += rep_aoi;
        metrics.total_harvested += rep_harvested;
        metrics.total_spent += rep_spent;
        metrics.total_clamp_loss += rep_clamp_loss;
        metrics.final_battery_sum += static_cast<std::uint64_t>(state.battery);
        rep_mean[m] = static_cast<double>(rep_aoi) / static_cast<double>(horizon);
    }

    const double slots = static_cast<double>(horizon) * replications;
    metrics.avg_aoi = static_cast<double>(total_aoi) / slots;
    metrics.avg_energy_per_slot = static_cast<double>(metrics.total_spent) / slots;
    if (replications > 1) {
        double ss = 0.0;
        for (double mean : rep_mean) {
            const double d = mean - metrics.avg_aoi;
            ss += d * d;
        }
        metrics.stderr_aoi =
            std::sqrt(ss / (replications - 1)) / std::sqrt(double(replications));
    }
    return metrics;
}

PolicyComparison compare_policies(const ScenarioConfig& config, long horizon,
                                  int replications, std::uint64_t seed,
                                  bool common_random_numbers) {
    PolicyComparison cmp;
    const TransitionModel model = build_transition_model(config);
    cmp.solution = relative_value_iteration(model, {config.vi_epsilon});

    const DecisionRule optimal = optimal_rule(cmp.solution, config);
    const DecisionRule aggressive = aggressive_rule(config);
    cmp.optimal_exact = evaluate_policy_exact(cmp.solution.policy, model);
    cmp.aggressive_exact = evaluate_policy_exact(materialize(aggressive, config), model);

    SimulateOptions options;
    options.independent_streams = !common_random_numbers;
    cmp.optimal_sim = simulate(optimal, config, horizon, replications, seed, options);
    cmp.aggressive_sim = simulate(aggressive, config, horizon, replications, seed, options);

    cmp.efficiency_mc = cmp.optimal_sim.avg_aoi / cmp.aggressive_sim.avg_aoi;
    cmp.efficiency_exact = cmp.optimal_exact.gain / cmp.aggressive_exact.gain;
    return cmp;
}

}  // namespace aoi
