#pragma once

#include "aoi/policies.hpp"
#include "aoi/scenario.hpp"
#include "aoi/solver.hpp"
#include "aoi/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace aoi {

/// Deterministic per-replication stream seed; every replication draws from
/// mt19937_64 streams derived from (seed, replication, stream index).
std::uint64_t derive_stream_seed(std::uint64_t base, std::uint64_t replication,
                                 std::uint64_t stream);

/// Uniform double in [0, 1) from the engine's top 53 bits (the standard
/// library distributions are not bit-portable, this mapping is).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Monte Carlo estimates over M replications of a T-slot episode.
struct SimulationMetrics {
    double avg_aoi = 0.0;
    double stderr_aoi = 0.0;
    double avg_energy_per_slot = 0.0;
    std::vector<std::uint64_t> source_usage;  // slots per action id, sums to M*T
    long horizon = 0;
    int replications = 0;
    std::uint64_t seed = 0;
    std::string policy_name;

    // Energy ledger tallies (across all replications, exact integers).
    std::uint64_t total_harvested = 0;
    std::uint64_t total_spent = 0;
    std::uint64_t total_clamp_loss = 0;  // harvest lost to the battery cap
    std::uint64_t final_battery_sum = 0;
};

/// One slot: spend the action's cost, credit the harvest, clamp at capacity;
/// age advances through the sampled update age (inverse CDF of the source
/// pmf at age_draw) or saturates toward the cap when idle.
State simulation_step(const State& s, Action action, bool harvest_draw,
                      double age_draw, const ScenarioConfig& config);

struct SimulateOptions {
    // Salts the streams with the policy name so two policies draw
    // independently; off by default so comparisons share harvest streams.
    bool independent_streams = false;
};

/// Episodes start at (b=0, aoi=aoi_cap); slot t draws the harvest Bernoulli
/// first and an update age only when querying, so policies simulated under
/// the same (seed, replication) face identical harvest streams.
SimulationMetrics simulate(const DecisionRule& rule, const ScenarioConfig& config,
                           long horizon, int replications, std::uint64_t seed,
                           const SimulateOptions& options = {});

/// Solves the scenario, then pits the optimal policy against the aggressive
/// baseline on common random numbers; exact chain evaluations ride along.
struct PolicyComparison {
    PolicySolution solution;
    SimulationMetrics optimal_sim;
    SimulationMetrics aggressive_sim;
    EvaluationResult optimal_exact;
    EvaluationResult aggressive_exact;
    double efficiency_mc = 0.0;     // optimal avg AoI / aggressive avg AoI
    double efficiency_exact = 0.0;
};

PolicyComparison compare_policies(const ScenarioConfig& config, long horizon,
                                  int replications, std::uint64_t seed,
                                  bool common_random_numbers = true);

}  // namespace aoi
